#include "scsc/symmetric_eigen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

#include "scsc/error.hpp"

namespace scsc::linalg {
namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr int kMaxQlIterations = 60;

// Implicit QL on (d, e) with e[i] coupling i and i + 1. `rotate(i, c, s)` is
// called for every Givens rotation acting on indices i and i + 1.
template <class Rotate>
void implicit_ql(std::vector<double>& d, std::vector<double>& e, Rotate&& rotate) {
  const std::size_t n = d.size();
  if (n < 2) return;
  e.resize(n, 0.0);
  e[n - 1] = 0.0;
  for (std::size_t l = 0; l < n; ++l) {
    int iter = 0;
    std::size_t m;
    do {
      for (m = l; m + 1 < n; ++m) {
        const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
        if (std::abs(e[m]) <= kEps * dd) break;
      }
      if (m != l) {
        if (iter++ == kMaxQlIterations) {
          std::ostringstream msg;
          msg << "implicit QL failed to converge: eigenvalue " << l << " of " << n << " after "
              << kMaxQlIterations << " iterations, residual coupling " << std::abs(e[l]);
          throw NumericalError(msg.str());
        }
        double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
        double r = std::hypot(g, 1.0);
        g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
        double s = 1.0;
        double c = 1.0;
        double p = 0.0;
        bool underflow = false;
        for (std::size_t ii = m; ii-- > l;) {
          const double f = s * e[ii];
          const double b = c * e[ii];
          r = std::hypot(f, g);
          e[ii + 1] = r;
          if (r == 0.0) {
            d[ii + 1] -= p;
            e[m] = 0.0;
            underflow = true;
            break;
          }
          s = f / r;
          c = g / r;
          g = d[ii + 1] - p;
          r = (d[ii] - g) * s + 2.0 * c * b;
          p = s * r;
          d[ii + 1] = g + p;
          g = c * r - b;
          rotate(ii, c, s);
        }
        if (underflow) continue;
        d[l] -= p;
        e[l] = g;
        e[m] = 0.0;
      }
    } while (m != l);
  }
}

// LU factorization of a shifted tridiagonal matrix with partial pivoting,
// pivots clamped away from zero. Same layout as LAPACK's gttrf.
struct ShiftedTridiagonalLu {
  std::vector<double> dl, dd, du, du2;
  std::vector<char> swapped;

  ShiftedTridiagonalLu(std::span<const double> d, std::span<const double> e, double shift, double tiny) {
    const std::size_t n = d.size();
    dd.resize(n);
    for (std::size_t i = 0; i < n; ++i) dd[i] = d[i] - shift;
    dl.assign(e.begin(), e.end());
    du.assign(e.begin(), e.end());
    du2.assign(n, 0.0);
    swapped.assign(n, 0);
    for (std::size_t i = 0; i + 1 < n; ++i) {
      if (std::abs(dd[i]) >= std::abs(dl[i])) {
        if (std::abs(dd[i]) < tiny) dd[i] = std::copysign(tiny, dd[i] == 0.0 ? 1.0 : dd[i]);
        const double fact = dl[i] / dd[i];
        dl[i] = fact;
        dd[i + 1] -= fact * du[i];
      } else {
        const double fact = dd[i] / dl[i];
        dd[i] = dl[i];
        dl[i] = fact;
        const double temp = du[i];
        du[i] = dd[i + 1];
        dd[i + 1] = temp - fact * dd[i + 1];
        if (i + 2 < n) {
          du2[i] = du[i + 1];
          du[i + 1] = -fact * du[i + 1];
        }
        swapped[i] = 1;
      }
    }
    if (std::abs(dd[n - 1]) < tiny) dd[n - 1] = std::copysign(tiny, dd[n - 1] == 0.0 ? 1.0 : dd[n - 1]);
  }

  void solve(std::vector<double>& b) const {
    const std::size_t n = dd.size();
    for (std::size_t i = 0; i + 1 < n; ++i) {
      if (swapped[i]) std::swap(b[i], b[i + 1]);
      b[i + 1] -= dl[i] * b[i];
    }
    b[n - 1] /= dd[n - 1];
    if (n > 1) b[n - 2] = (b[n - 2] - du[n - 2] * b[n - 1]) / dd[n - 2];
    for (std::size_t i = n - 2; i-- > 0;) {
      b[i] = (b[i] - du[i] * b[i + 1] - du2[i] * b[i + 2]) / dd[i];
    }
  }
};

double normalize(std::vector<double>& v) {
  double norm = 0.0;
  for (double x : v) norm += x * x;
  norm = std::sqrt(norm);
  if (norm > 0.0) {
    for (double& x : v) x /= norm;
  }
  return norm;
}

struct Block {
  std::size_t begin;
  std::size_t end;  // exclusive
};

// Inverse iteration for one eigenvalue inside an unreduced block. Vectors in
// `cluster` (same block, nearby eigenvalues) are projected out every sweep.
std::vector<double> inverse_iterate(std::span<const double> d, std::span<const double> e, double lambda,
                                    double tnorm, std::size_t stream,
                                    const std::vector<const std::vector<double>*>& cluster) {
  const std::size_t n = d.size();
  std::vector<double> v(n);
  if (n == 1) {
    v[0] = 1.0;
    return v;
  }
  std::mt19937_64 engine(0x9e3779b97f4a7c15ULL ^ stream);
  for (double& x : v) x = 2.0 * static_cast<double>(engine() >> 11) * 0x1.0p-53 - 1.0;
  const ShiftedTridiagonalLu lu(d, e, lambda, kEps * tnorm);
  auto residual = [&](const std::vector<double>& x) {
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double r = (d[i] - lambda) * x[i];
      if (i > 0) r += e[i - 1] * x[i - 1];
      if (i + 1 < n) r += e[i] * x[i + 1];
      worst = std::max(worst, std::abs(r));
    }
    return worst;
  };
  auto project = [&](std::vector<double>& x) {
    for (const auto* u : cluster) {
      const double dot = std::inner_product(x.begin(), x.end(), u->begin(), 0.0);
      for (std::size_t i = 0; i < n; ++i) x[i] -= dot * (*u)[i];
    }
  };
  project(v);
  normalize(v);
  const double target = 4.0 * static_cast<double>(n) * kEps * tnorm;
  for (int sweep = 0; sweep < 12; ++sweep) {
    lu.solve(v);
    project(v);
    normalize(v);
    if (sweep >= 2 && residual(v) <= target) break;
  }
  return v;
}

EigenPairs top_from_full(Tridiagonal t, std::size_t count) {
  const std::size_t n = t.diag.size();
  Matrix vt(n, n, 0.0);
  for (std::size_t i = 0; i < n; ++i) vt(i, i) = 1.0;
  std::vector<double> d = t.diag;
  tridiagonal_ql(d, t.offdiag, vt);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return d[a] > d[b]; });
  EigenPairs out{std::vector<double>(count), Matrix(count, n)};
  for (std::size_t k = 0; k < count; ++k) {
    out.values[k] = d[order[k]];
    auto row = out.vectors.row(k);
    std::copy(vt.row(order[k]).begin(), vt.row(order[k]).end(), row.begin());
    apply_q(t, row);
  }
  return out;
}

EigenPairs top_from_inverse_iteration(const Tridiagonal& t, std::size_t count) {
  const std::size_t n = t.diag.size();
  std::vector<double> e = t.offdiag;
  double tnorm = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double row = std::abs(t.diag[i]);
    if (i > 0) row += std::abs(e[i - 1]);
    if (i + 1 < n) row += std::abs(e[i]);
    tnorm = std::max(tnorm, row);
  }
  std::vector<Block> blocks;
  std::size_t start = 0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (std::abs(e[i]) <= kEps * (std::abs(t.diag[i]) + std::abs(t.diag[i + 1]))) {
      e[i] = 0.0;
      blocks.push_back({start, i + 1});
      start = i + 1;
    }
  }
  blocks.push_back({start, n});

  struct Candidate {
    double value;
    std::size_t block;
  };
  std::vector<Candidate> candidates;
  candidates.reserve(n);
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    const auto [lo, hi] = blocks[b];
    std::vector<double> d(t.diag.begin() + lo, t.diag.begin() + hi);
    std::vector<double> off(e.begin() + lo, e.begin() + (hi - 1));
    for (double v : tridiagonal_eigenvalues(std::move(d), std::move(off))) candidates.push_back({v, b});
  }
  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const Candidate& a, const Candidate& b) { return a.value > b.value; });

  const double cluster_gap = 1e-3 * tnorm;
  EigenPairs out{std::vector<double>(count), Matrix(count, n)};
  std::vector<std::vector<double>> local(count);
  for (std::size_t k = 0; k < count; ++k) {
    const auto [lambda, b] = candidates[k];
    const auto [lo, hi] = blocks[b];
    std::vector<const std::vector<double>*> cluster;
    // Selected eigenvalues are descending, so walking back stays inside the cluster chain.
    for (std::size_t j = k; j-- > 0;) {
      if (candidates[j].value - candidates[j + 1].value > cluster_gap) break;
      if (candidates[j].block == b) cluster.push_back(&local[j]);
    }
    std::span<const double> d(t.diag.data() + lo, hi - lo);
    std::span<const double> off(e.data() + lo, hi - lo - 1);
    local[k] = inverse_iterate(d, off, lambda, tnorm, k, cluster);
    out.values[k] = lambda;
    auto row = out.vectors.row(k);
    std::fill(row.begin(), row.end(), 0.0);
    std::copy(local[k].begin(), local[k].end(), row.begin() + static_cast<std::ptrdiff_t>(lo));
    apply_q(t, row);
  }
  return out;
}

// Residual and orthogonality check against the original lower triangle.
bool acceptable(const Matrix& lower, const EigenPairs& pairs) {
  const std::size_t n = lower.rows();
  double anorm = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < n; ++j) row += std::abs(i >= j ? lower(i, j) : lower(j, i));
    anorm = std::max(anorm, row);
  }
  const double tol = 1e-11 * std::max(1.0, anorm);
  std::vector<double> av(n);
  for (std::size_t k = 0; k < pairs.values.size(); ++k) {
    const auto v = pairs.vectors.row(k);
    std::fill(av.begin(), av.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const double* li = &lower(i, 0);
      double s = 0.0;
      for (std::size_t j = 0; j < i; ++j) {
        s += li[j] * v[j];
        av[j] += li[j] * v[i];
      }
      av[i] += s + li[i] * v[i];
    }
    double res = 0.0;
    for (std::size_t i = 0; i < n; ++i) res += (av[i] - pairs.values[k] * v[i]) * (av[i] - pairs.values[k] * v[i]);
    if (!(std::sqrt(res) <= tol)) return false;
    for (std::size_t j = 0; j < k; ++j) {
      const auto u = pairs.vectors.row(j);
      const double dot = std::inner_product(u.begin(), u.end(), v.begin(), 0.0);
      if (!(std::abs(dot) <= 1e-11)) return false;
    }
  }
  return true;
}

}  // namespace

Tridiagonal tridiagonalize(Matrix a) {
  if (!a.square()) throw ValidationError("tridiagonalize: matrix must be square");
  const std::size_t n = a.rows();
  Tridiagonal out;
  out.diag.assign(n, 0.0);
  out.offdiag.assign(n > 0 ? n - 1 : 0, 0.0);
  out.h.assign(n, 0.0);
  std::vector<double> p(n), q(n);
  for (std::size_t i = n; i-- > 1;) {
    double* u = &a(i, 0);
    out.diag[i] = u[i];
    const std::size_t l = i - 1;
    if (i == 1) {
      out.offdiag[0] = u[0];
      continue;
    }
    double scale = 0.0;
    for (std::size_t k = 0; k < i; ++k) scale += std::abs(u[k]);
    if (scale == 0.0) {
      out.offdiag[l] = 0.0;
      continue;
    }
    double sigma = 0.0;
    for (std::size_t k = 0; k < i; ++k) {
      u[k] /= scale;
      sigma += u[k] * u[k];
    }
    const double f = u[l];
    const double g = f >= 0.0 ? -std::sqrt(sigma) : std::sqrt(sigma);
    out.offdiag[l] = scale * g;
    const double h = sigma - f * g;
    u[l] = f - g;
    out.h[i] = h;

    // p = B u / h with B the leading i x i block, lower triangle only.
    std::fill(p.begin(), p.begin() + static_cast<std::ptrdiff_t>(i), 0.0);
    for (std::size_t j = 0; j < i; ++j) {
      const double* bj = &a(j, 0);
      const double uj = u[j];
      double s = 0.0;
      for (std::size_t k = 0; k < j; ++k) {
        s += bj[k] * u[k];
        p[k] += bj[k] * uj;
      }
      p[j] += s + bj[j] * uj;
    }
    double kk = 0.0;
    for (std::size_t j = 0; j < i; ++j) {
      p[j] /= h;
      kk += u[j] * p[j];
    }
    kk /= 2.0 * h;
    for (std::size_t j = 0; j < i; ++j) q[j] = p[j] - kk * u[j];
    for (std::size_t j = 0; j < i; ++j) {
      double* bj = &a(j, 0);
      const double uj = u[j];
      const double qj = q[j];
      for (std::size_t k = 0; k <= j; ++k) bj[k] -= uj * q[k] + qj * u[k];
    }
  }
  if (n > 0) out.diag[0] = a(0, 0);
  out.reflectors = std::move(a);
  return out;
}

void apply_q(const Tridiagonal& t, std::span<double> v) {
  const std::size_t n = t.diag.size();
  for (std::size_t i = 2; i < n; ++i) {
    if (t.h[i] == 0.0) continue;
    const double* u = &t.reflectors(i, 0);
    double s = 0.0;
    for (std::size_t k = 0; k < i; ++k) s += u[k] * v[k];
    s /= t.h[i];
    for (std::size_t k = 0; k < i; ++k) v[k] -= s * u[k];
  }
}

std::vector<double> tridiagonal_eigenvalues(std::vector<double> diag, std::vector<double> offdiag) {
  implicit_ql(diag, offdiag, [](std::size_t, double, double) {});
  return diag;
}

void tridiagonal_ql(std::vector<double>& diag, std::vector<double> offdiag, Matrix& vt) {
  const std::size_t cols = vt.cols();
  implicit_ql(diag, offdiag, [&](std::size_t i, double c, double s) {
    double* lo = &vt(i, 0);
    double* hi = &vt(i + 1, 0);
    for (std::size_t k = 0; k < cols; ++k) {
      const double f = hi[k];
      hi[k] = s * lo[k] + c * f;
      lo[k] = c * lo[k] - s * f;
    }
  });
}

EigenPairs largest_eigenpairs(Matrix a, std::size_t count, EigenMethod method) {
  if (!a.square()) throw ValidationError("eigenproblem matrix must be square");
  const std::size_t n = a.rows();
  if (count > n) throw ValidationError("requested more eigenpairs than the matrix dimension");
  if (method == EigenMethod::automatic) {
    method = (n <= 512 || count * 8 > n) ? EigenMethod::full_ql : EigenMethod::inverse_iteration;
  }
  if (method == EigenMethod::full_ql) return top_from_full(tridiagonalize(std::move(a)), count);

  Matrix lower = a;
  Tridiagonal t = tridiagonalize(std::move(a));
  EigenPairs pairs = top_from_inverse_iteration(t, count);
  if (acceptable(lower, pairs)) return pairs;
  return top_from_full(std::move(t), count);
}

}  // namespace scsc::linalg
