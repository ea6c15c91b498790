#include "scsc/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "scsc/error.hpp"

namespace scsc {
namespace {

// Largest-magnitude entry made positive; near-ties (within 1e-12 relative)
// resolve to the lowest index so rounding noise cannot flip the sign.
void fix_sign(std::span<double> v) {
  double big = 0.0;
  for (double x : v) big = std::max(big, std::abs(x));
  if (big == 0.0) return;
  for (double x : v) {
    if (std::abs(x) >= big * (1.0 - 1e-12)) {
      if (x < 0.0) {
        for (double& y : v) y = -y;
      }
      return;
    }
  }
}

std::size_t first_nonzero(std::span<const double> v) {
  double big = 0.0;
  for (double x : v) big = std::max(big, std::abs(x));
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (std::abs(v[i]) > 1e-12 * big) return i;
  }
  return v.size();
}

}  // namespace

SpectralBasis::SpectralBasis(std::vector<double> eigenvalues, Matrix eigenvectors_by_row, std::vector<double> degrees)
    : eigenvalues_(std::move(eigenvalues)), vectors_(std::move(eigenvectors_by_row)), degrees_(std::move(degrees)) {
  if (vectors_.rows() != eigenvalues_.size() || vectors_.cols() != degrees_.size()) {
    throw ValidationError("spectral basis dimensions are inconsistent");
  }
}

std::vector<double> degree_vector(const AdjacencyMatrix& a) {
  const std::size_t n = a.n();
  std::vector<double> degrees(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = a.row(i);
    degrees[i] = std::accumulate(row.begin(), row.end(), 0.0);
    if (!(degrees[i] > 0.0)) {
      std::ostringstream msg;
      msg << "state " << i << " has zero dissimilarity to every other state (zero degree); "
          << "remove duplicates or perturb the input";
      throw DegenerateStateError(msg.str(), i);
    }
  }
  return degrees;
}

Matrix graph_laplacian(const AdjacencyMatrix& a) {
  const auto degrees = degree_vector(a);
  const std::size_t n = a.n();
  Matrix l(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) l(i, j) = -a(i, j);
    l(i, i) = degrees[i];
  }
  return l;
}

SpectralBasis solve_generalized(const AdjacencyMatrix& a, std::size_t m, linalg::EigenMethod method) {
  const std::size_t n = a.n();
  if (m > n) {
    std::ostringstream msg;
    msg << "requested " << m << " eigenpairs from a " << n << "-state problem";
    throw ValidationError(msg.str());
  }
  auto degrees = degree_vector(a);
  std::vector<double> inv_sqrt(n);
  for (std::size_t i = 0; i < n; ++i) inv_sqrt[i] = 1.0 / std::sqrt(degrees[i]);

  // Lower triangle of S = I - D^-1/2 A D^-1/2.
  Matrix s(n, n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < i; ++j) s(i, j) = -(a(i, j) * inv_sqrt[i]) * inv_sqrt[j];
    s(i, i) = 1.0;
  }
  linalg::EigenPairs pairs = linalg::largest_eigenpairs(std::move(s), m, method);

  Matrix vectors(m, n);
  std::vector<std::size_t> lead(m);
  for (std::size_t k = 0; k < m; ++k) {
    auto x = vectors.row(k);
    const auto y = pairs.vectors.row(k);
    double dnorm = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = y[i] * inv_sqrt[i];
      dnorm += x[i] * x[i] * degrees[i];
    }
    dnorm = std::sqrt(dnorm);
    for (double& v : x) v /= dnorm;
    fix_sign(x);
    lead[k] = first_nonzero(x);
  }

  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t p, std::size_t q) {
    if (pairs.values[p] != pairs.values[q]) return pairs.values[p] > pairs.values[q];
    return lead[p] < lead[q];
  });
  std::vector<double> values(m);
  Matrix sorted(m, n);
  for (std::size_t k = 0; k < m; ++k) {
    values[k] = pairs.values[order[k]];
    const auto src = vectors.row(order[k]);
    std::copy(src.begin(), src.end(), sorted.row(k).begin());
  }
  return SpectralBasis(std::move(values), std::move(sorted), std::move(degrees));
}

double z_value(std::span<const double> x, const AdjacencyMatrix& a) {
  const std::size_t n = a.n();
  if (x.size() != n) throw ValidationError("coloring vector length does not match the adjacency matrix");
  double z = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = a.row(i);
    double partial = 0.0;
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d = x[i] - x[j];
      partial += d * d * row[j];
    }
    z += partial;
  }
  return z;
}

double z_value(std::span<const double> x, const AdjacencyMatrix& a, std::span<const std::size_t> subset) {
  const std::size_t n = a.n();
  if (x.size() != n) throw ValidationError("coloring vector length does not match the adjacency matrix");
  if (subset.empty()) throw ValidationError("z_value subset must contain at least one state");
  for (std::size_t s : subset) {
    if (s >= n) {
      std::ostringstream msg;
      msg << "z_value subset index " << s << " out of range for " << n << " states";
      throw ValidationError(msg.str());
    }
  }
  double z = 0.0;
  for (std::size_t p = 0; p < subset.size(); ++p) {
    const std::size_t i = subset[p];
    const auto row = a.row(i);
    double partial = 0.0;
    for (std::size_t q = p + 1; q < subset.size(); ++q) {
      const std::size_t j = subset[q];
      const double d = x[i] - x[j];
      partial += d * d * row[j];
    }
    z += partial;
  }
  return z;
}

}  // namespace scsc
