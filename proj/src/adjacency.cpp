#include "scsc/adjacency.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <sstream>

#include "scsc/error.hpp"
#include "scsc/parallel.hpp"

namespace scsc {

class AdjacencyBuilder {
 public:
  static AdjacencyMatrix wrap(Matrix values) { return AdjacencyMatrix(std::move(values)); }
};

namespace {

void emit_warning(const WarningHandler& handler, const std::string& message) {
  if (handler) {
    handler(message);
  } else {
    std::cerr << "warning: " << message << '\n';
  }
}

struct PairResult {
  double value;
  bool identical;
};

// Fixed four-lane summation so the result does not depend on vectorization.
double lane_sum(const double* v, std::size_t n) {
  double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
  std::size_t t = 0;
  for (; t + 4 <= n; t += 4) {
    s0 += v[t];
    s1 += v[t + 1];
    s2 += v[t + 2];
    s3 += v[t + 3];
  }
  for (; t < n; ++t) s0 += v[t];
  return (s0 + s1) + (s2 + s3);
}

double lane_spread(const double* v, std::size_t n, double mean) {
  double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
  std::size_t t = 0;
  for (; t + 4 <= n; t += 4) {
    const double d0 = mean - v[t], d1 = mean - v[t + 1], d2 = mean - v[t + 2], d3 = mean - v[t + 3];
    s0 += d0 * d0;
    s1 += d1 * d1;
    s2 += d2 * d2;
    s3 += d3 * d3;
  }
  for (; t < n; ++t) s0 += (mean - v[t]) * (mean - v[t]);
  return (s0 + s1) + (s2 + s3);
}

// Separation series into `scratch`, then mean and spread over it.
PairResult pair_dissimilarity(const TrajectoryEnsemble& ens, std::size_t i, std::size_t j,
                              const std::vector<double>& periods, std::vector<double>& scratch) {
  const std::size_t nt = ens.n_times();
  const std::size_t nd = ens.n_dims();
  const double* a = ens.trajectory(i).data();
  const double* b = ens.trajectory(j).data();
  scratch.resize(nt);
  double* r = scratch.data();
  if (periods.empty() && nd == 2) {
    for (std::size_t t = 0; t < nt; ++t) {
      const double dx = a[2 * t] - b[2 * t];
      const double dy = a[2 * t + 1] - b[2 * t + 1];
      r[t] = std::sqrt(dx * dx + dy * dy);
    }
  } else {
    for (std::size_t t = 0; t < nt; ++t) {
      double sq = 0.0;
      for (std::size_t d = 0; d < nd; ++d) {
        double delta = a[t * nd + d] - b[t * nd + d];
        if (!periods.empty() && periods[d] > 0.0) delta -= periods[d] * std::nearbyint(delta / periods[d]);
        sq += delta * delta;
      }
      r[t] = std::sqrt(sq);
    }
  }
  const double mean = lane_sum(r, nt) / static_cast<double>(nt);
  if (mean == 0.0) return {0.0, true};
  const double spread = lane_spread(r, nt, mean);
  const double value = std::sqrt(spread) / mean;
  if (!std::isfinite(value)) {
    std::ostringstream msg;
    msg << "non-finite dissimilarity for pair (" << i << ", " << j << ")";
    throw NumericalError(msg.str());
  }
  return {value, false};
}

std::vector<double> active_periods(const TrajectoryEnsemble& ens, bool minimum_image) {
  std::vector<double> periods;
  if (!minimum_image) return periods;
  bool any = false;
  periods.assign(ens.n_dims(), 0.0);
  for (std::size_t d = 0; d < ens.n_dims() && d < ens.periods().size(); ++d) {
    if (ens.periods()[d]) {
      periods[d] = *ens.periods()[d];
      any = true;
    }
  }
  if (!any) periods.clear();
  return periods;
}

void check_distribution(std::span<const double> p, const char* name) {
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (!std::isfinite(p[i]) || p[i] < 0.0) {
      std::ostringstream msg;
      msg << name << "[" << i << "] = " << p[i] << " is not a probability";
      throw ValidationError(msg.str());
    }
    sum += p[i];
  }
  if (std::abs(sum - 1.0) > kStochasticTolerance) {
    std::ostringstream msg;
    msg << name << " sums to " << sum << ", not 1";
    throw ValidationError(msg.str());
  }
}

double js_unchecked(std::span<const double> p, std::span<const double> q) {
  double total = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    // one term per component so swapping P and Q is bit-exact
    const double m = 0.5 * (p[i] + q[i]);
    const double tp = p[i] > 0.0 ? p[i] * std::log(p[i] / m) : 0.0;
    const double tq = q[i] > 0.0 ? q[i] * std::log(q[i] / m) : 0.0;
    total += tp + tq;
  }
  return std::max(0.0, 0.5 * total);
}

}  // namespace

TrajectoryEnsemble::TrajectoryEnsemble(std::size_t n_states, std::size_t n_times, std::size_t n_dims,
                                       std::vector<double> positions, std::vector<double> times,
                                       std::vector<std::optional<double>> periods)
    : n_states_(n_states),
      n_times_(n_times),
      n_dims_(n_dims),
      positions_(std::move(positions)),
      times_(std::move(times)),
      periods_(std::move(periods)) {
  if (n_states_ == 0 || n_times_ == 0 || n_dims_ == 0) {
    throw ValidationError("trajectory ensemble needs at least one state, time and dimension");
  }
  if (positions_.size() != n_states_ * n_times_ * n_dims_) {
    throw ValidationError("position array size does not match n_states * n_times * n_dims");
  }
  if (times_.size() != n_times_) throw ValidationError("time grid length does not match n_times");
  for (std::size_t k = 0; k < positions_.size(); ++k) {
    if (!std::isfinite(positions_[k])) {
      const std::size_t per_state = n_times_ * n_dims_;
      std::ostringstream msg;
      msg << "non-finite position for state " << k / per_state << " at time index "
          << (k % per_state) / n_dims_;
      throw ValidationError(msg.str());
    }
  }
  for (std::size_t t = 0; t < n_times_; ++t) {
    if (!std::isfinite(times_[t]) || (t > 0 && !(times_[t] > times_[t - 1]))) {
      throw ValidationError("time stamps must be finite and strictly increasing");
    }
  }
  if (periods_.empty()) periods_.resize(n_dims_);
  if (periods_.size() != n_dims_) throw ValidationError("periods must have one entry per dimension");
  for (const auto& p : periods_) {
    if (p && !(*p > 0.0 && std::isfinite(*p))) throw ValidationError("periods must be positive");
  }
}

TransitionMatrix::TransitionMatrix(Matrix rows) : rows_(std::move(rows)) {
  if (rows_.rows() == 0 || !rows_.square()) throw ValidationError("transition matrix must be square and non-empty");
  for (std::size_t i = 0; i < rows_.rows(); ++i) {
    double sum = 0.0;
    for (std::size_t j = 0; j < rows_.cols(); ++j) {
      const double v = rows_(i, j);
      if (!std::isfinite(v) || v < 0.0 || v > 1.0) {
        std::ostringstream msg;
        msg << "transition entry (" << i << ", " << j << ") = " << v << " outside [0, 1]";
        throw EntryError(msg.str(), i, j);
      }
      sum += v;
    }
    if (std::abs(sum - 1.0) > kStochasticTolerance) {
      std::ostringstream msg;
      msg << "transition row " << i << " sums to " << sum;
      throw EntryError(msg.str(), i, 0);
    }
  }
}

double trajectory_dissimilarity(const TrajectoryEnsemble& ensemble, std::size_t i, std::size_t j,
                                const DissimilarityOptions& options) {
  if (i >= ensemble.n_states() || j >= ensemble.n_states()) {
    std::ostringstream msg;
    msg << "state index out of range: (" << i << ", " << j << ") with n = " << ensemble.n_states();
    throw ValidationError(msg.str());
  }
  if (i == j) throw ValidationError("dissimilarity requires two distinct states");
  if (ensemble.n_times() < 2) throw ValidationError("dissimilarity requires at least two time samples");
  std::vector<double> scratch;
  const auto result = pair_dissimilarity(ensemble, i, j, active_periods(ensemble, options.minimum_image), scratch);
  if (result.identical) {
    std::ostringstream msg;
    msg << "states " << i << " and " << j << " have identical trajectories; dissimilarity set to 0";
    emit_warning(options.on_warning, msg.str());
  }
  return result.value;
}

AdjacencyMatrix build_trajectory_adjacency(const TrajectoryEnsemble& ensemble, const DissimilarityOptions& options) {
  const std::size_t n = ensemble.n_states();
  if (n >= 2 && ensemble.n_times() < 2) throw ValidationError("dissimilarity requires at least two time samples");
  const auto periods = active_periods(ensemble, options.minimum_image);
  Matrix values(n, n, 0.0);
  // One identical-pair tally per row keeps the summary independent of scheduling.
  std::vector<std::size_t> identical(n, 0);
  std::vector<std::size_t> first_partner(n, 0);
  parallel_for(n, options.threads, [&](std::size_t i) {
    thread_local std::vector<double> scratch;
    for (std::size_t j = i + 1; j < n; ++j) {
      PairResult r;
      try {
        r = pair_dissimilarity(ensemble, i, j, periods, scratch);
      } catch (const NumericalError& e) {
        throw NumericalError(std::string(e.what()) + " while building adjacency");
      }
      values(i, j) = r.value;
      values(j, i) = r.value;
      if (r.identical && identical[i]++ == 0) first_partner[i] = j;
    }
  });
  std::size_t total = 0;
  std::size_t first = n;
  for (std::size_t i = 0; i < n; ++i) {
    total += identical[i];
    if (identical[i] && first == n) first = i;
  }
  if (total > 0) {
    std::ostringstream msg;
    msg << total << " pair(s) of identical trajectories (first: " << first << ", " << first_partner[first]
        << "); their dissimilarity is set to 0";
    emit_warning(options.on_warning, msg.str());
  }
  return AdjacencyBuilder::wrap(std::move(values));
}

double js_divergence(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw ValidationError("distributions have different lengths");
  check_distribution(p, "P");
  check_distribution(q, "Q");
  return js_unchecked(p, q);
}

double js_metric(std::span<const double> p, std::span<const double> q) { return std::sqrt(js_divergence(p, q)); }

AdjacencyMatrix build_transition_adjacency(const TransitionMatrix& transitions, unsigned threads) {
  const std::size_t n = transitions.n();
  Matrix values(n, n, 0.0);
  parallel_for(n, threads, [&](std::size_t i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double v = std::sqrt(js_unchecked(transitions.row(i), transitions.row(j)));
      values(i, j) = v;
      values(j, i) = v;
    }
  });
  return AdjacencyBuilder::wrap(std::move(values));
}

AdjacencyMatrix validate_adjacency(Matrix raw) {
  const std::size_t n = raw.rows();
  if (n == 0 || !raw.square()) throw ValidationError("adjacency matrix must be square and non-empty");
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double v = raw(i, j);
      std::ostringstream msg;
      if (!std::isfinite(v)) {
        msg << "adjacency entry (" << i << ", " << j << ") is not finite";
        throw EntryError(msg.str(), i, j);
      }
      if (i != j && v < 0.0) {
        msg << "adjacency entry (" << i << ", " << j << ") = " << v << " is negative";
        throw EntryError(msg.str(), i, j);
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (std::abs(raw(i, i)) > kDiagonalTolerance) {
      std::ostringstream msg;
      msg << "adjacency diagonal entry (" << i << ", " << i << ") = " << raw(i, i) << " is not zero";
      throw EntryError(msg.str(), i, i);
    }
    raw(i, i) = 0.0;
    for (std::size_t j = i + 1; j < n; ++j) {
      const double a = raw(i, j);
      const double b = raw(j, i);
      if (std::abs(a - b) > kSymmetryTolerance) {
        std::ostringstream msg;
        msg << "adjacency is asymmetric at (" << i << ", " << j << "): " << a << " vs " << b;
        throw EntryError(msg.str(), i, j);
      }
      if (a != b) {
        const double mean = 0.5 * (a + b);
        raw(i, j) = mean;
        raw(j, i) = mean;
      }
    }
  }
  return AdjacencyBuilder::wrap(std::move(raw));
}

}  // namespace scsc
