#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "scsc/matrix.hpp"

namespace scsc {

using WarningHandler = std::function<void(const std::string&)>;

/// Positions of n states sampled on a shared time grid, stored contiguously
/// per state as [time][dim].
class TrajectoryEnsemble {
 public:
  /// `positions` is indexed (state, time, dim) row-major. `periods` is either
  /// empty or has one entry per dimension.
  TrajectoryEnsemble(std::size_t n_states, std::size_t n_times, std::size_t n_dims,
                     std::vector<double> positions, std::vector<double> times,
                     std::vector<std::optional<double>> periods = {});

  std::size_t n_states() const noexcept { return n_states_; }
  std::size_t n_times() const noexcept { return n_times_; }
  std::size_t n_dims() const noexcept { return n_dims_; }

  double position(std::size_t state, std::size_t time, std::size_t dim) const {
    return positions_[(state * n_times_ + time) * n_dims_ + dim];
  }
  /// All samples of one state, length n_times * n_dims.
  std::span<const double> trajectory(std::size_t state) const {
    return {positions_.data() + state * n_times_ * n_dims_, n_times_ * n_dims_};
  }
  std::span<const double> positions() const noexcept { return positions_; }
  std::span<const double> times() const noexcept { return times_; }
  /// One entry per dimension; nullopt for non-periodic dimensions.
  const std::vector<std::optional<double>>& periods() const noexcept { return periods_; }

  friend bool operator==(const TrajectoryEnsemble&, const TrajectoryEnsemble&) = default;

 private:
  std::size_t n_states_;
  std::size_t n_times_;
  std::size_t n_dims_;
  std::vector<double> positions_;
  std::vector<double> times_;
  std::vector<std::optional<double>> periods_;
};

/// Dense symmetric nonnegative dissimilarity matrix with zero diagonal.
/// Only constructible through the builders below, which enforce the invariants.
class AdjacencyMatrix {
 public:
  std::size_t n() const noexcept { return values_.rows(); }
  double operator()(std::size_t i, std::size_t j) const { return values_(i, j); }
  std::span<const double> row(std::size_t i) const { return values_.row(i); }
  const Matrix& values() const noexcept { return values_; }

  friend bool operator==(const AdjacencyMatrix&, const AdjacencyMatrix&) = default;

 private:
  explicit AdjacencyMatrix(Matrix values) : values_(std::move(values)) {}
  Matrix values_;

  friend AdjacencyMatrix validate_adjacency(Matrix raw);
  friend class AdjacencyBuilder;
};

/// Row-stochastic matrix; every row is a probability distribution.
class TransitionMatrix {
 public:
  explicit TransitionMatrix(Matrix rows);

  std::size_t n() const noexcept { return rows_.rows(); }
  std::span<const double> row(std::size_t i) const { return rows_.row(i); }
  const Matrix& values() const noexcept { return rows_; }

 private:
  Matrix rows_;
};

struct DissimilarityOptions {
  /// Use the nearest periodic image in every dimension that declares a period.
  bool minimum_image = false;
  /// Worker count for the pairwise loop; output does not depend on it.
  unsigned threads = 1;
  /// Receives diagnostics such as identical-trajectory pairs. Defaults to stderr.
  WarningHandler on_warning;
};

/// Normalized standard deviation of the pair separation:
/// sqrt(sum_k (rbar - r_k)^2) / rbar. Identical trajectories give 0 and a warning.
double trajectory_dissimilarity(const TrajectoryEnsemble& ensemble, std::size_t i, std::size_t j,
                                const DissimilarityOptions& options = {});

AdjacencyMatrix build_trajectory_adjacency(const TrajectoryEnsemble& ensemble,
                                           const DissimilarityOptions& options = {});

/// Jensen-Shannon divergence in nats; lies in [0, ln 2].
double js_divergence(std::span<const double> p, std::span<const double> q);

/// Square root of the Jensen-Shannon divergence, a metric on distributions.
double js_metric(std::span<const double> p, std::span<const double> q);

AdjacencyMatrix build_transition_adjacency(const TransitionMatrix& transitions, unsigned threads = 1);

/// Accepts externally supplied dissimilarities. Asymmetry up to 1e-9 is
/// averaged away and diagonal magnitudes up to 1e-12 are zeroed; anything
/// larger, any negative entry, and any non-finite entry is rejected with an
/// EntryError naming the offending position.
AdjacencyMatrix validate_adjacency(Matrix raw);

inline constexpr double kSymmetryTolerance = 1e-9;
inline constexpr double kDiagonalTolerance = 1e-12;
inline constexpr double kStochasticTolerance = 1e-9;

}  // namespace scsc
