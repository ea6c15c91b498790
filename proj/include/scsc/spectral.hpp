#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "scsc/adjacency.hpp"
#include "scsc/matrix.hpp"
#include "scsc/symmetric_eigen.hpp"

namespace scsc {

/// Leading generalized eigenpairs of (L, D), eigenvalues nonincreasing.
/// Eigenvectors are D-orthonormal and sign-fixed so that their
/// largest-magnitude entry is positive.
class SpectralBasis {
 public:
  SpectralBasis(std::vector<double> eigenvalues, Matrix eigenvectors_by_row, std::vector<double> degrees);

  std::size_t n() const noexcept { return degrees_.size(); }
  std::size_t m() const noexcept { return eigenvalues_.size(); }
  const std::vector<double>& eigenvalues() const noexcept { return eigenvalues_; }
  /// Scalar coloring of every state for eigenpair k (0-based).
  std::span<const double> eigenvector(std::size_t k) const { return vectors_.row(k); }
  double value(std::size_t state, std::size_t k) const { return vectors_(k, state); }
  const std::vector<double>& degrees() const noexcept { return degrees_; }

  friend bool operator==(const SpectralBasis&, const SpectralBasis&) = default;

 private:
  std::vector<double> eigenvalues_;
  Matrix vectors_;  // m x n, row k is eigenvector k
  std::vector<double> degrees_;
};

/// Row sums of A. Throws DegenerateStateError for a zero row.
std::vector<double> degree_vector(const AdjacencyMatrix& a);

/// L = D - A.
Matrix graph_laplacian(const AdjacencyMatrix& a);

/// Solves L X = lambda D X through S = D^-1/2 L D^-1/2 and keeps the top `m`
/// eigenpairs.
SpectralBasis solve_generalized(const AdjacencyMatrix& a, std::size_t m,
                                linalg::EigenMethod method = linalg::EigenMethod::automatic);

/// z = 1/2 sum_ij (x_i - x_j)^2 a_ij over all states.
double z_value(std::span<const double> x, const AdjacencyMatrix& a);

/// Same sum restricted to i, j in `subset`.
double z_value(std::span<const double> x, const AdjacencyMatrix& a, std::span<const std::size_t> subset);

}  // namespace scsc
