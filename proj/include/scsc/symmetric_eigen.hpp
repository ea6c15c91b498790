#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "scsc/matrix.hpp"

namespace scsc::linalg {

/// Householder reduction A = Q T Q^T of a symmetric matrix.
/// Row i of `reflectors` holds the vector u_i (first i entries) of the
/// reflector P_i = I - u_i u_i^T / h_i; h_i == 0 marks an identity step.
struct Tridiagonal {
  std::vector<double> diag;
  std::vector<double> offdiag;  // offdiag[i] couples i and i + 1, length n - 1
  Matrix reflectors;
  std::vector<double> h;
};

/// Reads only the lower triangle of `a`.
Tridiagonal tridiagonalize(Matrix a);

/// Applies Q to a vector expressed in the tridiagonal basis, in place.
void apply_q(const Tridiagonal& t, std::span<double> v);

/// Eigenvalues of a symmetric tridiagonal matrix by implicit QL (unsorted).
std::vector<double> tridiagonal_eigenvalues(std::vector<double> diag, std::vector<double> offdiag);

/// Implicit QL with accumulation. On return diag holds eigenvalues and row k
/// of `vt` has been rotated into the eigenvector for diag[k]; pass the
/// identity to get eigenvectors of T itself.
void tridiagonal_ql(std::vector<double>& diag, std::vector<double> offdiag, Matrix& vt);

enum class EigenMethod {
  automatic,          ///< full QL for small problems, inverse iteration for few vectors of large ones
  full_ql,            ///< every eigenvector by QL accumulation
  inverse_iteration,  ///< all eigenvalues, then only the requested vectors
};

/// Largest eigenpairs of a symmetric matrix, eigenvalues descending.
/// Row k of `vectors` is the unit eigenvector for values[k].
struct EigenPairs {
  std::vector<double> values;
  Matrix vectors;
};

/// Reads only the lower triangle of `a`. Throws NumericalError when QL fails
/// to converge.
EigenPairs largest_eigenpairs(Matrix a, std::size_t count, EigenMethod method = EigenMethod::automatic);

}  // namespace scsc::linalg
