#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace pmpo {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using SparseCMatrix = Eigen::SparseMatrix<cplx>;
using Triplet = Eigen::Triplet<cplx>;

/// Malformed input: unreadable documents, inconsistent graphs, invalid cells.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A numerical contract was violated (unitarity lost, no spectral gap, ...).
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Singular-value cut.  A singular value counts when it exceeds
/// `relative * max(1, s_max)` (floor_at_one) or `relative * s_max`.
struct RankCut {
  double relative = 1e-8;
  bool floor_at_one = true;

  double threshold(double s_max) const {
    return relative * (floor_at_one ? std::max(1.0, s_max) : s_max);
  }
};

Eigen::VectorXd singular_values(const CMatrix& a);
std::size_t numerical_rank(const CMatrix& a, RankCut cut = {});

/// Orthonormal basis (columns) of the kernel of `a`.
CMatrix null_space(const CMatrix& a, RankCut cut = {});

/// Rank of a sparse matrix.  The matrix is split into the connected
/// components of its row/column incidence graph and each block is reduced
/// densely; the cut uses the global largest singular value.
std::size_t sparse_rank(const SparseCMatrix& a, RankCut cut = {});

/// Kernel of a sparse matrix, block by block.  Columns of the result are
/// orthonormal and supported on a single component each.
SparseCMatrix sparse_null_space(const SparseCMatrix& a, RankCut cut = {});

/// Largest entry modulus; 0 for an empty matrix.
double max_abs(const SparseCMatrix& a);
double max_abs(const CMatrix& a);

/// Drops stored entries with modulus <= cutoff.
SparseCMatrix pruned(const SparseCMatrix& a, double cutoff);

}  // namespace pmpo
