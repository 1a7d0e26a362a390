#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <ostream>
#include <span>

namespace transmission {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using SpMat = Eigen::SparseMatrix<double>;

inline std::span<const double> view(const Vec& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}
inline std::span<double> view(Vec& v) { return {v.data(), static_cast<std::size_t>(v.size())}; }

SpMat diagonal_matrix(const Vec& d);

// Max |a_ij - a_ji|; 0 means exactly symmetric.
double asymmetry(const SpMat& a);

struct SymmetricEigen {
  Vec values;   // ascending
  Mat vectors;  // orthonormal columns
};

// Lowest `count` eigenpairs of a dense symmetric matrix (count < 0: all).
// Only the lower triangle of `s` is referenced.
SymmetricEigen symmetric_eigen(Mat s, int count = -1);

// Generalized problem A v = lambda diag(mass) v with positive diagonal mass.
// Eigenvectors are mass-orthonormal.
SymmetricEigen generalized_eigen_diag(const SpMat& a, const Vec& mass, int count = -1);

// Sorted "row col value" lines, one per stored nonzero.
void write_triplets(std::ostream& out, const SpMat& a);

}  // namespace transmission
