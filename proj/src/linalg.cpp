#include "transmission/linalg.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <tuple>
#include <vector>

#include <fmt/format.h>

#include "transmission/errors.hpp"

namespace transmission {

SpMat diagonal_matrix(const Vec& d) {
  SpMat m(d.size(), d.size());
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(d.size());
  for (Eigen::Index i = 0; i < d.size(); ++i) t.emplace_back(i, i, d[i]);
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

double asymmetry(const SpMat& a) {
  const SpMat at = a.transpose();
  const SpMat diff = a - at;
  double m = 0.0;
  for (int k = 0; k < diff.outerSize(); ++k)
    for (SpMat::InnerIterator it(diff, k); it; ++it) m = std::max(m, std::abs(it.value()));
  return m;
}

SymmetricEigen symmetric_eigen(Mat s, int count) {
  const lapack_int n = static_cast<lapack_int>(s.rows());
  if (s.cols() != n) throw NumericError("symmetric_eigen: matrix is not square");
  SymmetricEigen out;
  if (n == 0) return out;
  const lapack_int want = (count < 0 || count > n) ? n : count;
  lapack_int found = 0;
  Vec w(n);
  Mat z(n, std::max<lapack_int>(want, 1));
  std::vector<lapack_int> isuppz(2 * static_cast<std::size_t>(n));
  const char range = (want == n) ? 'A' : 'I';
  // Column-major storage: Eigen's default layout.
  const lapack_int info =
      LAPACKE_dsyevr(LAPACK_COL_MAJOR, 'V', range, 'L', n, s.data(), n, 0.0, 0.0, 1, want, 0.0,
                     &found, w.data(), z.data(), n, isuppz.data());
  if (info != 0) throw NumericError(fmt::format("dsyevr failed with info={}", info));
  out.values = w.head(found);
  out.vectors = z.leftCols(found);
  return out;
}

SymmetricEigen generalized_eigen_diag(const SpMat& a, const Vec& mass, int count) {
  if (mass.minCoeff() <= 0.0) throw NumericError("generalized_eigen_diag: nonpositive mass");
  const Vec inv_sqrt = mass.cwiseSqrt().cwiseInverse();
  Mat s = Mat(a);
  s = inv_sqrt.asDiagonal() * s * inv_sqrt.asDiagonal();
  SymmetricEigen e = symmetric_eigen(std::move(s), count);
  e.vectors = inv_sqrt.asDiagonal() * e.vectors;
  return e;
}

void write_triplets(std::ostream& out, const SpMat& a) {
  std::vector<std::tuple<Eigen::Index, Eigen::Index, double>> entries;
  entries.reserve(a.nonZeros());
  for (int k = 0; k < a.outerSize(); ++k)
    for (SpMat::InnerIterator it(a, k); it; ++it) entries.emplace_back(it.row(), it.col(), it.value());
  std::sort(entries.begin(), entries.end(), [](const auto& l, const auto& r) {
    return std::tie(std::get<0>(l), std::get<1>(l)) < std::tie(std::get<0>(r), std::get<1>(r));
  });
  for (const auto& [r, c, v] : entries) out << fmt::format("{} {} {:.17g}\n", r, c, v);
}

}  // namespace transmission
