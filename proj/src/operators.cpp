#include "transmission/operators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <fmt/format.h>

#include "transmission/errors.hpp"
#include "transmission/kernels/kernels.hpp"

namespace transmission {

double quadratic_form(const DiscreteOperator& op, const Vec& U, const Vec& V) {
  if (U.size() != op.size() || V.size() != op.size())
    throw ValidationError(fmt::format("quadratic_form: vectors of size {} and {} for {} DOFs",
                                      U.size(), V.size(), op.size()));
  const Vec AU = op.A * U;
  return kernels::dot(view(V), view(AU));
}

SpectralData spectrum_with_mass(const SpMat& A, const Vec& mass, int count) {
  const auto n = A.rows();
  if (count > n)
    throw ValidationError(fmt::format("requested {} eigenpairs for {} DOFs", count, n));
  SymmetricEigen e = generalized_eigen_diag(A, mass, count);
  SpectralData spec;
  spec.eigenvalues = std::move(e.values);
  spec.eigenvectors = std::move(e.vectors);
  spec.mass = mass;
  spec.complete = (spec.eigenvalues.size() == n);

  const double scale = std::max(1.0, spec.eigenvalues.cwiseAbs().maxCoeff());
  for (int k = 0; k < spec.count(); ++k) {
    const Vec v = spec.eigenvectors.col(k);
    const double res =
        (A * v - spec.eigenvalues[k] * mass.cwiseProduct(v)).norm() / std::max(v.norm(), 1e-300);
    if (res > 1e-8 * scale)
      throw NumericError(fmt::format("eigenpair {} residual {} exceeds tolerance", k, res));
  }
  return spec;
}

SpectralData spectrum(const DiscreteOperator& op, int count) {
  return spectrum_with_mass(op.A, op.mass(), count);
}

SemigroupResult semigroup_apply(const SpectralData& spec, double t, const Vec& F) {
  if (t < 0.0) throw ValidationError("semigroup_apply: negative time");
  const Vec MF = spec.mass.cwiseProduct(F);
  const Vec coeff = spec.eigenvectors.transpose() * MF;
  SemigroupResult out;
  const Vec decayed = coeff.cwiseProduct((-t * spec.eigenvalues).array().exp().matrix());
  out.state = spec.eigenvectors * decayed;
  if (!spec.complete) {
    const Vec rest = F - spec.eigenvectors * coeff;
    out.truncation_residual = std::sqrt(kernels::weighted_sq_norm(view(spec.mass), view(rest)));
  }
  return out;
}

ShiftedSolver::ShiftedSolver(const SpMat& A, const Vec& mass, double dt) : dt_(dt) {
  if (!(dt > 0.0)) throw ValidationError("time step must be positive");
  SpMat lhs = dt * A;
  lhs += diagonal_matrix(mass);
  ldlt_.compute(lhs);
  if (ldlt_.info() != Eigen::Success) throw NumericError("factorization of M + dt A failed");
}

Vec ShiftedSolver::solve(const Vec& rhs) const {
  Vec x = ldlt_.solve(rhs);
  if (ldlt_.info() != Eigen::Success || !x.allFinite())
    throw NumericError("linear solve with M + dt A failed");
  return x;
}

namespace {

void march(const DiscreteOperator& op, const Vec& u0, std::span<const double> t_grid,
           MarkovReport& report) {
  const Vec mass = op.mass();
  Vec u = u0;
  report.min_entry = std::min(report.min_entry, u.minCoeff());
  for (std::size_t k = 1; k < t_grid.size(); ++k) {
    const double dt = t_grid[k] - t_grid[k - 1];
    const ShiftedSolver solver(op.A, mass, dt);
    const Vec next = solver.solve(mass.cwiseProduct(u));
    const double before = kernels::max_abs(view(u));
    const double after = kernels::max_abs(view(next));
    if (before > 0.0) report.sup_ratio = std::max(report.sup_ratio, after / before);
    report.min_entry = std::min(report.min_entry, next.minCoeff());
    ++report.steps;
    u = next;
  }
}

}  // namespace

MarkovReport markov_check(const DiscreteOperator& op, int trials, std::span<const double> t_grid,
                          std::uint64_t seed) {
  MarkovReport report;
  report.min_entry = std::numeric_limits<double>::infinity();
  // Distinct dt values are few; refactoring per step keeps the routine simple.
  for (int trial = 0; trial < trials; ++trial) {
    std::mt19937_64 rng(seed + static_cast<std::uint64_t>(trial));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    Vec u0(op.size());
    for (auto& x : u0) x = unit(rng);
    march(op, u0, t_grid, report);
  }
  return report;
}

MarkovReport markov_check_from(const DiscreteOperator& op, const Vec& u0,
                               std::span<const double> t_grid) {
  MarkovReport report;
  report.min_entry = std::numeric_limits<double>::infinity();
  march(op, u0, t_grid, report);
  return report;
}

double ultracontractivity_gamma(double d, int N) { return 2.0 * d / (d - N + 2.0); }

double semigroup_norm_2_to_inf(const SpectralData& spec, double t) {
  const Vec decay = (-2.0 * t * spec.eigenvalues).array().exp().matrix();
  const Vec row_sq = spec.eigenvectors.cwiseAbs2() * decay;
  return std::sqrt(row_sq.maxCoeff());
}

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  LineFit fit;
  if (n < 2) return fit;
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  fit.slope = sxx > 0 ? sxy / sxx : 0.0;
  fit.intercept = my - fit.slope * mx;
  fit.r_squared = (sxx > 0 && syy > 0) ? (sxy * sxy) / (sxx * syy) : 1.0;
  return fit;
}

UltracontractivityFit ultracontractivity_fit(const SpectralData& spec, std::span<const double> t_grid,
                                             double dim_d, int N) {
  if (t_grid.size() < 3) throw ValidationError("ultracontractivity fit needs at least 3 times");
  UltracontractivityFit out;
  out.gamma = ultracontractivity_gamma(dim_d, N);
  out.target_slope = -out.gamma / 4.0;
  const double lmin = spec.eigenvalues[0];
  const double lmax = spec.eigenvalues[spec.count() - 1];
  out.flat_scale = lmax > 0 ? 1.0 / lmax : 0.0;
  out.exponential_scale = lmin > 0 ? 1.0 / lmin : std::numeric_limits<double>::infinity();
  std::vector<double> lx, ly;
  for (double t : t_grid) {
    if (!(t > 0.0)) throw ValidationError("ultracontractivity fit needs t > 0");
    const double nrm = semigroup_norm_2_to_inf(spec, t);
    out.t.push_back(t);
    out.norm_2_to_inf.push_back(nrm);
    lx.push_back(std::log(t));
    ly.push_back(std::log(nrm));
    if (t < out.flat_scale) out.flat_regime = true;
    if (t > out.exponential_scale) out.exponential_regime = true;
  }
  const LineFit fit = fit_line(lx, ly);
  out.slope = fit.slope;
  out.log_constant = fit.intercept;
  out.r_squared = fit.r_squared;
  return out;
}

}  // namespace transmission
