#include "transmission/constants.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include <fmt/format.h>

#include "transmission/errors.hpp"
#include "transmission/kernels/kernels.hpp"
#include "transmission/linalg.hpp"
#include "transmission/operators.hpp"

namespace transmission {

namespace {

struct TriangleGrad {
  std::array<int, 3> v;
  std::array<double, 3> gx, gy;
  double area;
};

std::vector<TriangleGrad> triangle_gradients(const MeshedDomain& mesh) {
  std::vector<TriangleGrad> out;
  out.reserve(mesh.triangles.size());
  for (const auto& tri : mesh.triangles) {
    const Point p0 = mesh.vertices[tri[0]], p1 = mesh.vertices[tri[1]], p2 = mesh.vertices[tri[2]];
    const double det = (p1.x - p0.x) * (p2.y - p0.y) - (p2.x - p0.x) * (p1.y - p0.y);
    out.push_back({tri,
                   {(p1.y - p2.y) / det, (p2.y - p0.y) / det, (p0.y - p1.y) / det},
                   {(p2.x - p1.x) / det, (p0.x - p2.x) / det, (p1.x - p0.x) / det},
                   0.5 * std::abs(det)});
  }
  return out;
}

Vec sigma_weights(const MeshedDomain& mesh, const InterfaceMeasure& measure) {
  Vec w = Vec::Zero(mesh.num_vertices());
  for (std::size_t i = 0; i < measure.size(); ++i) w[measure.nodes[i]] += measure.weights[i];
  return w;
}

double poincare_l2(const MeshedDomain& mesh, const InterfaceMeasure& measure) {
  const auto bulk = assemble_bulk(mesh, DiffusionTensor::isotropic(mesh.triangles.size()));
  const Vec w = sigma_weights(mesh, measure);
  const Vec m = bulk.lumped_mass;
  const Vec isq = m.cwiseSqrt().cwiseInverse();
  // z = M^{1/2} u; the constraint w.u = 0 becomes a.z = 0.
  Mat S = isq.asDiagonal() * Mat(bulk.stiffness) * isq.asDiagonal();
  const Vec a = (isq.array() * w.array()).matrix().normalized();
  // P S P with P = I - a a^T; a itself becomes a zero mode, constants are
  // not in the constrained subspace so the next eigenvalue is the answer.
  const Vec Sa = S * a;
  const double aSa = a.dot(Sa);
  S -= a * Sa.transpose() + Sa * a.transpose();
  S += aSa * a * a.transpose();
  const auto eig = symmetric_eigen(std::move(S), 2);
  const double lambda = eig.values[1];
  if (!(lambda > 0.0)) throw NumericError(fmt::format("Poincare eigenvalue {} not positive", lambda));
  return 1.0 / std::sqrt(lambda);
}

struct L1Quotient {
  const std::vector<TriangleGrad>& tris;
  const Vec& m;
  const Vec& w;
  double W;

  double mean(const Vec& u) const { return w.dot(u) / W; }

  double value(const Vec& u, Vec* grad) const {
    const double c = mean(u);
    double num = 0.0;
    Vec gnum;
    if (grad) gnum = Vec::Zero(u.size());
    double sgn_mass = 0.0;
    for (Eigen::Index i = 0; i < u.size(); ++i) {
      const double d = u[i] - c;
      num += m[i] * std::abs(d);
      if (grad) {
        const double s = (d > 0) - (d < 0);
        gnum[i] = m[i] * s;
        sgn_mass += m[i] * s;
      }
    }
    double den = 0.0;
    Vec gden;
    if (grad) gden = Vec::Zero(u.size());
    for (const auto& t : tris) {
      double gx = 0.0, gy = 0.0;
      for (int a = 0; a < 3; ++a) {
        gx += u[t.v[a]] * t.gx[a];
        gy += u[t.v[a]] * t.gy[a];
      }
      const double nrm = std::hypot(gx, gy);
      den += t.area * nrm;
      if (grad && nrm > 0.0)
        for (int a = 0; a < 3; ++a) gden[t.v[a]] += t.area * (gx * t.gx[a] + gy * t.gy[a]) / nrm;
    }
    if (!(den > 0.0)) return 0.0;
    if (grad) {
      gnum -= (w / W) * sgn_mass;
      *grad = gnum / den - (num / (den * den)) * gden;
    }
    return num / den;
  }
};

PoincareEstimate poincare_l1(const MeshedDomain& mesh, const InterfaceMeasure& measure,
                             const PoincareOptions& opt) {
  const auto tris = triangle_gradients(mesh);
  const auto bulk = assemble_bulk(mesh, DiffusionTensor::isotropic(mesh.triangles.size()));
  const Vec w = sigma_weights(mesh, measure);
  const L1Quotient q{tris, bulk.lumped_mass, w, w.sum()};
  std::mt19937_64 rng(opt.seed);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  PoincareEstimate est;
  const int nv = mesh.num_vertices();
  for (int s = 0; s < opt.starts; ++s) {
    // Smooth random start: a few low Fourier modes.
    double coef[4][4];
    for (auto& row : coef)
      for (auto& c : row) c = U(rng);
    Vec u(nv);
    for (int v = 0; v < nv; ++v) {
      const Point p = mesh.vertices[v];
      double val = 0.0;
      for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b)
          val += coef[a][b] * std::cos(M_PI * a * p.x) * std::cos(M_PI * b * p.y) / (1 + a + b);
      u[v] = val;
    }
    auto project = [&](Vec& x) {
      x.array() -= q.mean(x);
      const double n = x.norm();
      if (n > 0.0) x /= n;
    };
    project(u);
    Vec g;
    double best = q.value(u, &g);
    double step = 0.5;
    int k = 0;
    bool improving = false;
    for (; k < opt.iterations; ++k) {
      const double gn = g.norm();
      if (!(gn > 0.0)) break;
      Vec trial = u + (step / std::sqrt(1.0 + k)) * g / gn;
      project(trial);
      Vec gt;
      const double val = q.value(trial, &gt);
      improving = val > best;
      if (improving) {
        best = val;
        u = std::move(trial);
        g = std::move(gt);
      } else {
        step *= 0.5;
        if (step < 1e-8) break;
      }
    }
    est.iterations += k;
    est.capped = est.capped || (k == opt.iterations && improving);
    est.value = std::max(est.value, best);
  }
  return est;
}

double x2_sq(const DiscreteOperator& op, const Vec& u) {
  const Vec m = op.full_mass();
  return kernels::weighted_sq_norm(view(m), view(u));
}

double x1(const DiscreteOperator& op, const Vec& u) {
  const Vec m = op.full_mass();
  return kernels::weighted_abs_sum(view(m), view(u));
}

}  // namespace

PoincareEstimate poincare_mean_sigma(const MeshedDomain& mesh, const InterfaceMeasure& measure,
                                     PoincareMode mode, const PoincareOptions& options) {
  if (measure.size() == 0 || !(measure.total_mass > 0.0))
    throw ValidationError("Poincare constant needs an interface measure");
  if (mode == PoincareMode::L2_eig) return {poincare_l2(mesh, measure), 0, false};
  return poincare_l1(mesh, measure, options);
}

double best_embedding_constant(const DiscreteOperator& op, double eps, double d0) {
  if (!(eps > 0.0 && eps < d0))
    throw ValidationError(fmt::format("embedding constant needs 0 < eps < d0 (eps={}, d0={})", eps, d0));
  const SpMat form = (1.0 - eps / d0) * op.K_stiff + op.B_beta + op.Theta;
  return spectrum_with_mass(form, op.full_mass(), 1).eigenvalues[0];
}

double embedding_lambda1(const DiscreteOperator& op) {
  return spectrum_with_mass(op.A, op.full_mass(), 1).eigenvalues[0];
}

std::vector<Vec> zeta_samples(const DiscreteOperator& op, int trials, std::uint64_t seed) {
  std::vector<Vec> samples;
  const Vec m = op.full_mass();
  const ShiftedSolver smooth(op.A, m, 0.01);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> N;
  for (int t = 0; t < trials; ++t) {
    Vec r(op.size());
    for (auto& x : r) x = N(rng);
    r = smooth.solve(m.cwiseProduct(r));
    r = smooth.solve(m.cwiseProduct(r));
    samples.push_back(r);
  }
  const auto spec = spectrum(op, std::min<int>(10, static_cast<int>(op.size())));
  for (int k = 0; k < spec.count(); ++k) samples.push_back(spec.eigenvectors.col(k));
  return samples;
}

bool zeta_feasible(const DiscreteOperator& op, double eps, double zeta, const std::vector<Vec>& samples) {
  const double factor = std::pow(eps, -zeta);
  for (const auto& u : samples) {
    const double lhs = x2_sq(op, u);
    const double n1 = x1(op, u);
    const double rhs = eps * quadratic_form(op, u, u) + factor * n1 * n1;
    if (lhs > rhs * (1.0 + 1e-12)) return false;
  }
  return true;
}

ZetaResult interpolation_zeta_on(const DiscreteOperator& op, double eps, const std::vector<Vec>& samples) {
  if (!(eps > 0.0 && eps <= 1.0))
    throw ValidationError(fmt::format("zeta search needs eps in (0,1], got {}", eps));
  ZetaResult res;
  res.samples = static_cast<int>(samples.size());
  // Per-sample requirement, used to name the worst sample.
  double worst = -1.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double excess = x2_sq(op, samples[i]) - eps * quadratic_form(op, samples[i], samples[i]);
    const double n1 = x1(op, samples[i]);
    double need = 0.0;
    if (excess > 0.0) need = eps < 1.0 ? std::log(excess / (n1 * n1)) / -std::log(eps) : HUGE_VAL;
    if (need > worst) {
      worst = need;
      res.worst_sample = static_cast<int>(i);
    }
  }
  if (zeta_feasible(op, eps, 0.0, samples)) return res;
  if (eps == 1.0 || !zeta_feasible(op, eps, kZetaMax, samples)) {
    res.unbounded = true;
    res.zeta = kZetaMax;
    return res;
  }
  double lo = 0.0, hi = kZetaMax;
  while (hi - lo > 1e-10 * std::max(1.0, hi)) {
    const double mid = 0.5 * (lo + hi);
    (zeta_feasible(op, eps, mid, samples) ? hi : lo) = mid;
  }
  res.zeta = hi;
  return res;
}

ZetaResult interpolation_zeta(const DiscreteOperator& op, double eps, int trials, std::uint64_t seed) {
  return interpolation_zeta_on(op, eps, zeta_samples(op, trials, seed));
}

double bulk_shifted_lambda1(const DiscreteOperator& op, double theta) {
  if (!(theta >= 0.0)) throw ValidationError(fmt::format("bulk shift theta={} must be >= 0", theta));
  SpMat shifted = op.A;
  for (Eigen::Index i = 0; i < op.bulk_mass.size(); ++i) shifted.coeffRef(i, i) += theta * op.bulk_mass[i];
  return spectrum_with_mass(shifted, op.full_mass(), 1).eigenvalues[0];
}

ConstantsReport compute_constants(const MeshedDomain& mesh, const InterfaceMeasure& measure,
                                  const DiscreteOperator& op, double d0, const ConstantsOptions& options) {
  ConstantsReport r;
  r.C_sigma_omega_L2 = poincare_mean_sigma(mesh, measure, PoincareMode::L2_eig).value;
  r.C_sigma_omega_L1_lower =
      poincare_mean_sigma(mesh, measure, PoincareMode::L1_empirical, options.poincare).value;
  r.safety_factor = options.safety_factor;
  r.C_sigma_omega = r.safety_factor * std::max(r.C_sigma_omega_L2, r.C_sigma_omega_L1_lower);
  r.total_mass = measure.total_mass;
  r.domain_area = mesh.domain_area;
  r.C_star = r.C_sigma_omega * r.total_mass / r.domain_area;
  r.d0 = d0;
  r.eps = options.eps_fraction * d0;
  r.C_bar = best_embedding_constant(op, r.eps, d0);
  r.lambda1 = embedding_lambda1(op);
  for (double f : options.eps_table_fractions)
    r.C_bar_table.emplace_back(f * d0, best_embedding_constant(op, f * d0, d0));
  const auto samples = zeta_samples(op, options.zeta_trials, options.poincare.seed);
  for (double e : options.zeta_eps) {
    const auto z = interpolation_zeta_on(op, e, samples);
    r.zeta_table.emplace_back(e, z.unbounded ? -1.0 : z.zeta);
  }
  r.bulk_shift_table.emplace_back(0.0, r.lambda1);
  for (int k = 0; k <= 32; ++k) {
    const double theta = 1e-3 * std::pow(10.0, k * 0.25);
    r.bulk_shift_table.emplace_back(theta, bulk_shifted_lambda1(op, theta));
  }
  return r;
}

std::string ConstantsReport::serialize() const {
  std::string s;
  auto kv = [&](const std::string& k, double v) { s += fmt::format("{}={:.17g}\n", k, v); };
  kv("C_sigma_omega_L2", C_sigma_omega_L2);
  kv("C_sigma_omega_L1_lower", C_sigma_omega_L1_lower);
  kv("safety_factor", safety_factor);
  kv("C_sigma_omega", C_sigma_omega);
  kv("C_star", C_star);
  kv("total_mass", total_mass);
  kv("domain_area", domain_area);
  kv("d0", d0);
  kv("eps", eps);
  kv("C_bar", C_bar);
  kv("lambda1", lambda1);
  for (const auto& [e, c] : C_bar_table) s += fmt::format("C_bar_table={:.17g},{:.17g}\n", e, c);
  for (const auto& [e, z] : zeta_table) s += fmt::format("zeta_table={:.17g},{:.17g}\n", e, z);
  for (const auto& [t, l] : bulk_shift_table) s += fmt::format("bulk_shift_table={:.17g},{:.17g}\n", t, l);
  return s;
}

ConstantsReport ConstantsReport::parse(const std::string& text) {
  ConstantsReport r;
  r.C_bar_table.clear();
  r.zeta_table.clear();
  r.bulk_shift_table.clear();
  std::istringstream in(text);
  std::string line;
  std::vector<std::string> problems;
  const std::map<std::string, double ConstantsReport::*> scalars{
      {"C_sigma_omega_L2", &ConstantsReport::C_sigma_omega_L2},
      {"C_sigma_omega_L1_lower", &ConstantsReport::C_sigma_omega_L1_lower},
      {"safety_factor", &ConstantsReport::safety_factor},
      {"C_sigma_omega", &ConstantsReport::C_sigma_omega},
      {"C_star", &ConstantsReport::C_star},
      {"total_mass", &ConstantsReport::total_mass},
      {"domain_area", &ConstantsReport::domain_area},
      {"d0", &ConstantsReport::d0},
      {"eps", &ConstantsReport::eps},
      {"C_bar", &ConstantsReport::C_bar},
      {"lambda1", &ConstantsReport::lambda1}};
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      problems.push_back("malformed line: " + line);
      continue;
    }
    const std::string key = line.substr(0, eq), val = line.substr(eq + 1);
    try {
      if (auto it = scalars.find(key); it != scalars.end()) {
        r.*(it->second) = std::stod(val);
      } else if (key == "C_bar_table" || key == "zeta_table" || key == "bulk_shift_table") {
        const auto comma = val.find(',');
        if (comma == std::string::npos) throw std::invalid_argument(val);
        auto& table = key == "C_bar_table" ? r.C_bar_table : key == "zeta_table" ? r.zeta_table : r.bulk_shift_table;
        table.emplace_back(std::stod(val.substr(0, comma)), std::stod(val.substr(comma + 1)));
      } else {
        problems.push_back("unknown key: " + key);
      }
    } catch (const std::exception&) {
      problems.push_back(fmt::format("bad value for {}: {}", key, val));
    }
  }
  if (!problems.empty()) throw ConfigError(problems);
  return r;
}

}  // namespace transmission
