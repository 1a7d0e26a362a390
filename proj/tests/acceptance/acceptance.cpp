// Acceptance suite: one PASS/FAIL line per criterion. `acceptance 3 6` runs a
// subset. Exit status is nonzero when any selected criterion fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "transmission/assembly.hpp"
#include "transmission/config.hpp"
#include "transmission/constants.hpp"
#include "transmission/diagnostics.hpp"
#include "transmission/dynamics.hpp"
#include "transmission/geometry.hpp"
#include "transmission/io.hpp"
#include "transmission/operators.hpp"
#include "transmission/regimes.hpp"
#include "transmission/runner.hpp"

using namespace transmission;
namespace fs = std::filesystem;

namespace {

// Frozen blow-up time for criterion 6 (n = 16, U0 = c phi_1, default step
// control). Regenerate only on an intentional change of the integrator.
constexpr double kBlowUpTimeBaseline = 0.0440096;

struct Result {
  bool pass = true;
  std::vector<std::string> details;

  void check(bool ok, std::string what) {
    if (!ok) pass = false;
    details.push_back((ok ? "" : "!") + std::move(what));
  }
};

struct Problem16 {
  MeshedDomain mesh;
  InterfaceMeasure measure;
  DiscreteOperator full, op;
};

Problem16 segment(int n, DirichletSides sides = {}, double beta = 1.0) {
  Problem16 p;
  const auto spec = InterfaceSpec::segment(0.5);
  p.mesh = build_square_mesh(n, spec, sides);
  p.measure = build_interface_measure(p.mesh, spec);
  KernelSpec k;
  k.d = p.measure.dim_d;
  p.full = assemble_operator(p.mesh, p.measure, DiffusionTensor::isotropic(p.mesh.triangles.size()),
                             BetaCoefficient::uniform(p.measure.size(), beta, beta), k, {});
  p.op = apply_dirichlet(p.full, p.mesh);
  return p;
}

Nonlinearity pw(double c, double q) { return Nonlinearity::power(c, q); }
Nonlinearity affine(double a, double b) {
  return Nonlinearity(PowerSeries::odd_power(a, 0.0) + PowerSeries::constant(b));
}

Vec phi1(const DiscreteOperator& op) {
  Vec v = spectrum(op, 1).eigenvectors.col(0);
  if (v.sum() < 0.0) v = -v;
  return v / v.cwiseAbs().maxCoeff();
}

double asym(const SpMat& m) { return SpMat(m - SpMat(m.transpose())).norm(); }

ConstantsReport constants(const Problem16& p) {
  return compute_constants(p.mesh, p.measure, p.op, 1.0);
}

RegimeContext context(const Problem16& p, const ConstantsReport& k, const Vec& U, const Nonlinearity& f,
                      const Nonlinearity& h) {
  return RegimeContext::from(k, energy(p.op, U, f, h).total, e1(p.op, U));
}

Vec smooth_datum(const DiscreteOperator& op, double amplitude) {
  const auto spec = spectrum(op, 3);
  Vec u = spec.eigenvectors.leftCols(3) * Eigen::Vector3d(1.0, 0.5, -0.25);
  return u * (amplitude / u.cwiseAbs().maxCoeff());
}

// ---------------------------------------------------------------------------

Result operator_structure() {
  Result r;
  for (auto sides : {DirichletSides{}, DirichletSides::none()}) {
    const auto p = segment(32, sides);
    const Vec one = Vec::Ones(p.full.size());
    const double th = (p.full.Theta * one).cwiseAbs().maxCoeff();
    const double ks = (p.full.K_stiff * one).cwiseAbs().maxCoeff();
    r.check(th <= 1e-12 && ks <= 1e-12, fmt::format("|Theta 1| {:.1e}, |K 1| {:.1e}", th, ks));
    double a = 0.0;
    for (const auto* o : {&p.full, &p.op})
      for (const SpMat* m : {&o->K_stiff, &o->B_beta, &o->Theta, &o->A}) a = std::max(a, asym(*m));
    r.check(a == 0.0, fmt::format("asymmetry {:.1e}", a));
    const auto s = spectrum(p.op, 1);
    const Vec v = s.eigenvectors.col(0);
    const Vec res = p.op.A * v - s.eigenvalues[0] * p.op.mass().cwiseProduct(v);
    const double rel = res.norm() / (s.eigenvalues[0] * p.op.mass().cwiseProduct(v).norm());
    r.check(s.eigenvalues[0] > 0.0 && rel <= 1e-8,
            fmt::format("{}: lambda1 {:.6g}, residual {:.1e}", sides.empty() ? "no Gamma_D" : "Gamma_D left",
                        s.eigenvalues[0], rel));
  }
  return r;
}

Result hand_oracle() {
  Result r;
  InterfaceMeasure mu;
  mu.nodes = {0, 1};
  mu.node_positions = {{0.25, 0.5}, {0.75, 0.5}};
  mu.weights = {0.5, 0.5};
  mu.dim_d = 1.0;
  mu.total_mass = 1.0;
  KernelSpec k;
  k.s = 0.5;
  k.d = 1.0;
  const SpMat theta = assemble_nonlocal(2, mu, k);
  const Vec u = (Vec(2) << 1.0, 0.0).finished();
  const double q = u.dot(theta * u);
  r.check(std::abs(q - 2.0) <= 1e-12, fmt::format("form {:.15g}", q));
  return r;
}

Result markov() {
  Result r;
  const auto p = segment(32);
  std::vector<double> t{0.0};
  for (int k = 1; k <= 20; ++k) t.push_back(t.back() + 1e-3 * std::pow(1.3, k));
  const auto m = markov_check(p.op, 100, t, 7);
  r.check(m.min_entry >= -1e-10, fmt::format("min entry {:.2e}", m.min_entry));
  r.check(m.sup_ratio <= 1.0 + 1e-10, fmt::format("sup ratio {:.15g}", m.sup_ratio));
  r.details.push_back(fmt::format("{} steps", m.steps));
  return r;
}

Result semigroup() {
  Result r;
  const auto p = segment(16);
  const auto s = spectrum(p.op);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  Vec F(p.op.size());
  for (auto& x : F) x = U(rng);
  const Vec a = semigroup_apply(s, 0.2, F).state;
  const Vec b = semigroup_apply(s, 0.1, semigroup_apply(s, 0.1, F).state).state;
  const double d = (a - b).norm() / F.norm();
  r.check(d <= 1e-8, fmt::format("linear defect {:.1e}", d));
  const auto ctrl = StepControl::fixed(0.01);
  double worst = 0.0;
  for (auto [t, s0] : {std::pair{0.1, 0.1}, {0.3, 0.2}, {0.07, 0.13}})
    worst = std::max(worst, semigroup_defect_imex(p.op, F, pw(1, 2), pw(-1, 0), t, s0, ctrl).defect);
  r.check(worst == 0.0, fmt::format("IMEX replay defect {:.1e}", worst));
  return r;
}

Result energy_inequality() {
  Result r;
  const auto p = segment(32);
  const auto f = pw(1, 2), h = pw(-1, 0);
  const Vec u = phi1(p.op);
  const auto base = energy_inequality_residual(integrate(p.op, u, f, h, 1.0, StepControl::fixed(1e-3)), p.op, f, h);
  const double tol = 1e-6 * (1.0 + std::abs(base.e0));
  r.check(base.max_residual <= tol,
          fmt::format("|U0|=1: residual {:.2e} vs tol {:.2e}", base.max_residual, tol));
  // At |U0| = 1 the residual is not positive at all, so the refinement ratio
  // is measured where the explicit nonlinear term leaves a positive one.
  const Vec u2 = 2.0 * u;
  const auto a = energy_inequality_residual(integrate(p.op, u2, f, h, 1.0, StepControl::fixed(1e-3)), p.op, f, h);
  const auto b = energy_inequality_residual(integrate(p.op, u2, f, h, 1.0, StepControl::fixed(5e-4)), p.op, f, h);
  const double ratio = b.max_positive > 0.0 ? a.max_positive / b.max_positive : HUGE_VAL;
  r.check(a.max_positive > 0.0 && ratio >= 1.5,
          fmt::format("|U0|=2: positive residual {:.2e} -> {:.2e}, ratio {:.3f}", a.max_positive, b.max_positive, ratio));
  return r;
}

Result dichotomy() {
  Result r;
  const auto p = segment(16);
  const auto k = constants(p);
  const Vec u = phi1(p.op);
  {
    const auto f = pw(1, 2), h = pw(1, 0);
    const Vec U0 = 10.0 * u;
    const auto v = classify(f, h, context(p, k, U0, f, h));
    r.check(v.verdict == Verdict::GlobalBounded, fmt::format("(u^3, u): {} via {}", to_string(v.verdict), v.rule_fired));
    StepControl c;
    c.dt_max = 0.02;
    const auto tr = integrate(p.op, U0, f, h, 5.0, c);
    double first = 0.0, all = 0.0;
    for (std::size_t i = 0; i < tr.size(); ++i) {
      all = std::max(all, tr.sup_norm[i]);
      if (tr.t[i] <= 1.0) first = std::max(first, tr.sup_norm[i]);
    }
    r.check(tr.outcome == Outcome::Completed && all < 10.0 * first,
            fmt::format("run {} to T=5, sup {:.4g} vs first-unit sup {:.4g}", to_string(tr.outcome), all, first));
  }
  {
    const auto f = pw(-1, 2), h = pw(-1, 0);
    double c = 0.0;
    for (double trial : {0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0})
      if (check_blowup(f, h, 3.0, context(p, k, trial * u, f, h)).fired) {
        c = trial;
        break;
      }
    r.check(c > 0.0, fmt::format("smallest certified multiple c = {}", c));
    if (c == 0.0) return r;
    const Vec U0 = c * u;
    const auto v = classify(f, h, context(p, k, U0, f, h));
    r.check(v.verdict == Verdict::BlowUpPredicted,
            fmt::format("(-u^3, -u): {} via {}, lhs {:.4g} > threshold {:.4g}", to_string(v.verdict), v.rule_fired,
                        v.lhs_value, v.threshold_value));
    const auto tr = integrate(p.op, U0, f, h, 10.0, StepControl{});
    r.check(tr.outcome == Outcome::BlowUp && std::isfinite(tr.outcome_time),
            fmt::format("run {} at t* = {:.6g}", to_string(tr.outcome), tr.outcome_time));
    const auto again = integrate(p.op, U0, f, h, 10.0, StepControl{});
    r.check(again.outcome_time == tr.outcome_time, "t* reproducible");
    if (kBlowUpTimeBaseline > 0.0)
      r.check(std::abs(tr.outcome_time / kBlowUpTimeBaseline - 1.0) <= 0.2,
              fmt::format("t* within 20% of pinned {:.6g}", kBlowUpTimeBaseline));
    else
      r.check(false, "no pinned t* baseline");
  }
  return r;
}

Result decay_rates() {
  Result r;
  const auto p = segment(16);
  const double l1 = spectrum(p.op, 1).eigenvalues[0];
  const Nonlinearity z = Nonlinearity::zero();
  const auto lin = integrate(p.op, smooth_datum(p.op, 1.0), z, z, 3.0, StepControl::fixed(1e-3));
  const double rate = decay_rate_fit(lin, p.op, 1.0, 3.0);
  r.check(std::abs(rate / (2.0 * l1) - 1.0) <= 0.2, fmt::format("linear rate {:.4g} vs 2 lambda1 {:.4g}", rate, 2 * l1));

  const auto k = constants(p);
  const auto f = pw(1, 2), h = affine(-1.0, -1.0);
  const auto v = classify(f, h, context(p, k, smooth_datum(p.op, 1.0), f, h));
  r.check(v.verdict == Verdict::GlobalBounded && v.certificate.count("lambda_star"),
          fmt::format("(u^3, -u-1): {} via {}", to_string(v.verdict), v.rule_fired));
  if (!v.certificate.count("lambda_star")) return r;
  const double ls = v.certificate.at("lambda_star");
  std::vector<Trajectory> trs;
  StepControl c;
  c.dt_max = 0.02;
  for (double a : {1.0, 10.0, 50.0}) trs.push_back(integrate(p.op, smooth_datum(p.op, a), f, h, 6.0, c));
  const auto fit = absorbing_ball_check(trs, p.op, k, ls, v.verdict);
  r.check(fit.rate_ok, fmt::format("eta {:.4g} vs 0.8*2(C_bar - lambda*) = {:.4g} (C_bar {:.4g}, lambda* {:.3g})",
                                   fit.eta_fit, fit.threshold, k.C_bar, ls));
  return r;
}

Result picard_vs_imex() {
  Result r;
  const auto p = segment(8);
  const auto spec = spectrum(p.op);
  const auto f = pw(1, 2), h = pw(1, 0);
  const Vec U0 = smooth_datum(p.op, 1.0);
  const double R = std::max(2.0 * U0.cwiseAbs().maxCoeff(), 1.0);
  const double Q = lipschitz_modulus(f, h, R);
  const double T = 0.5 / Q;
  const auto pic = picard_mild(p.op, spec, U0, f, h, T, 1024, 40);
  bool mono = !pic.diverged;
  for (std::size_t i = 0; i < pic.ratios.size(); ++i) {
    if (!(pic.ratios[i] < 1.0)) mono = false;
    if (i > 0 && pic.differences[i + 1] >= pic.differences[i]) mono = false;
  }
  const double last = pic.ratios.empty() ? 0.0 : pic.ratios.back();
  r.check(mono && T * pic.Q < 1.0, fmt::format("T* {:.4g}, T*Q {:.3f}, {} iterations, last ratio {:.3g}", T, T * pic.Q,
                                               pic.iterations, last));
  const Vec& ref = pic.final_iterate.back();
  std::vector<double> err;
  for (int steps : {8, 16, 32, 64}) {
    const auto tr = integrate(p.op, U0, f, h, T, StepControl::fixed(T / steps));
    err.push_back((tr.states.back() - ref).cwiseAbs().maxCoeff());
  }
  std::string ratios;
  bool ok = true;
  for (std::size_t i = 1; i < err.size(); ++i) {
    const double q = err[i - 1] / err[i];
    ratios += fmt::format("{}{:.3f}", i > 1 ? ", " : "", q);
    if (!(q >= 1.5 && q <= 2.5)) ok = false;
  }
  r.check(ok, fmt::format("|picard - imex| {:.2e} .. {:.2e}, halving ratios {}", err.front(), err.back(), ratios));
  return r;
}

Result squeezing() {
  Result r;
  const auto p = segment(16);
  const auto f = pw(1, 2), h = affine(1.0, 1.0);
  const Vec a = smooth_datum(p.op, 1.0);
  std::mt19937_64 rng(11);
  std::normal_distribution<double> N(0.0, 1.0);
  Vec d(a.size());
  for (auto& x : d) x = N(rng);
  d *= 1e-2 / x2_norm(p.op, d);
  StepControl c;
  c.dt_max = 0.02;
  const auto fit = squeezing_check(p.op, a, a + d, f, h, 10.0, c);
  r.check(fit.omega > 0.0 && fit.terminal_distance < 1e-3,
          fmt::format("omega {:.4g}, distance {:.2e} -> {:.2e}", fit.omega, fit.initial_distance, fit.terminal_distance));
  return r;
}

Result constants_consistency() {
  Result r;
  const auto p16 = segment(16), p32 = segment(32);
  const auto k = constants(p16);
  bool mono = true;
  std::string table;
  for (std::size_t i = 0; i < k.C_bar_table.size(); ++i) {
    table += fmt::format("{}{:.4g}", i ? ", " : "", k.C_bar_table[i].second);
    if (i > 0 && k.C_bar_table[i].second > k.C_bar_table[i - 1].second) mono = false;
  }
  r.check(mono && k.C_bar_table.size() == 3, "C_bar at d0/8, d0/4, d0/2: " + table);
  const double a = poincare_mean_sigma(p16.mesh, p16.measure, PoincareMode::L2_eig).value;
  const double b = poincare_mean_sigma(p32.mesh, p32.measure, PoincareMode::L2_eig).value;
  r.check(std::abs(a / b - 1.0) <= 0.1, fmt::format("Poincare L2 {:.5g} (n=16) vs {:.5g} (n=32)", a, b));
  const auto samples = zeta_samples(p16.op, 20, 1);
  int verified = 0;
  std::string zs;
  for (double eps : {0.05, 0.1, 0.2, 0.4, 0.8}) {
    const auto z = interpolation_zeta_on(p16.op, eps, samples);
    zs += fmt::format("{}{:.4g}", verified ? ", " : "", z.zeta);
    bool ok = !z.unbounded;
    for (double extra : {0.0, 0.1, 1.0, 10.0}) ok = ok && zeta_feasible(p16.op, eps, z.zeta + extra, samples);
    if (z.zeta > 1e-6) ok = ok && !zeta_feasible(p16.op, eps, z.zeta * (1.0 - 1e-6), samples);
    if (ok) ++verified;
  }
  r.check(verified == 5, fmt::format("zeta feasibility monotone on {}/5 eps values (zeta {})", verified, zs));
  return r;
}

Result certificate_replay() {
  Result r;
  const auto p = segment(16);
  const auto k = constants(p);
  const Vec u = phi1(p.op);
  const std::vector<std::pair<Nonlinearity, Nonlinearity>> pairs{
      {pw(1, 2), pw(1, 0)},  {pw(-1, 0), pw(1, 0)},  {pw(-1, 2), pw(-1, 0)}, {pw(1, 2), affine(1, 1)},
      {pw(1, 2), affine(-1, -1)}, {pw(1, 2), pw(1, 1)}, {pw(1, 2), pw(1, 2)},  {pw(-1, 3), pw(-1, 1)},
      {pw(-2, 2), pw(1, 0)}, {pw(1, 1), pw(-1, 0)}};
  double worst = 0.0;
  int certs = 0;
  bool deterministic = true;
  for (double c : {1.0, 10.0})
    for (const auto& [f, h] : pairs) {
      const auto ctx = context(p, k, c * u, f, h);
      const auto v = classify(f, h, ctx);
      const auto rep = replay_certificate(v, f, h, 10000, 99);
      worst = std::max(worst, rep.max_relative_violation);
      certs += rep.inequalities;
      if (classify(f, h, ctx).serialize() != v.serialize()) deterministic = false;
    }
  r.check(worst <= 1e-8, fmt::format("{} inequalities replayed, worst relative violation {:.2e}", certs, worst));
  r.check(deterministic, "classifier output byte-identical on rerun");

  SimConfig cfg;
  cfg.mode = Mode::Sweep;
  cfg.geometry.n = 8;
  cfg.analysis.zeta_trials = 4;
  cfg.analysis.poincare_starts = 8;
  cfg.analysis.poincare_iterations = 50;
  std::ostringstream log;
  std::string outputs[2];
  for (int i = 0; i < 2; ++i) {
    const fs::path dir = fs::temp_directory_path() / fmt::format("transmission_acceptance_sweep_{}", i);
    fs::remove_all(dir);
    cfg.out = dir.string();
    cfg.jobs = i + 1;
    if (run(cfg, log) != kExitOk) deterministic = false;
    outputs[i] = io::read_text(dir / "regime.csv");
  }
  r.check(outputs[0] == outputs[1] && !outputs[0].empty(), "sweep CSV byte-identical across runs and job counts");
  return r;
}

Result refinement() {
  Result r;
  const auto f = pw(1, 2), h = affine(1.0, 1.0);
  double l1[2], term[2];
  for (int i = 0; i < 2; ++i) {
    const auto p = segment(i == 0 ? 16 : 32);
    l1[i] = spectrum(p.op, 1).eigenvalues[0];
    StepControl c;
    c.dt_max = 0.02;
    // The same closed-form datum on both meshes.
    Vec g(p.mesh.num_vertices());
    for (int v = 0; v < p.mesh.num_vertices(); ++v)
      g[v] = std::sin(M_PI * p.mesh.vertices[v].x / 2.0) * (1.0 + p.mesh.vertices[v].y);
    const auto tr = integrate(p.op, p.op.restrict(g), f, h, 6.0, c);
    term[i] = e1(p.op, tr.states.back());
  }
  const double dl = std::abs(l1[1] / l1[0] - 1.0), de = std::abs(term[1] / term[0] - 1.0);
  r.check(dl < 0.05, fmt::format("lambda1 {:.6g} -> {:.6g} ({:.2f}%)", l1[0], l1[1], 100 * dl));
  r.check(de < 0.10, fmt::format("terminal E1 {:.6g} -> {:.6g} ({:.2f}%)", term[0], term[1], 100 * de));
  return r;
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<const char*, std::function<Result()>>> criteria{
      {"operator structure", operator_structure},
      {"two-node hand oracle", hand_oracle},
      {"Markov and contraction", markov},
      {"semigroup law", semigroup},
      {"energy inequality", energy_inequality},
      {"dichotomy end-to-end", dichotomy},
      {"decay-rate link", decay_rates},
      {"Picard and IMEX cross-validation", picard_vs_imex},
      {"squeezing", squeezing},
      {"constants self-consistency", constants_consistency},
      {"certificate replay and determinism", certificate_replay},
      {"refinement sanity", refinement},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!selected.empty() && !selected.count(id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Result res;
    try {
      res = criteria[i].second();
    } catch (const std::exception& e) {
      res.check(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::string detail;
    for (const auto& d : res.details) detail += (detail.empty() ? "" : "; ") + d;
    std::printf("%s %2d %s (%.1f s): %s\n", res.pass ? "PASS" : "FAIL", id, criteria[i].first, secs, detail.c_str());
    std::fflush(stdout);
    if (!res.pass) ++failed;
  }
  return failed == 0 ? 0 : 1;
}
