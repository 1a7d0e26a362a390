#include "transmission/runner.hpp"

#include <atomic>
#include <chrono>
#include <ctime>
#include <fstream>
#include <iostream>
#include <mutex>
#include <random>
#include <thread>

#include <fmt/format.h>

#include "transmission/diagnostics.hpp"
#include "transmission/errors.hpp"
#include "transmission/expression.hpp"
#include "transmission/io.hpp"
#include "transmission/operators.hpp"
#include "transmission/regimes.hpp"

namespace transmission {

namespace fs = std::filesystem;

Problem build_problem(const SimConfig& c) {
  Problem p;
  p.mesh = build_square_mesh(c.geometry.n, c.geometry.interface, c.geometry.dirichlet);
  p.measure = build_interface_measure(p.mesh, c.geometry.interface);
  const auto& ph = c.physics;
  const auto D = DiffusionTensor::uniform(p.mesh.triangles.size(), ph.d11, ph.d12, ph.d22, ph.d0);
  const auto beta = BetaCoefficient::uniform(p.measure.size(), ph.beta, ph.beta0);
  KernelSpec k;
  k.s = ph.s;
  k.d = p.measure.dim_d;
  k.c0 = ph.c0;
  k.c1 = ph.c1;
  k.rule = ph.kernel;
  p.full = assemble_operator(p.mesh, p.measure, D, beta, k, {ph.delta, false});
  p.op = apply_dirichlet(p.full, p.mesh);
  return p;
}

Vec initial_datum(const SimConfig& c, const Problem& p) {
  const auto& ic = c.initial;
  switch (ic.kind) {
    case InitialConfig::Kind::Eigen: {
      if (ic.mode > p.op.size())
        throw ConfigError({fmt::format("initial.mode={} exceeds the {} free DOFs", ic.mode, p.op.size())});
      const auto spec = spectrum(p.op, ic.mode);
      Vec v = spec.eigenvectors.col(ic.mode - 1);
      // Fix the sign so the largest entry in magnitude is positive.
      Eigen::Index i = 0;
      v.cwiseAbs().maxCoeff(&i);
      if (v[i] < 0.0) v = -v;
      return v * (ic.amplitude / v.cwiseAbs().maxCoeff());
    }
    case InitialConfig::Kind::File:
      return p.op.restrict(io::read_nodal(ic.file, p.mesh.num_vertices()));
    case InitialConfig::Kind::Expr: {
      const auto e = Expression::parse(ic.expr);
      Vec g(p.mesh.num_vertices());
      for (int i = 0; i < p.mesh.num_vertices(); ++i) g[i] = ic.amplitude * e(p.mesh.vertices[i].x, p.mesh.vertices[i].y);
      return p.op.restrict(g);
    }
  }
  return {};
}

StepControl step_control(const SimConfig& c) {
  StepControl s;
  s.dt0 = c.time.dt0;
  s.dt_min = c.time.dt_min;
  s.dt_max = c.time.dt_max;
  s.growth_cap = c.time.growth_cap;
  s.blow_up_threshold = c.time.blow_up_threshold;
  s.record_every = c.time.record_every;
  return s;
}

ConstantsReport constants_for(const SimConfig& c, const Problem& p) {
  ConstantsOptions o;
  o.safety_factor = c.analysis.safety_factor;
  o.eps_fraction = c.analysis.eps_fraction;
  o.zeta_trials = c.analysis.zeta_trials;
  o.poincare.starts = c.analysis.poincare_starts;
  o.poincare.iterations = c.analysis.poincare_iterations;
  o.poincare.seed = c.seed;
  return compute_constants(p.mesh, p.measure, p.op, c.physics.d0, o);
}

namespace {

class Logger {
 public:
  Logger(const fs::path& file, std::ostream& out) : out_(out) {
    fs::create_directories(file.parent_path());
    file_.open(file, std::ios::app);
  }
  void operator()(const std::string& msg) {
    std::lock_guard lock(mu_);
    out_ << msg << '\n';
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char stamp[32];
    std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%S", std::gmtime(&now));
    file_ << stamp << ' ' << msg << '\n';
    file_.flush();
  }

 private:
  std::ostream& out_;
  std::ofstream file_;
  std::mutex mu_;
};

RegimeVerdict classify_config(const SimConfig& c, const Problem& p, const ConstantsReport& k, const Vec& U0) {
  const Nonlinearity f(c.f), h(c.h);
  const auto ctx = RegimeContext::from(k, energy(p.op, U0, f, h).total, e1(p.op, U0));
  return classify(f, h, ctx, {c.analysis.alpha, c.analysis.alpha_scan});
}

int mode_simulate(const SimConfig& c, Logger& log) {
  const Problem p = build_problem(c);
  const Nonlinearity f(c.f), h(c.h);
  const Vec U0 = initial_datum(c, p);
  const auto tr = integrate(p.op, U0, f, h, c.time.T, step_control(c));
  const fs::path out(c.out);
  io::write_text(out / "trajectory.csv", io::trajectory_csv(tr, p.op, f, h));
  io::write_snapshot(out / "final_state.csv", p.mesh, p.op, tr.states.back());
  io::write_text(out / "outcome.txt", io::outcome_line(tr) + "\n");
  log(io::outcome_line(tr));
  log(fmt::format("accepted {} rejected {}", tr.accepted_steps, tr.rejected_steps));
  switch (tr.outcome) {
    case Outcome::Completed: return kExitOk;
    case Outcome::BlowUp: return kExitBlowUp;
    default: return kExitNumeric;
  }
}

int mode_spectrum(const SimConfig& c, Logger& log) {
  const Problem p = build_problem(c);
  const fs::path out(c.out);
  io::write_mesh(out, p.mesh);
  io::write_measure(out / "measure.csv", p.measure);
  const auto full = spectrum(p.op);
  SpectralData head = full;
  const int K = std::min<int>(c.analysis.spectrum_count, full.count());
  head.eigenvalues = full.eigenvalues.head(K);
  head.eigenvectors = full.eigenvectors.leftCols(K);
  io::write_spectrum(out / "spectrum.csv", head);
  std::vector<double> t;
  for (int k = 0; k <= 12; ++k) t.push_back(1e-4 * std::pow(10.0, k * 0.25));
  const auto fit = ultracontractivity_fit(full, t, p.measure.dim_d);
  io::write_ultracontractivity(out / "ultracontractivity.csv", fit);
  log(fmt::format("lambda_1 = {:.10g}; 2->inf slope {:.4f} (target {:.4f})", full.eigenvalues[0], fit.slope,
                  fit.target_slope));
  return kExitOk;
}

int mode_constants(const SimConfig& c, Logger& log) {
  const Problem p = build_problem(c);
  const auto k = constants_for(c, p);
  io::write_text(fs::path(c.out) / "constants.txt", k.serialize());
  log(fmt::format("C_star = {:.6g}, C_bar = {:.6g}, lambda1 = {:.6g}", k.C_star, k.C_bar, k.lambda1));
  return kExitOk;
}

int mode_classify(const SimConfig& c, Logger& log) {
  const Problem p = build_problem(c);
  const auto k = constants_for(c, p);
  const auto v = classify_config(c, p, k, initial_datum(c, p));
  io::write_text(fs::path(c.out) / "constants.txt", k.serialize());
  io::write_text(fs::path(c.out) / "verdict.txt", v.serialize());
  log(fmt::format("verdict {} via {}", to_string(v.verdict), v.rule_fired));
  return kExitOk;
}

struct Cell {
  double p, q, c_f, c_h;
};

std::string cell_row(const Cell& cell, const RegimeVerdict& v, const Trajectory* tr) {
  std::string row = fmt::format("{:.17g},{:.17g},{:.17g},{:.17g},{},{}", cell.p, cell.q, cell.c_f, cell.c_h,
                                to_string(v.verdict), v.rule_fired);
  if (tr) row += fmt::format(",{},{:.17g}", to_string(tr->outcome), tr->outcome_time);
  return row;
}

int mode_sweep(const SimConfig& c, Logger& log) {
  std::vector<Cell> cells;
  const auto& s = c.sweep;
  if (s.axis == SweepConfig::Axis::PQ) {
    for (double p : s.p)
      for (double q : s.q) cells.push_back({p, q, s.c_f.front(), s.c_h.front()});
  } else {
    for (double cf : s.c_f)
      for (double ch : s.c_h) cells.push_back({s.p.front(), s.q.front(), cf, ch});
  }
  const Problem p = build_problem(c);
  const auto k = constants_for(c, p);
  const Vec U0 = initial_datum(c, p);
  const fs::path cell_dir = fs::path(c.out) / "cells";
  fs::create_directories(cell_dir);

  std::vector<std::string> rows(cells.size());
  std::atomic<std::size_t> next{0};
  std::atomic<int> reused{0};
  std::mutex err_mu;
  std::vector<std::string> errors;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= cells.size()) return;
      // Content address: only what determines the cell's result.
      SimConfig cc = c;
      cc.f = PowerSeries::odd_power(cells[i].c_f, cells[i].q);
      cc.h = PowerSeries::odd_power(cells[i].c_h, cells[i].p);
      cc.out = "-";
      cc.jobs = 1;
      cc.sweep.p = {cells[i].p};
      cc.sweep.q = {cells[i].q};
      cc.sweep.c_f = {cells[i].c_f};
      cc.sweep.c_h = {cells[i].c_h};
      const fs::path file = cell_dir / fmt::format("{:016x}.csv", cc.hash());
      if (fs::exists(file)) {
        rows[i] = io::read_text(file);
        while (!rows[i].empty() && rows[i].back() == '\n') rows[i].pop_back();
        ++reused;
        continue;
      }
      try {
        const auto v = classify_config(cc, p, k, U0);
        std::optional<Trajectory> tr;
        if (s.simulate) tr = integrate(p.op, U0, Nonlinearity(cc.f), Nonlinearity(cc.h), c.time.T, step_control(c));
        rows[i] = cell_row(cells[i], v, tr ? &*tr : nullptr);
        io::write_text(file, rows[i] + "\n");
      } catch (const std::exception& e) {
        std::lock_guard lock(err_mu);
        errors.push_back(fmt::format("cell {}: {}", i, e.what()));
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    const int n_workers = std::max(1, std::min<int>(c.jobs, static_cast<int>(cells.size())));
    for (int w = 0; w < n_workers; ++w) pool.emplace_back(worker);
  }
  for (const auto& e : errors) log(e);
  std::string csv = "p,q,c_f,c_h,verdict,rule";
  if (s.simulate) csv += ",outcome,t_outcome";
  csv += "\n";
  for (const auto& r : rows)
    if (!r.empty()) csv += r + "\n";
  io::write_text(fs::path(c.out) / "regime.csv", csv);
  log(fmt::format("sweep: {} cells, {} reused, {} failed", cells.size(), reused.load(), errors.size()));
  return errors.empty() ? kExitOk : kExitNumeric;
}

int mode_pairs(const SimConfig& c, Logger& log) {
  const Problem p = build_problem(c);
  const Nonlinearity f(c.f), h(c.h);
  const Vec base = initial_datum(c, p);
  const double base_sup = base.cwiseAbs().maxCoeff();
  if (!(base_sup > 0.0)) throw ConfigError({"pairs mode needs a nonzero initial datum"});
  std::mt19937_64 rng(c.seed);
  std::normal_distribution<double> N(0.0, 1.0);
  Vec dir(base.size());
  for (auto& x : dir) x = N(rng);
  dir *= c.pairs.distance / x2_norm(p.op, dir);
  std::string csv = "amplitude,M,omega,K,initial_distance,terminal_distance,r_squared\n";
  for (double a : c.pairs.amplitudes) {
    const Vec Ua = base * (a / base_sup);
    const auto fit = squeezing_check(p.op, Ua, Ua + dir, f, h, c.pairs.T, step_control(c));
    csv += fmt::format("{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}\n", a, fit.M, fit.omega, fit.K,
                       fit.initial_distance, fit.terminal_distance, fit.r_squared);
    log(fmt::format("pair amplitude {}: omega {:.4g}, terminal distance {:.3e}", a, fit.omega, fit.terminal_distance));
  }
  io::write_text(fs::path(c.out) / "pairs.csv", csv);
  return kExitOk;
}

}  // namespace

int run(const SimConfig& c, std::ostream& out) {
  Logger log(fs::path(c.out) / "run.log", out);
  log(fmt::format("mode {} config {:016x}", to_string(c.mode), c.hash()));
  try {
    io::write_text(fs::path(c.out) / "config.ini", c.serialize());
    switch (c.mode) {
      case Mode::Simulate: return mode_simulate(c, log);
      case Mode::Spectrum: return mode_spectrum(c, log);
      case Mode::Constants: return mode_constants(c, log);
      case Mode::Classify: return mode_classify(c, log);
      case Mode::Sweep: return mode_sweep(c, log);
      case Mode::Pairs: return mode_pairs(c, log);
    }
  } catch (const ConfigError& e) {
    for (const auto& pr : e.problems) log("config error: " + pr);
    return kExitConfig;
  } catch (const GeometryError& e) {
    log(std::string("config error: ") + e.what());
    return kExitConfig;
  } catch (const ValidationError& e) {
    log(std::string("config error: ") + e.what());
    return kExitConfig;
  } catch (const NumericError& e) {
    log(std::string("numeric error: ") + e.what());
    return kExitNumeric;
  } catch (const std::exception& e) {
    log(std::string("error: ") + e.what());
    return kExitFailure;
  }
  return kExitFailure;
}

}  // namespace transmission
