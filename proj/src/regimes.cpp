#include "transmission/regimes.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <fmt/format.h>

#include "transmission/errors.hpp"
#include "transmission/operators.hpp"

namespace transmission {

namespace {

constexpr double kGridRadius = 1e3;
constexpr double kTailCap = 1e12;

// Radius beyond which the dominant term on `side` is at least twice the sum
// of all other terms; 0 for an identically zero series.
double dominance_radius(const PowerSeries& p, int side) {
  const Tail t = p.tail(side);
  if (t.zero) return 0.0;
  auto rest = [&](double R) {
    double s = 0.0;
    for (const auto& term : p.terms()) {
      if (term.growth() == t.growth) continue;
      s += std::abs(term.coef) * std::pow(R, term.growth());
    }
    // Same-growth terms merge into the dominant coefficient.
    return s;
  };
  double R = 1.0;
  while (R < kTailCap && rest(R) > 0.5 * std::abs(t.coefficient) * std::pow(R, t.growth)) R *= 2.0;
  return R;
}

std::vector<double> sample_grid(double R) {
  std::vector<double> g{0.0};
  const int nlog = 4000;
  const double lo = std::log(1e-4), hi = std::log(R);
  for (int i = 0; i <= nlog; ++i) {
    const double v = std::exp(lo + (hi - lo) * i / nlog);
    g.push_back(v);
    g.push_back(-v);
  }
  const double lin = std::min(R, 10.0);
  for (int i = -1000; i <= 1000; ++i) g.push_back(lin * i / 1000.0);
  std::sort(g.begin(), g.end());
  g.erase(std::unique(g.begin(), g.end()), g.end());
  return g;
}

double golden_max(const PowerSeries& p, double a, double b, double& arg) {
  const double r = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = b - r * (b - a), x2 = a + r * (b - a);
  double f1 = p(x1), f2 = p(x2);
  for (int it = 0; it < 200 && (b - a) > 1e-15 * std::max(1.0, std::abs(a) + std::abs(b)); ++it) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + r * (b - a);
      f2 = p(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - r * (b - a);
      f1 = p(x1);
    }
  }
  arg = f1 > f2 ? x1 : x2;
  return std::max(f1, f2);
}

std::vector<double> logspace(double lo, double hi, int n) {
  std::vector<double> v;
  for (int i = 0; i < n; ++i) v.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1)));
  return v;
}

PowerSeries tau() { return PowerSeries::odd_power(1.0, 0.0); }

}  // namespace

SeriesBound series_sup(const PowerSeries& p) {
  SeriesBound out;
  if (p.is_zero()) return out;
  double R = kGridRadius;
  double tail_bound = -HUGE_VAL;
  for (int side : {1, -1}) {
    const Tail t = p.tail(side);
    if (t.zero) continue;
    if (t.coefficient > 0.0 && t.growth > 0.0) {
      out.finite = false;
      out.value = HUGE_VAL;
      out.argmax = side * kGridRadius;
      return out;
    }
    const double Rs = dominance_radius(p, side);
    R = std::max(R, Rs);
    // Beyond Rs: |rest| <= |dominant| / 2.
    if (t.growth > 0.0)
      tail_bound = std::max(tail_bound, 0.5 * t.coefficient * std::pow(Rs, t.growth));
    else
      tail_bound = std::max(tail_bound, t.coefficient > 0 ? 1.5 * t.coefficient : 0.5 * t.coefficient);
  }
  out.tail_radius = R;
  const auto grid = sample_grid(R);
  std::vector<double> val(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) val[i] = p(grid[i]);
  out.value = -HUGE_VAL;
  for (std::size_t i = 0; i < grid.size(); ++i)
    if (val[i] > out.value) {
      out.value = val[i];
      out.argmax = grid[i];
    }
  // Refine every interior local maximum.
  for (std::size_t i = 1; i + 1 < grid.size(); ++i) {
    if (val[i] >= val[i - 1] && val[i] >= val[i + 1]) {
      double arg = grid[i];
      const double v = golden_max(p, grid[i - 1], grid[i + 1], arg);
      if (v > out.value) {
        out.value = v;
        out.argmax = arg;
      }
    }
  }
  out.value = std::max(out.value, tail_bound);
  // Guard against rounding between samples.
  out.value += 1e-12 * (1.0 + std::abs(out.value));
  return out;
}

DerivedFunctions derived_functions(const Nonlinearity& f, const Nonlinearity& h, double alpha) {
  if (!(alpha > 2.0)) throw ValidationError(fmt::format("alpha={} must exceed 2", alpha));
  for (const auto* n : {&f, &h})
    for (const auto& t : n->series().terms())
      if (t.power < 0.0) throw UnsupportedError("derived functions need nonnegative powers");
  DerivedFunctions d;
  d.g = f.series() * tau() * -1.0 + alpha * f.primitive_series();
  d.l = h.series() * tau() * -1.0 + alpha * h.primitive_series();
  d.l_prime = d.l.derivative();
  return d;
}

RegimeContext RegimeContext::from(const ConstantsReport& c, double e0, double x2_sq) {
  RegimeContext ctx;
  ctx.total_mass = c.total_mass;
  ctx.area = c.domain_area;
  ctx.d0 = c.d0;
  ctx.C_star = c.C_star;
  ctx.C_bar = c.C_bar;
  ctx.eps = c.eps;
  ctx.C_tilde = c.lambda1;
  ctx.e0 = e0;
  ctx.x2_sq = x2_sq;
  ctx.bulk_shift = c.bulk_shift_table;
  return ctx;
}

double RegimeContext::blowup_rate(double kappa, double C1) const {
  // The eigenvalue is nondecreasing in theta, so the grid point below is safe.
  double lam = C_tilde;
  const double theta = C1 / kappa;
  for (const auto& [t, l] : bulk_shift)
    if (t <= theta) lam = std::max(lam, l);
  return kappa * lam;
}

PowerSeries balance_lhs(const Nonlinearity& f, const Nonlinearity& h, double m, const RegimeContext& ctx) {
  const PowerSeries tm = PowerSeries::odd_power(1.0, m - 1.0);
  const PowerSeries em = PowerSeries::even_power(1.0, m - 1.0);
  const PowerSeries inner = h.derivative_series() * tau() + m * h.series();
  return f.series() * tm * -1.0 + (ctx.total_mass / ctx.area) * (h.series() * tm) +
         (ctx.C_star * ctx.C_star / (4.0 * m * ctx.eps)) * (em * inner * inner);
}

PowerSeries dissipative_lhs(const Nonlinearity& f, const Nonlinearity& h, double eps, const RegimeContext& ctx) {
  const PowerSeries inner = h.derivative_series() * tau() + h.series();
  return f.series() * tau() * -1.0 + (ctx.total_mass / ctx.area) * (h.series() * tau()) +
         (ctx.C_star * ctx.C_star / (4.0 * eps)) * (inner * inner);
}

// Left side of the blow-up balance with the signs that make the concavity
// argument close: g - (W/|Omega|) l - (C*)^2/(4 eps) (l')^2 >= C1 tau^2 - C2.
PowerSeries blowup_lhs(const DerivedFunctions& d, double eps, const RegimeContext& ctx) {
  return d.g - (ctx.total_mass / ctx.area) * d.l -
         (ctx.C_star * ctx.C_star / (4.0 * eps)) * (d.l_prime * d.l_prime);
}

double large_tau_threshold(const Nonlinearity& f, const Nonlinearity& h) {
  const auto grid = logspace(1e-3, 1e4, 701);
  double tau0 = 1e-3;
  for (const auto* n : {&f, &h}) {
    const auto& p = n->series();
    if (p.is_zero()) continue;
    for (int side : {1, -1}) {
      const Tail t = p.tail(side);
      // Walk down from the top while the dominant term stays within 10%.
      std::size_t k = grid.size();
      while (k > 0) {
        const double x = side * grid[k - 1];
        const double dom = t.coefficient * std::pow(grid[k - 1], t.growth);
        if (std::abs(p(x) - dom) > 0.1 * std::abs(dom)) break;
        --k;
      }
      tau0 = std::max(tau0, k < grid.size() ? grid[k] : grid.back());
    }
  }
  return tau0;
}

SubVerdict check_global(const Nonlinearity& f, const Nonlinearity& h, const RegimeContext& ctx) {
  SubVerdict out;
  const auto lf = f.leading(), lh = h.leading();
  if (lf && lh && lf->coefficient > 0.0 && lh->coefficient > 0.0 && lf->exponent > 2.0 * lh->exponent) {
    out.fired = true;
    out.rule = "example-C";
    out.certificate = {{"q", lf->exponent}, {"c_f", lf->coefficient}, {"p", lh->exponent}, {"c_h", lh->coefficient}};
    return out;
  }

  const double tau0 = large_tau_threshold(f, h);
  // f tau >= -c_f tau^2 and h tau <= c_h tau^2 for |tau| >= tau0.
  {
    const PowerSeries ft = f.series() * tau(), ht = h.series() * tau();
    bool tails_ok = true;
    for (int side : {1, -1}) {
      const Tail a = ft.tail(side), b = ht.tail(side);
      if (!a.zero && a.growth > 2.0 && a.coefficient < 0.0) tails_ok = false;
      if (!b.zero && b.growth > 2.0 && b.coefficient > 0.0) tails_ok = false;
    }
    if (tails_ok) {
      double cf = 0.0, ch = 0.0;
      for (double x : logspace(tau0, 1e4, 2001))
        for (double s : {x, -x}) {
          cf = std::max(cf, -ft(s) / (s * s));
          ch = std::max(ch, ht(s) / (s * s));
        }
      for (int side : {1, -1}) {
        const Tail a = ft.tail(side), b = ht.tail(side);
        if (!a.zero && a.growth == 2.0) cf = std::max(cf, -a.coefficient);
        if (!b.zero && b.growth == 2.0) ch = std::max(ch, b.coefficient);
      }
      out.fired = true;
      out.rule = "cor-weaker";
      out.certificate = {{"c_f", cf * (1 + 1e-12) + 1e-300}, {"c_h", ch * (1 + 1e-12) + 1e-300}, {"tau0", tau0}};
      return out;
    }
  }

  // General balance condition sampled on m, with L(m) = sup phi_m / (|tau|^{m+1} + 1).
  const std::vector<double> ms{1, 2, 4, 8, 16};
  Certificate cert{{"tau0", tau0}, {"eps", ctx.eps}};
  std::vector<double> lx, ly;
  bool ok = true;
  for (double m : ms) {
    const PowerSeries phi = balance_lhs(f, h, m, ctx);
    double L = 0.0;
    for (int side : {1, -1}) {
      const Tail t = phi.tail(side);
      if (t.zero) continue;
      if (t.growth > m + 1.0 && t.coefficient > 0.0) ok = false;
      if (t.growth == m + 1.0) L = std::max(L, t.coefficient);
    }
    if (!ok) {
      out.notes.push_back(fmt::format("balance fails at m={}: left side outgrows |tau|^(m+1)", m));
      break;
    }
    for (double x : logspace(tau0, kGridRadius, 2001))
      for (double s : {x, -x}) L = std::max(L, phi(s) / (std::pow(x, m + 1.0) + 1.0));
    L = L * (1 + 1e-12) + 1e-300;
    cert[fmt::format("L_m{}", static_cast<int>(m))] = L;
    lx.push_back(std::log(m));
    ly.push_back(std::log(L));
  }
  if (ok) {
    // Every m >= 1, not only the sampled ones: the top coefficient must stay
    // nonpositive as m grows.
    for (double m : {64.0, 1024.0, 65536.0}) {
      const PowerSeries phi = balance_lhs(f, h, m, ctx);
      for (int side : {1, -1}) {
        const Tail t = phi.tail(side);
        if (!t.zero && t.growth > m + 1.0 && t.coefficient > 0.0) ok = false;
      }
    }
    if (!ok) out.notes.push_back("balance holds on the sampled m but fails as m grows");
  }
  if (ok) {
    const auto fit = fit_line(lx, ly);
    const double lambda = std::max(fit.slope, 1e-12);
    double c = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) c = std::max(c, std::exp(ly[i] - lambda * lx[i]));
    cert["L_c"] = c;
    cert["L_lambda"] = lambda;
    cert["C_star"] = ctx.C_star;
    cert["W"] = ctx.total_mass;
    cert["area"] = ctx.area;
    out.fired = true;
    out.rule = "balance-sampled";
    out.certificate = cert;
  }
  return out;
}

DissipativeResult check_dissipative(const Nonlinearity& f, const Nonlinearity& h, double eps,
                                    const RegimeContext& ctx) {
  if (!(eps > 0.0 && eps < ctx.d0))
    throw ValidationError(fmt::format("dissipativity check needs 0 < eps < d0 (eps={})", eps));
  DissipativeResult r;
  const PowerSeries phi = dissipative_lhs(f, h, eps, ctx);
  for (int side : {1, -1}) {
    const Tail t = phi.tail(side);
    if (t.zero) continue;
    if (t.growth > 2.0 && t.coefficient > 0.0) {
      r.superquadratic = true;
      // Witness: where phi / tau^2 is largest on the grid.
      double best = -HUGE_VAL;
      for (double x : logspace(1.0, kGridRadius, 601)) {
        const double v = phi(side * x) / (x * x);
        if (v > best) {
          best = v;
          r.witness = side * x;
        }
      }
      return r;
    }
    if (t.growth == 2.0 && t.coefficient > 0.0) r.lambda_star = std::max(r.lambda_star, t.coefficient);
  }
  const auto sup = series_sup(phi - r.lambda_star * PowerSeries::square());
  r.C_fh = std::max(0.0, sup.value);
  r.ok = r.lambda_star < ctx.C_bar;
  return r;
}

namespace {

struct BlowCandidate {
  double margin = -HUGE_VAL;
  Certificate cert;
  double lhs = 0.0, threshold = 0.0;
};

// G(t) = |U(t)|^2_X2 / 2 obeys G' >= D1 G - (alpha E(0) + D2), so growth
// starts once D1 G(0) exceeds the right side.
void consider(BlowCandidate& best, double D1, double D2, double alpha, const RegimeContext& ctx,
              Certificate cert) {
  const double lhs = 0.5 * D1 * ctx.x2_sq;
  const double thr = alpha * ctx.e0 + D2;
  const double margin = lhs - thr;
  if (margin > best.margin) {
    cert["D1"] = D1;
    cert["D2"] = D2;
    best = {margin, std::move(cert), lhs, thr};
  }
}

}  // namespace

SubVerdict check_blowup(const Nonlinearity& f, const Nonlinearity& h, double alpha, const RegimeContext& ctx) {
  SubVerdict out;
  const DerivedFunctions d = derived_functions(f, h, alpha);
  const double top_eps = (alpha / 2.0 - 1.0) * ctx.d0;
  const auto c_grid = logspace(1e-4, 1e4, 41);

  BlowCandidate best2, best3;
  // Path through the full balance with the Poincare constant.
  for (int k = 1; k <= 9; ++k) {
    const double eps = top_eps * k / 10.0;
    const PowerSeries psi = blowup_lhs(d, eps, ctx);
    const double kappa = (top_eps - eps) / ctx.d0;
    for (double C1 : c_grid) {
      const auto sup = series_sup(C1 * PowerSeries::square() - psi);
      if (!sup.finite) continue;
      const double C2 = std::max(0.0, sup.value);
      // C1 only acts on the bulk part of the X2 norm.
      consider(best2, 2.0 * ctx.blowup_rate(kappa, C1), C2 * ctx.area, alpha, ctx,
               {{"path", 2}, {"alpha", alpha}, {"eps", eps}, {"C1", C1}, {"C2", C2}});
    }
  }
  // Path where both nonlinearities carry a bad sign separately.
  std::vector<double> cs{0.0};
  cs.insert(cs.end(), c_grid.begin(), c_grid.end());
  for (double c : cs) {
    const auto sf = series_sup(c * PowerSeries::square() - d.g);
    const auto sh = series_sup(d.l + c * PowerSeries::square());
    if (!sf.finite || !sh.finite) continue;
    const double Cfp = std::max(0.0, sf.value), Chp = std::max(0.0, sh.value);
    consider(best3, 2.0 * ((alpha / 2.0 - 1.0) * ctx.C_tilde + c), Cfp * ctx.area + Chp * ctx.total_mass,
             alpha, ctx,
             {{"path", 3}, {"alpha", alpha}, {"C_f", c}, {"C_h", c}, {"C_f_prime", Cfp}, {"C_h_prime", Chp}});
  }
  const BlowCandidate& best = best2.margin >= best3.margin ? best2 : best3;
  if (best.margin == -HUGE_VAL) {
    out.notes.push_back(fmt::format("alpha={}: no admissible blow-up constants", alpha));
    return out;
  }
  out.certificate = best.cert;
  out.certificate["C_star"] = ctx.C_star;
  out.certificate["W"] = ctx.total_mass;
  out.certificate["area"] = ctx.area;
  out.certificate["lhs"] = best.lhs;
  out.certificate["threshold"] = best.threshold;
  out.margin = best.margin;
  out.rule = &best == &best2 ? "theo2" : "theo3";
  out.fired = best.margin > 0.0;

  // Polynomial shortcut case, for the record.
  const auto lf = f.leading(), lh = h.leading();
  if (lf && lh) {
    const double q = lf->exponent, p = lh->exponent, cf = lf->coefficient, ch = lh->coefficient;
    if (q > 2 * p && cf < 0 && ch < 0 && alpha > p + 2 && alpha < q + 2)
      out.notes.push_back("polynomial case (a)");
    else if (q == 2 * p && alpha > 2 && alpha < q + 2) {
      const double eps = 0.5 * top_eps;
      const double lhs_b = -cf * (1.0 - alpha / (q + 2.0));
      const double rhs_b = ctx.C_star * ctx.C_star * ch * ch * (p + 2.0 - alpha) * (p + 2.0 - alpha) / (4.0 * eps);
      out.notes.push_back(fmt::format("polynomial case (b): {:.6g} {} {:.6g}", lhs_b, lhs_b > rhs_b ? ">" : "<=", rhs_b));
    } else if (q > 2 * p && alpha > 2 && alpha < q + 2)
      out.notes.push_back("polynomial case (c)");
  }
  return out;
}

RegimeVerdict classify(const Nonlinearity& f, const Nonlinearity& h, const RegimeContext& ctx,
                       const ClassifyOptions& options) {
  RegimeVerdict v;
  v.e0 = ctx.e0;
  const SubVerdict global = check_global(f, h, ctx);
  for (const auto& n : global.notes) v.notes.push_back(n);
  if (global.fired) {
    v.verdict = Verdict::GlobalBounded;
    v.rule_fired = global.rule;
    v.certificate = global.certificate;
  }

  const auto dis = check_dissipative(f, h, ctx.eps, ctx);
  if (dis.superquadratic) {
    v.notes.push_back(fmt::format("dissipativity fails: superquadratic left side, witness tau={:.6g}", dis.witness));
  } else {
    v.certificate["lambda_star"] = dis.lambda_star;
    v.certificate["C_fh"] = dis.C_fh;
    v.certificate["eps_dissip"] = dis.ok ? ctx.eps : ctx.eps;
    v.certificate["dissipative"] = dis.ok ? 1.0 : 0.0;
    v.certificate["C_bar"] = ctx.C_bar;
    v.certificate["C_star"] = ctx.C_star;
    v.certificate["W"] = ctx.total_mass;
    v.certificate["area"] = ctx.area;
  }

  // Configured alpha first, then a scan of (2, q+2) when the leading data allow it.
  std::vector<double> alphas{options.alpha};
  if (const auto lf = f.leading(); lf && lf->exponent > 0.0 && options.alpha_scan > 0) {
    const double top = lf->exponent + 2.0;
    for (int k = 1; k <= options.alpha_scan; ++k) {
      const double a = 2.0 + (top - 2.0) * k / (options.alpha_scan + 1.0);
      if (a != options.alpha) alphas.push_back(a);
    }
  }
  SubVerdict blow;
  for (double a : alphas) {
    SubVerdict b = check_blowup(f, h, a, ctx);
    for (const auto& n : b.notes) v.notes.push_back(n);
    if (b.margin > blow.margin) blow = std::move(b);
    if (blow.fired) break;
  }
  if (blow.margin > -HUGE_VAL) {
    for (const auto& [k, val] : blow.certificate) v.certificate["blowup." + k] = val;
    v.lhs_value = blow.certificate["lhs"];
    v.threshold_value = blow.certificate["threshold"];
  }
  if (blow.fired) {
    if (v.verdict == Verdict::GlobalBounded) {
      v.conflict = fmt::format("global rule {} and blow-up rule {} both fire", v.rule_fired, blow.rule);
    } else {
      v.verdict = Verdict::BlowUpPredicted;
      v.rule_fired = blow.rule;
    }
  }
  return v;
}

std::string RegimeVerdict::serialize() const {
  std::string s = fmt::format("verdict={}\nrule={}\n", to_string(verdict), rule_fired);
  for (const auto& [k, val] : certificate) s += fmt::format("cert.{}={:.17g}\n", k, val);
  s += fmt::format("threshold_value={:.17g}\nlhs_value={:.17g}\ne0={:.17g}\n", threshold_value, lhs_value, e0);
  if (!conflict.empty()) s += "conflict=" + conflict + "\n";
  for (const auto& n : notes) s += "note=" + n + "\n";
  return s;
}

namespace {

struct Violation {
  double worst = 0.0;
  // need >= have, relative to the magnitudes involved
  void ge(double have, double need, std::initializer_list<double> scale) {
    double s = 1.0;
    for (double x : scale) s = std::max(s, std::abs(x));
    worst = std::max(worst, (need - have) / s);
  }
};

}  // namespace

ReplayReport replay_certificate(const RegimeVerdict& v, const Nonlinearity& f, const Nonlinearity& h,
                                int samples, std::uint64_t seed) {
  ReplayReport rep;
  rep.samples = samples;
  const auto& c = v.certificate;
  auto has = [&](const std::string& k) { return c.count(k) > 0; };
  auto get = [&](const std::string& k) { return c.at(k); };
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  std::vector<double> taus(samples);
  for (int i = 0; i < samples; ++i) {
    const double s = U(rng) < 0.5 ? -1.0 : 1.0;
    taus[i] = (i % 2 == 0) ? -10.0 + 20.0 * U(rng) : s * std::pow(10.0, -3.0 + 6.0 * U(rng));
  }
  Violation viol;
  RegimeContext ctx;
  if (has("C_star")) {
    ctx.C_star = get("C_star");
    ctx.total_mass = get("W");
    ctx.area = get("area");
  }

  if (has("lambda_star")) {
    ++rep.inequalities;
    const PowerSeries phi = dissipative_lhs(f, h, get("eps_dissip"), ctx);
    const double ls = get("lambda_star"), C = get("C_fh");
    for (double t : taus) {
      const double lhs = phi(t), rhs = ls * t * t + C;
      viol.ge(rhs, lhs, {lhs, rhs});
    }
  }
  if (v.rule_fired == "cor-weaker") {
    ++rep.inequalities;
    const double cf = get("c_f"), ch = get("c_h"), t0 = get("tau0");
    for (double t : taus) {
      if (std::abs(t) < t0) continue;
      const double ft = f.value(t) * t, ht = h.value(t) * t;
      viol.ge(ft, -cf * t * t, {ft, cf * t * t});
      viol.ge(ch * t * t, ht, {ht, ch * t * t});
    }
  }
  if (v.rule_fired == "balance-sampled") {
    ctx.eps = get("eps");
    const double t0 = get("tau0");
    for (int m : {1, 2, 4, 8, 16}) {
      ++rep.inequalities;
      const PowerSeries phi = balance_lhs(f, h, m, ctx);
      const double L = get(fmt::format("L_m{}", m));
      for (double t : taus) {
        if (std::abs(t) < t0) continue;
        const double lhs = phi(t), rhs = L * (std::pow(std::abs(t), m + 1.0) + 1.0);
        viol.ge(rhs, lhs, {lhs, rhs});
      }
    }
  }
  if (has("blowup.path")) {
    ++rep.inequalities;
    RegimeContext b = ctx;
    b.C_star = get("blowup.C_star");
    b.total_mass = get("blowup.W");
    b.area = get("blowup.area");
    const double alpha = get("blowup.alpha");
    const DerivedFunctions d = derived_functions(f, h, alpha);
    if (get("blowup.path") == 2) {
      const PowerSeries psi = blowup_lhs(d, get("blowup.eps"), b);
      const double C1 = get("blowup.C1"), C2 = get("blowup.C2");
      for (double t : taus) {
        const double lhs = psi(t), rhs = C1 * t * t - C2;
        viol.ge(lhs, rhs, {lhs, C1 * t * t, C2});
      }
    } else {
      const double Cf = get("blowup.C_f"), Ch = get("blowup.C_h");
      const double Cfp = get("blowup.C_f_prime"), Chp = get("blowup.C_h_prime");
      for (double t : taus) {
        const double g = d.g(t), l = d.l(t);
        viol.ge(g, Cf * t * t - Cfp, {g, Cf * t * t, Cfp});
        viol.ge(-Ch * t * t + Chp, l, {l, Ch * t * t, Chp});
      }
    }
  }
  rep.max_relative_violation = std::max(0.0, viol.worst);
  return rep;
}

}  // namespace transmission
