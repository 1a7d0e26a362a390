#include "transmission/config.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>

#include "transmission/errors.hpp"
#include "transmission/expression.hpp"

namespace transmission {

std::string to_string(Mode m) {
  switch (m) {
    case Mode::Simulate: return "simulate";
    case Mode::Spectrum: return "spectrum";
    case Mode::Constants: return "constants";
    case Mode::Classify: return "classify";
    case Mode::Sweep: return "sweep";
    case Mode::Pairs: return "pairs";
  }
  return "?";
}

Mode parse_mode(const std::string& s) {
  for (Mode m : {Mode::Simulate, Mode::Spectrum, Mode::Constants, Mode::Classify, Mode::Sweep, Mode::Pairs})
    if (to_string(m) == s) return m;
  throw ConfigError({fmt::format("unknown mode '{}' (simulate|spectrum|constants|classify|sweep|pairs)", s)});
}

namespace {

std::string trim(std::string s) {
  const auto notspace = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), notspace));
  s.erase(std::find_if(s.rbegin(), s.rend(), notspace).base(), s.end());
  return s;
}

std::string fmt_double(double v) { return fmt::format("{:.17g}", v); }

double to_double(const std::string& s) {
  std::size_t used = 0;
  const double v = std::stod(trim(s), &used);
  if (used != trim(s).size()) throw std::invalid_argument("trailing characters in number");
  return v;
}

long long to_int(const std::string& s) {
  std::size_t used = 0;
  const long long v = std::stoll(trim(s), &used);
  if (used != trim(s).size()) throw std::invalid_argument("not an integer");
  return v;
}

bool to_bool(const std::string& s) {
  const std::string t = trim(s);
  if (t == "true" || t == "1" || t == "yes") return true;
  if (t == "false" || t == "0" || t == "no") return false;
  throw std::invalid_argument("expected true or false");
}

std::vector<double> to_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(to_double(item));
  if (out.empty()) throw std::invalid_argument("empty list");
  return out;
}

std::string fmt_list(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + fmt_double(v[i]);
  return s;
}

const std::pair<const char*, Side> kSides[] = {
    {"left", Side::Left}, {"right", Side::Right}, {"bottom", Side::Bottom}, {"top", Side::Top}};

DirichletSides to_sides(const std::string& s) {
  DirichletSides d = DirichletSides::none();
  if (trim(s) == "none") return d;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    bool found = false;
    for (const auto& [name, side] : kSides)
      if (trim(item) == name) {
        d.bits |= static_cast<unsigned>(side);
        found = true;
      }
    if (!found) throw std::invalid_argument(fmt::format("unknown side '{}' (left|right|bottom|top|none)", trim(item)));
  }
  return d;
}

std::string fmt_sides(DirichletSides d) {
  std::string s;
  for (const auto& [name, side] : kSides)
    if (d.contains(side)) s += (s.empty() ? "" : ",") + std::string(name);
  return s.empty() ? "none" : s;
}

struct Field {
  const char* section;
  const char* key;
  std::function<std::string(const SimConfig&)> get;
  std::function<void(SimConfig&, const std::string&)> set;
};

#define DOUBLE_FIELD(sec, name, member)                                      \
  Field {                                                                    \
    sec, name, [](const SimConfig& c) { return fmt_double(c.member); },     \
        [](SimConfig& c, const std::string& v) { c.member = to_double(v); } \
  }
#define INT_FIELD(sec, name, member)                                                             \
  Field {                                                                                        \
    sec, name, [](const SimConfig& c) { return std::to_string(c.member); },                     \
        [](SimConfig& c, const std::string& v) { c.member = static_cast<decltype(c.member)>(to_int(v)); } \
  }
#define LIST_FIELD(sec, name, member)                                      \
  Field {                                                                  \
    sec, name, [](const SimConfig& c) { return fmt_list(c.member); },     \
        [](SimConfig& c, const std::string& v) { c.member = to_list(v); } \
  }

const std::vector<Field>& fields() {
  static const std::vector<Field> table{
      {"run", "mode", [](const SimConfig& c) { return to_string(c.mode); },
       [](SimConfig& c, const std::string& v) {
         try {
           c.mode = parse_mode(trim(v));
         } catch (const ConfigError& e) {
           throw std::invalid_argument(e.problems.front());
         }
       }},
      {"run", "out", [](const SimConfig& c) { return c.out; }, [](SimConfig& c, const std::string& v) { c.out = trim(v); }},
      {"run", "seed", [](const SimConfig& c) { return std::to_string(c.seed); },
       [](SimConfig& c, const std::string& v) {
         std::size_t used = 0;
         c.seed = std::stoull(trim(v), &used);
         if (used != trim(v).size()) throw std::invalid_argument("not an unsigned integer");
       }},
      INT_FIELD("run", "jobs", jobs),

      INT_FIELD("geometry", "n", geometry.n),
      {"geometry", "interface",
       [](const SimConfig& c) {
         return std::string(c.geometry.interface.kind == InterfaceSpec::Kind::Segment ? "segment" : "koch");
       },
       [](SimConfig& c, const std::string& v) {
         if (trim(v) == "segment") c.geometry.interface.kind = InterfaceSpec::Kind::Segment;
         else if (trim(v) == "koch") c.geometry.interface.kind = InterfaceSpec::Kind::KochPrefractal;
         else throw std::invalid_argument("expected segment or koch");
       }},
      DOUBLE_FIELD("geometry", "y0", geometry.interface.y0),
      INT_FIELD("geometry", "level", geometry.interface.level),
      DOUBLE_FIELD("geometry", "interface_mass", geometry.interface.total_mass),
      {"geometry", "dirichlet", [](const SimConfig& c) { return fmt_sides(c.geometry.dirichlet); },
       [](SimConfig& c, const std::string& v) { c.geometry.dirichlet = to_sides(v); }},

      DOUBLE_FIELD("physics", "d11", physics.d11),
      DOUBLE_FIELD("physics", "d12", physics.d12),
      DOUBLE_FIELD("physics", "d22", physics.d22),
      DOUBLE_FIELD("physics", "d0", physics.d0),
      DOUBLE_FIELD("physics", "beta", physics.beta),
      DOUBLE_FIELD("physics", "beta0", physics.beta0),
      DOUBLE_FIELD("physics", "s", physics.s),
      {"physics", "kernel",
       [](const SimConfig& c) {
         return std::string(c.physics.kernel == KernelSpec::Rule::PowerLaw ? "power" : "modulated");
       },
       [](SimConfig& c, const std::string& v) {
         if (trim(v) == "power") c.physics.kernel = KernelSpec::Rule::PowerLaw;
         else if (trim(v) == "modulated") c.physics.kernel = KernelSpec::Rule::Modulated;
         else throw std::invalid_argument("expected power or modulated");
       }},
      DOUBLE_FIELD("physics", "c0", physics.c0),
      DOUBLE_FIELD("physics", "c1", physics.c1),
      INT_FIELD("physics", "delta", physics.delta),

      {"f", "terms", [](const SimConfig& c) { return format_series(c.f); },
       [](SimConfig& c, const std::string& v) { c.f = parse_series(v); }},
      {"h", "terms", [](const SimConfig& c) { return format_series(c.h); },
       [](SimConfig& c, const std::string& v) { c.h = parse_series(v); }},

      {"initial", "kind",
       [](const SimConfig& c) {
         switch (c.initial.kind) {
           case InitialConfig::Kind::Eigen: return std::string("eigen");
           case InitialConfig::Kind::File: return std::string("file");
           case InitialConfig::Kind::Expr: return std::string("expr");
         }
         return std::string();
       },
       [](SimConfig& c, const std::string& v) {
         const std::string t = trim(v);
         if (t == "eigen") c.initial.kind = InitialConfig::Kind::Eigen;
         else if (t == "file") c.initial.kind = InitialConfig::Kind::File;
         else if (t == "expr") c.initial.kind = InitialConfig::Kind::Expr;
         else throw std::invalid_argument("expected eigen, file or expr");
       }},
      INT_FIELD("initial", "mode", initial.mode),
      DOUBLE_FIELD("initial", "amplitude", initial.amplitude),
      {"initial", "file", [](const SimConfig& c) { return c.initial.file; },
       [](SimConfig& c, const std::string& v) { c.initial.file = trim(v); }},
      {"initial", "expr", [](const SimConfig& c) { return c.initial.expr; },
       [](SimConfig& c, const std::string& v) {
         c.initial.expr = trim(v);
         try {
           Expression::parse(c.initial.expr);
         } catch (const ConfigError& e) {
           throw std::invalid_argument(e.problems.front());
         }
       }},

      DOUBLE_FIELD("time", "T", time.T),
      DOUBLE_FIELD("time", "dt0", time.dt0),
      DOUBLE_FIELD("time", "dt_min", time.dt_min),
      DOUBLE_FIELD("time", "dt_max", time.dt_max),
      DOUBLE_FIELD("time", "growth_cap", time.growth_cap),
      DOUBLE_FIELD("time", "blow_up_threshold", time.blow_up_threshold),
      INT_FIELD("time", "record_every", time.record_every),

      INT_FIELD("analysis", "spectrum_count", analysis.spectrum_count),
      DOUBLE_FIELD("analysis", "safety_factor", analysis.safety_factor),
      DOUBLE_FIELD("analysis", "eps_fraction", analysis.eps_fraction),
      INT_FIELD("analysis", "zeta_trials", analysis.zeta_trials),
      INT_FIELD("analysis", "poincare_starts", analysis.poincare_starts),
      INT_FIELD("analysis", "poincare_iterations", analysis.poincare_iterations),
      DOUBLE_FIELD("analysis", "alpha", analysis.alpha),
      INT_FIELD("analysis", "alpha_scan", analysis.alpha_scan),

      {"sweep", "axis",
       [](const SimConfig& c) { return std::string(c.sweep.axis == SweepConfig::Axis::PQ ? "pq" : "coefficients"); },
       [](SimConfig& c, const std::string& v) {
         if (trim(v) == "pq") c.sweep.axis = SweepConfig::Axis::PQ;
         else if (trim(v) == "coefficients") c.sweep.axis = SweepConfig::Axis::Coefficients;
         else throw std::invalid_argument("expected pq or coefficients");
       }},
      LIST_FIELD("sweep", "p", sweep.p),
      LIST_FIELD("sweep", "q", sweep.q),
      LIST_FIELD("sweep", "c_f", sweep.c_f),
      LIST_FIELD("sweep", "c_h", sweep.c_h),
      {"sweep", "simulate", [](const SimConfig& c) { return std::string(c.sweep.simulate ? "true" : "false"); },
       [](SimConfig& c, const std::string& v) { c.sweep.simulate = to_bool(v); }},

      LIST_FIELD("pairs", "amplitudes", pairs.amplitudes),
      DOUBLE_FIELD("pairs", "distance", pairs.distance),
      DOUBLE_FIELD("pairs", "T", pairs.T),
  };
  return table;
}

const Field* find_field(const std::string& section, const std::string& key) {
  for (const auto& f : fields())
    if (section == f.section && key == f.key) return &f;
  return nullptr;
}

void apply(SimConfig& c, const Field& f, const std::string& value, const std::string& origin,
           std::vector<std::string>& problems) {
  try {
    f.set(c, value);
  } catch (const std::exception& e) {
    problems.push_back(fmt::format("{}.{} = '{}' ({}): {}", f.section, f.key, value, origin, e.what()));
  }
}

std::string env_name(const Field& f) {
  std::string s = std::string(kEnvPrefix) + f.section + "_" + f.key;
  for (auto& ch : s) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
  return s;
}

}  // namespace

PowerSeries parse_series(const std::string& text) {
  // Split into signed terms at top-level '+' / '-' that are not exponent signs.
  std::string t;
  for (char ch : text)
    if (!std::isspace(static_cast<unsigned char>(ch))) t += ch;
  if (t.empty() || t == "0") return PowerSeries();
  std::vector<std::string> pieces;
  std::string cur;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const char ch = t[i];
    const bool exp_sign = i > 0 && (t[i - 1] == 'e' || t[i - 1] == 'E' || t[i - 1] == '^');
    if ((ch == '+' || ch == '-') && !cur.empty() && !exp_sign) {
      pieces.push_back(cur);
      cur.clear();
    }
    cur += ch;
  }
  pieces.push_back(cur);

  std::vector<PowerTerm> terms;
  for (const auto& piece : pieces) {
    const auto bad = [&](const std::string& why) {
      return std::invalid_argument(fmt::format("bad polynomial term '{}': {}", piece, why));
    };
    std::string coef_text = piece, var;
    if (const auto star = piece.find('*'); star != std::string::npos) {
      coef_text = piece.substr(0, star);
      var = piece.substr(star + 1);
    } else if (piece.find('u') != std::string::npos) {
      const auto u = piece.find_first_of("|u");
      coef_text = piece.substr(0, u);
      var = piece.substr(u);
    }
    double coef = 1.0;
    if (coef_text == "+" || coef_text.empty()) coef = 1.0;
    else if (coef_text == "-") coef = -1.0;
    else {
      try {
        coef = to_double(coef_text);
      } catch (const std::exception&) {
        throw bad("coefficient");
      }
    }
    if (var.empty()) {
      terms.push_back({coef, 0.0, false});
      continue;
    }
    const bool even = var.rfind("|u|", 0) == 0;
    const std::string base = even ? "|u|" : "u";
    if (var.rfind(base, 0) != 0) throw bad("expected u or |u|");
    double k = 1.0;
    const std::string rest = var.substr(base.size());
    if (!rest.empty()) {
      if (rest[0] != '^') throw bad("expected '^'");
      try {
        k = to_double(rest.substr(1));
      } catch (const std::exception&) {
        throw bad("exponent");
      }
    }
    if (k < 0.0) throw bad("negative exponent");
    if (even) terms.push_back({coef, k, false});
    else {
      if (k < 1.0) throw bad("odd terms need exponent >= 1");
      terms.push_back({coef, k - 1.0, true});
    }
  }
  return PowerSeries(terms);
}

std::string format_series(const PowerSeries& p) {
  if (p.is_zero()) return "0";
  std::string s;
  for (const auto& t : p.terms()) {
    std::string term;
    if (t.odd) term = fmt::format("{}*u^{}", fmt_double(t.coef), fmt_double(t.power + 1.0));
    else if (t.power == 0.0) term = fmt_double(t.coef);
    else term = fmt::format("{}*|u|^{}", fmt_double(t.coef), fmt_double(t.power));
    if (!s.empty()) s += term[0] == '-' ? " " : " + ";
    s += term;
  }
  return s;
}

std::vector<std::string> SimConfig::violations() const {
  std::vector<std::string> v;
  const auto& g = geometry;
  if (g.n < 2 || g.n > 256) v.push_back(fmt::format("geometry.n={} outside [2, 256]", g.n));
  if (!(g.interface.y0 > 0.0 && g.interface.y0 < 1.0))
    v.push_back(fmt::format("geometry.y0={} outside (0,1)", g.interface.y0));
  else if (g.n >= 2 && std::abs(g.interface.y0 * g.n - std::round(g.interface.y0 * g.n)) > 1e-9)
    v.push_back(fmt::format("geometry.y0={} is not a mesh line for n={}", g.interface.y0, g.n));
  if (g.interface.kind == InterfaceSpec::Kind::KochPrefractal) {
    if (g.interface.level < 0 || g.interface.level > 5)
      v.push_back(fmt::format("geometry.level={} outside [0, 5]", g.interface.level));
    else {
      int span = 2;
      for (int i = 0; i < g.interface.level; ++i) span *= 3;
      if (g.n % span != 0)
        v.push_back(fmt::format("geometry.n={} must be a multiple of {} for Koch level {}", g.n, span,
                                g.interface.level));
    }
    if (!(g.interface.total_mass > 0.0))
      v.push_back(fmt::format("geometry.interface_mass={} must be > 0", g.interface.total_mass));
  }

  const auto& ph = physics;
  if (!(ph.s > 0.0 && ph.s < 1.0)) v.push_back(fmt::format("physics.s={} outside s ∈ (0,1)", ph.s));
  if (!(ph.d0 > 0.0)) v.push_back(fmt::format("physics.d0={} must satisfy d0 > 0", ph.d0));
  {
    const double tr = ph.d11 + ph.d22, det = ph.d11 * ph.d22 - ph.d12 * ph.d12;
    const double lmin = 0.5 * (tr - std::sqrt(std::max(0.0, tr * tr - 4.0 * det)));
    if (ph.d0 > 0.0 && lmin < ph.d0)
      v.push_back(fmt::format("physics: diffusion tensor eigenvalue {} below d0={}", lmin, ph.d0));
  }
  if (!(ph.beta0 >= 0.0)) v.push_back(fmt::format("physics.beta0={} must satisfy beta0 >= 0", ph.beta0));
  if (!(ph.beta >= ph.beta0))
    v.push_back(fmt::format("physics.beta={} must satisfy beta >= beta0={}", ph.beta, ph.beta0));
  if (ph.beta == 0.0 && g.dirichlet.empty())
    v.push_back("physics.beta=0 with geometry.dirichlet=none leaves the form non-coercive");
  if (ph.delta != 0 && ph.delta != 1) v.push_back(fmt::format("physics.delta={} must be 0 or 1", ph.delta));
  if (!(ph.c0 > 0.0 && ph.c0 <= ph.c1))
    v.push_back(fmt::format("physics: kernel constants need 0 < c0 <= c1 (c0={}, c1={})", ph.c0, ph.c1));

  if (initial.kind == InitialConfig::Kind::Eigen && initial.mode < 1)
    v.push_back(fmt::format("initial.mode={} must be >= 1", initial.mode));
  if (initial.kind == InitialConfig::Kind::File && initial.file.empty())
    v.push_back("initial.file is empty while initial.kind=file");
  if (!std::isfinite(initial.amplitude)) v.push_back("initial.amplitude must be finite");

  const auto& t = time;
  if (!(t.T > 0.0)) v.push_back(fmt::format("time.T={} must be > 0", t.T));
  if (!(t.dt_min > 0.0 && t.dt_min <= t.dt0 && t.dt0 <= t.dt_max))
    v.push_back(fmt::format("time: need 0 < dt_min <= dt0 <= dt_max (got {}, {}, {})", t.dt_min, t.dt0, t.dt_max));
  if (!(t.growth_cap > 1.0)) v.push_back(fmt::format("time.growth_cap={} must be > 1", t.growth_cap));
  if (!(t.blow_up_threshold > 0.0))
    v.push_back(fmt::format("time.blow_up_threshold={} must be > 0", t.blow_up_threshold));
  if (t.record_every < 1) v.push_back(fmt::format("time.record_every={} must be >= 1", t.record_every));

  const auto& a = analysis;
  if (a.spectrum_count < 1) v.push_back("analysis.spectrum_count must be >= 1");
  if (!(a.safety_factor >= 1.0)) v.push_back(fmt::format("analysis.safety_factor={} must be >= 1", a.safety_factor));
  if (!(a.eps_fraction > 0.0 && a.eps_fraction < 1.0))
    v.push_back(fmt::format("analysis.eps_fraction={} outside (0,1)", a.eps_fraction));
  if (a.zeta_trials < 1) v.push_back("analysis.zeta_trials must be >= 1");
  if (a.poincare_starts < 1 || a.poincare_iterations < 1) v.push_back("analysis: Poincare search sizes must be >= 1");
  if (!(a.alpha > 2.0)) v.push_back(fmt::format("analysis.alpha={} must exceed 2", a.alpha));
  if (a.alpha_scan < 0) v.push_back("analysis.alpha_scan must be >= 0");

  for (double x : sweep.p)
    if (x < 0.0) v.push_back(fmt::format("sweep.p contains {} < 0", x));
  for (double x : sweep.q)
    if (x < 0.0) v.push_back(fmt::format("sweep.q contains {} < 0", x));
  if (pairs.amplitudes.empty()) v.push_back("pairs.amplitudes is empty");
  if (!(pairs.distance > 0.0)) v.push_back("pairs.distance must be > 0");
  if (!(pairs.T > 0.0)) v.push_back("pairs.T must be > 0");
  if (jobs < 1) v.push_back(fmt::format("run.jobs={} must be >= 1", jobs));
  if (out.empty()) v.push_back("run.out is empty");
  return v;
}

std::string SimConfig::serialize() const {
  std::string s;
  std::string section;
  for (const auto& f : fields()) {
    if (section != f.section) {
      section = f.section;
      s += fmt::format("{}[{}]\n", s.empty() ? "" : "\n", section);
    }
    s += fmt::format("{} = {}\n", f.key, f.get(*this));
  }
  return s;
}

std::uint64_t SimConfig::hash() const {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : serialize()) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

SimConfig parse_config_text(const std::string& text, bool use_env) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    std::istringstream in(text);
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError({fmt::format("malformed config: {} (line {})", e.message(), e.line())});
  }
  SimConfig c;
  std::vector<std::string> problems;
  for (const auto& [section, body] : tree) {
    if (body.empty()) {
      problems.push_back(fmt::format("key '{}' outside any section", section));
      continue;
    }
    for (const auto& [key, value] : body) {
      const Field* f = find_field(section, key);
      if (!f) {
        problems.push_back(fmt::format("unknown key '{}' in section [{}]", key, section));
        continue;
      }
      apply(c, *f, value.data(), "file", problems);
    }
  }
  if (use_env)
    for (const auto& f : fields())
      if (const char* v = std::getenv(env_name(f).c_str())) apply(c, f, v, env_name(f), problems);
  for (auto& p : c.violations()) problems.push_back(std::move(p));
  if (!problems.empty()) throw ConfigError(problems);
  return c;
}

SimConfig parse_config(const std::string& path, bool use_env) {
  std::ifstream in(path);
  if (!in) throw ConfigError({fmt::format("cannot open config file '{}'", path)});
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), use_env);
}

}  // namespace transmission
