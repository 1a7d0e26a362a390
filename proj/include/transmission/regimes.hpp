#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "transmission/constants.hpp"
#include "transmission/nonlinearity.hpp"
#include "transmission/verdict.hpp"

namespace transmission {

// Sound supremum of a PowerSeries over the real line: dense grid with local
// refinement inside the radius where the dominant term takes over, plus a
// tail bound beyond it.
struct SeriesBound {
  double value = 0.0;
  double argmax = 0.0;
  bool finite = true;
  double tail_radius = 0.0;
};
SeriesBound series_sup(const PowerSeries& p);

struct DerivedFunctions {
  PowerSeries g;        // -f tau + alpha fbar
  PowerSeries l;        // -h tau + alpha hbar
  PowerSeries l_prime;
};

DerivedFunctions derived_functions(const Nonlinearity& f, const Nonlinearity& h, double alpha);

// Problem data the inequalities consume.
struct RegimeContext {
  double total_mass = 1.0;  // mu_Sigma(Sigma)
  double area = 1.0;        // |Omega|
  double d0 = 1.0;
  double C_star = 0.0;
  double C_bar = 0.0;
  double eps = 0.5;         // for the balance and dissipativity checks
  double C_tilde = 0.0;     // lambda_1 of (A, M_bulk + M_iface)
  double e0 = 0.0;          // E(0)
  double x2_sq = 0.0;       // ||U0||^2 in X2
  // (theta, lambda_1 of A + theta M_bulk); empty falls back to C_tilde.
  std::vector<std::pair<double, double>> bulk_shift;

  // Largest mu with kappa A(U,U) + C1 |u|^2_bulk >= mu |U|^2_X2 for all U,
  // read conservatively off the table.
  double blowup_rate(double kappa, double C1) const;

  static RegimeContext from(const ConstantsReport& c, double e0, double x2_sq);
};

using Certificate = std::map<std::string, double>;

struct SubVerdict {
  bool fired = false;
  std::string rule;
  Certificate certificate;
  std::vector<std::string> notes;
  double margin = -HUGE_VAL;  // blow-up paths: D1 ||U0||^2 - (alpha E0 + D2)
};

// Balance-condition sampling: the left side for a given m.
PowerSeries balance_lhs(const Nonlinearity& f, const Nonlinearity& h, double m, const RegimeContext& ctx);
PowerSeries dissipative_lhs(const Nonlinearity& f, const Nonlinearity& h, double eps, const RegimeContext& ctx);
PowerSeries blowup_lhs(const DerivedFunctions& d, double eps, const RegimeContext& ctx);

// Smallest point beyond which f and h agree with their dominant terms to 10%.
double large_tau_threshold(const Nonlinearity& f, const Nonlinearity& h);

SubVerdict check_global(const Nonlinearity& f, const Nonlinearity& h, const RegimeContext& ctx);

struct DissipativeResult {
  bool ok = false;
  double lambda_star = 0.0;
  double C_fh = 0.0;
  double witness = 0.0;  // where the left side outgrows tau^2
  bool superquadratic = false;
};

DissipativeResult check_dissipative(const Nonlinearity& f, const Nonlinearity& h, double eps,
                                    const RegimeContext& ctx);

// Both blow-up paths at one alpha, scanning eps and the free constants.
SubVerdict check_blowup(const Nonlinearity& f, const Nonlinearity& h, double alpha, const RegimeContext& ctx);

struct RegimeVerdict {
  Verdict verdict = Verdict::Indeterminate;
  std::string rule_fired = "none";
  Certificate certificate;
  double threshold_value = 0.0;
  double lhs_value = 0.0;
  double e0 = 0.0;
  std::string conflict;
  std::vector<std::string> notes;

  std::string serialize() const;
};

struct ClassifyOptions {
  double alpha = 3.0;
  int alpha_scan = 8;  // extra alphas tried in (2, q+2)
};

RegimeVerdict classify(const Nonlinearity& f, const Nonlinearity& h, const RegimeContext& ctx,
                       const ClassifyOptions& options = {});

struct ReplayReport {
  double max_relative_violation = 0.0;
  int samples = 0;
  int inequalities = 0;
};

// Re-checks every inequality named by the certificate at fresh random tau.
ReplayReport replay_certificate(const RegimeVerdict& v, const Nonlinearity& f, const Nonlinearity& h,
                                int samples = 10000, std::uint64_t seed = 1);

}  // namespace transmission
