#include "transmission/nonlinearity.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "transmission/kernels/kernels.hpp"

namespace transmission {

namespace {

double term_value(const PowerTerm& t, double tau) {
  const double a = std::abs(tau);
  if (a == 0.0) {
    // |tau|^p tau -> 0 for p > -1; even term with p == 0 is the constant.
    if (t.odd) return 0.0;
    return t.power == 0.0 ? t.coef : (t.power > 0.0 ? 0.0 : HUGE_VAL);
  }
  const double mag = (t.power == 0.0) ? 1.0 : std::pow(a, t.power);
  return t.odd ? t.coef * mag * tau : t.coef * mag;
}

bool is_nonneg_integer(double p) { return p >= 0.0 && p == std::floor(p) && p < 64.0; }

}  // namespace

PowerSeries::PowerSeries(std::vector<PowerTerm> terms) : terms_(std::move(terms)) { normalize(); }

void PowerSeries::normalize() {
  std::sort(terms_.begin(), terms_.end(), [](const PowerTerm& a, const PowerTerm& b) {
    if (a.power != b.power) return a.power < b.power;
    return a.odd < b.odd;
  });
  std::vector<PowerTerm> merged;
  for (const auto& t : terms_) {
    if (!merged.empty() && merged.back().power == t.power && merged.back().odd == t.odd)
      merged.back().coef += t.coef;
    else
      merged.push_back(t);
  }
  std::erase_if(merged, [](const PowerTerm& t) { return t.coef == 0.0; });
  terms_ = std::move(merged);
}

bool PowerSeries::integer_powers() const {
  return std::all_of(terms_.begin(), terms_.end(),
                     [](const PowerTerm& t) { return is_nonneg_integer(t.power); });
}

double PowerSeries::operator()(double tau) const {
  double s = 0.0;
  for (const auto& t : terms_) s += term_value(t, tau);
  return s;
}

void PowerSeries::evaluate(std::span<const double> tau, std::span<double> out) const {
  std::fill(out.begin(), out.end(), 0.0);
  const auto& k = kernels::active();
  for (const auto& t : terms_) {
    if (is_nonneg_integer(t.power)) {
      const auto p = static_cast<unsigned>(t.power);
      if (t.odd)
        k.odd_power_accumulate(t.coef, p, tau.data(), out.data(), tau.size());
      else
        k.even_power_accumulate(t.coef, p, tau.data(), out.data(), tau.size());
    } else {
      for (std::size_t i = 0; i < tau.size(); ++i) out[i] += term_value(t, tau[i]);
    }
  }
}

PowerSeries PowerSeries::derivative() const {
  std::vector<PowerTerm> d;
  for (const auto& t : terms_) {
    if (t.odd) {
      // d/dtau c|tau|^p tau = c (p+1) |tau|^p
      d.push_back({t.coef * (t.power + 1.0), t.power, false});
    } else if (t.power != 0.0) {
      // d/dtau c|tau|^p = c p |tau|^(p-2) tau
      d.push_back({t.coef * t.power, t.power - 2.0, true});
    }
  }
  return PowerSeries(std::move(d));
}

PowerSeries PowerSeries::primitive() const {
  std::vector<PowerTerm> r;
  for (const auto& t : terms_) {
    if (t.odd)
      r.push_back({t.coef / (t.power + 2.0), t.power + 2.0, false});
    else
      r.push_back({t.coef / (t.power + 1.0), t.power, true});
  }
  return PowerSeries(std::move(r));
}

PowerSeries PowerSeries::operator+(const PowerSeries& o) const {
  std::vector<PowerTerm> all = terms_;
  all.insert(all.end(), o.terms_.begin(), o.terms_.end());
  return PowerSeries(std::move(all));
}

PowerSeries PowerSeries::operator-(const PowerSeries& o) const { return *this + o * -1.0; }

PowerSeries PowerSeries::operator*(double s) const {
  std::vector<PowerTerm> r = terms_;
  for (auto& t : r) t.coef *= s;
  return PowerSeries(std::move(r));
}

PowerSeries PowerSeries::operator*(const PowerSeries& o) const {
  std::vector<PowerTerm> r;
  for (const auto& a : terms_)
    for (const auto& b : o.terms_) {
      const double c = a.coef * b.coef;
      if (a.odd && b.odd)
        r.push_back({c, a.power + b.power + 2.0, false});  // |t|^a t |t|^b t = |t|^(a+b+2)
      else if (a.odd || b.odd)
        r.push_back({c, a.power + b.power, true});
      else
        r.push_back({c, a.power + b.power, false});
    }
  return PowerSeries(std::move(r));
}

Tail PowerSeries::tail(int side) const {
  Tail out;
  // Terms sorted by power; group by growth exponent.
  std::vector<std::pair<double, double>> by_growth;
  for (const auto& t : terms_) {
    const double signed_coef = (t.odd && side < 0) ? -t.coef : t.coef;
    auto it = std::find_if(by_growth.begin(), by_growth.end(),
                           [&](const auto& g) { return g.first == t.growth(); });
    if (it == by_growth.end())
      by_growth.emplace_back(t.growth(), signed_coef);
    else
      it->second += signed_coef;
  }
  for (const auto& [g, c] : by_growth) {
    if (c == 0.0) continue;
    if (out.zero || g > out.growth) {
      out.growth = g;
      out.coefficient = c;
      out.zero = false;
    }
  }
  return out;
}

std::string PowerSeries::to_string() const {
  if (terms_.empty()) return "0";
  std::string s;
  for (const auto& t : terms_) {
    if (!s.empty()) s += " + ";
    if (t.odd)
      s += fmt::format("{:g}*|u|^{:g}*u", t.coef, t.power);
    else
      s += fmt::format("{:g}*|u|^{:g}", t.coef, t.power);
  }
  return s;
}

Nonlinearity::Nonlinearity(PowerSeries value)
    : value_(std::move(value)), derivative_(value_.derivative()), primitive_(value_.primitive()) {}

std::optional<LeadingData> Nonlinearity::leading() const {
  const auto& terms = value_.terms();
  const PowerTerm* best = nullptr;
  for (const auto& t : terms)
    if (t.odd && (best == nullptr || t.power > best->power)) best = &t;
  if (best == nullptr) return std::nullopt;
  for (const auto& t : terms)
    if (!t.odd && t.growth() >= best->growth()) return std::nullopt;
  return LeadingData{best->power, best->coef};
}

}  // namespace transmission
