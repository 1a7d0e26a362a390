#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace transmission {

// One term of a generalized polynomial in tau:
//   odd:  coef * |tau|^power * tau
//   even: coef * |tau|^power
struct PowerTerm {
  double coef = 0.0;
  double power = 0.0;
  bool odd = true;

  // Growth exponent at infinity.
  double growth() const { return odd ? power + 1.0 : power; }
  friend bool operator==(const PowerTerm&, const PowerTerm&) = default;
};

struct LeadingData {
  double exponent = 0.0;     // p or q: f(tau) ~ c |tau|^exponent tau
  double coefficient = 0.0;  // c_h or c_f
};

// Dominant behavior on one side of the real line.
struct Tail {
  double growth = 0.0;
  double coefficient = 0.0;  // sign of the function far out on that side
  bool zero = true;          // identically zero
};

// Finite sum of PowerTerms with like terms merged and zero terms dropped.
// Closed under sums, products, primitives and derivatives, which keeps every
// inequality the regime checks evaluate inside this class.
class PowerSeries {
 public:
  PowerSeries() = default;
  explicit PowerSeries(std::vector<PowerTerm> terms);

  static PowerSeries constant(double c) { return PowerSeries({{c, 0.0, false}}); }
  static PowerSeries odd_power(double coef, double power) { return PowerSeries({{coef, power, true}}); }
  static PowerSeries even_power(double coef, double power) { return PowerSeries({{coef, power, false}}); }
  // tau^2
  static PowerSeries square() { return even_power(1.0, 2.0); }

  const std::vector<PowerTerm>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  // All powers nonnegative integers.
  bool integer_powers() const;

  double operator()(double tau) const;
  void evaluate(std::span<const double> tau, std::span<double> out) const;

  PowerSeries derivative() const;
  // Antiderivative vanishing at 0.
  PowerSeries primitive() const;

  PowerSeries operator+(const PowerSeries& o) const;
  PowerSeries operator-(const PowerSeries& o) const;
  PowerSeries operator*(const PowerSeries& o) const;
  PowerSeries operator*(double s) const;
  friend PowerSeries operator*(double s, const PowerSeries& p) { return p * s; }
  friend bool operator==(const PowerSeries&, const PowerSeries&) = default;

  // side = +1 for tau -> +inf, -1 for tau -> -inf.
  Tail tail(int side) const;

  std::string to_string() const;

 private:
  void normalize();
  std::vector<PowerTerm> terms_;
};

// f or h with derivative and primitive available in closed form.
class Nonlinearity {
 public:
  Nonlinearity() = default;
  explicit Nonlinearity(PowerSeries value);

  static Nonlinearity zero() { return Nonlinearity(); }
  // coef * |tau|^power * tau
  static Nonlinearity power(double coef, double power) {
    return Nonlinearity(PowerSeries::odd_power(coef, power));
  }

  double value(double tau) const { return value_(tau); }
  double derivative(double tau) const { return derivative_(tau); }
  double primitive(double tau) const { return primitive_(tau); }

  const PowerSeries& series() const { return value_; }
  const PowerSeries& derivative_series() const { return derivative_; }
  const PowerSeries& primitive_series() const { return primitive_; }

  void evaluate(std::span<const double> tau, std::span<double> out) const {
    value_.evaluate(tau, out);
  }

  bool is_zero() const { return value_.is_zero(); }
  bool polynomial() const { return value_.integer_powers(); }

  // (exponent, coefficient) of the odd term of highest growth, when that term
  // dominates every even term; nullopt otherwise.
  std::optional<LeadingData> leading() const;

  friend bool operator==(const Nonlinearity& a, const Nonlinearity& b) { return a.value_ == b.value_; }

 private:
  PowerSeries value_;
  PowerSeries derivative_;
  PowerSeries primitive_;
};

}  // namespace transmission
