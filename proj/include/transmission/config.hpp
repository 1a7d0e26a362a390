#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "transmission/assembly.hpp"
#include "transmission/geometry.hpp"
#include "transmission/nonlinearity.hpp"

namespace transmission {

enum class Mode { Simulate, Spectrum, Constants, Classify, Sweep, Pairs };
std::string to_string(Mode m);
Mode parse_mode(const std::string& s);  // throws ConfigError

struct GeometryConfig {
  int n = 32;
  InterfaceSpec interface = InterfaceSpec::segment(0.5);
  DirichletSides dirichlet{};
  friend bool operator==(const GeometryConfig&, const GeometryConfig&) = default;
};

struct PhysicsConfig {
  double d11 = 1.0, d12 = 0.0, d22 = 1.0;
  double d0 = 1.0;
  double beta = 1.0;
  double beta0 = 1.0;
  double s = 0.5;
  KernelSpec::Rule kernel = KernelSpec::Rule::PowerLaw;
  double c0 = 1.0, c1 = 1.0;
  int delta = 1;
  friend bool operator==(const PhysicsConfig&, const PhysicsConfig&) = default;
};

struct InitialConfig {
  enum class Kind { Eigen, File, Expr };
  Kind kind = Kind::Eigen;
  int mode = 1;            // 1-based eigenvector index
  double amplitude = 1.0;  // sup norm of the eigenvector multiple
  std::string file;        // one value per mesh vertex, one per line
  std::string expr = "sin(pi*x)*sin(pi*y)";
  friend bool operator==(const InitialConfig&, const InitialConfig&) = default;
};

struct TimeConfig {
  double T = 1.0;
  double dt0 = 1e-3;
  double dt_min = 1e-18;
  double dt_max = 0.1;
  double growth_cap = 1.5;
  double blow_up_threshold = 1e8;
  int record_every = 1;
  friend bool operator==(const TimeConfig&, const TimeConfig&) = default;
};

struct AnalysisConfig {
  int spectrum_count = 20;
  double safety_factor = 2.0;
  double eps_fraction = 0.5;
  int zeta_trials = 20;
  int poincare_starts = 50;
  int poincare_iterations = 200;
  double alpha = 3.0;
  int alpha_scan = 8;
  friend bool operator==(const AnalysisConfig&, const AnalysisConfig&) = default;
};

struct SweepConfig {
  enum class Axis { PQ, Coefficients };
  Axis axis = Axis::PQ;
  std::vector<double> p{0.0, 1.0};
  std::vector<double> q{1.0, 2.0, 3.0};
  std::vector<double> c_f{1.0};
  std::vector<double> c_h{1.0};
  bool simulate = false;
  friend bool operator==(const SweepConfig&, const SweepConfig&) = default;
};

struct PairsConfig {
  std::vector<double> amplitudes{1.0, 10.0, 50.0};
  double distance = 1e-2;
  double T = 10.0;
  friend bool operator==(const PairsConfig&, const PairsConfig&) = default;
};

struct SimConfig {
  Mode mode = Mode::Simulate;
  std::string out = "out";
  std::uint64_t seed = 1;
  int jobs = 1;
  GeometryConfig geometry;
  PhysicsConfig physics;
  PowerSeries f = PowerSeries::odd_power(1.0, 2.0);
  PowerSeries h = PowerSeries::odd_power(-1.0, 0.0);
  InitialConfig initial;
  TimeConfig time;
  AnalysisConfig analysis;
  SweepConfig sweep;
  PairsConfig pairs;

  // Every violation, not only the first. Empty when valid.
  std::vector<std::string> violations() const;
  std::string serialize() const;
  // Stable FNV-1a hash of serialize().
  std::uint64_t hash() const;

  friend bool operator==(const SimConfig&, const SimConfig&) = default;
};

// Polynomial text: terms separated by '+' or '-' of the form
//   c, c*u, c*u^k (odd extension c|u|^{k-1}u), c*|u|^k (even).
PowerSeries parse_series(const std::string& text);
std::string format_series(const PowerSeries& p);

// INI text with sections [run] [geometry] [physics] [f] [h] [initial] [time]
// [analysis] [sweep] [pairs]. Environment variables TRANSMISSION_<SECTION>_<KEY>
// override file values when `use_env` is set. Throws ConfigError listing every
// problem.
SimConfig parse_config_text(const std::string& text, bool use_env = true);
SimConfig parse_config(const std::string& path, bool use_env = true);

inline constexpr const char* kEnvPrefix = "TRANSMISSION_";

}  // namespace transmission
