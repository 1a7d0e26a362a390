#pragma once

#include <filesystem>
#include <iosfwd>

#include "transmission/assembly.hpp"
#include "transmission/config.hpp"
#include "transmission/constants.hpp"
#include "transmission/dynamics.hpp"
#include "transmission/geometry.hpp"
#include "transmission/nonlinearity.hpp"

namespace transmission {

enum ExitCode : int { kExitOk = 0, kExitFailure = 1, kExitConfig = 2, kExitNumeric = 3, kExitBlowUp = 4 };

struct Problem {
  MeshedDomain mesh;
  InterfaceMeasure measure;
  DiscreteOperator full;  // before eliminating Gamma_D
  DiscreteOperator op;
};

Problem build_problem(const SimConfig& c);
// Initial datum on the free DOFs of `p.op`.
Vec initial_datum(const SimConfig& c, const Problem& p);
StepControl step_control(const SimConfig& c);
ConstantsReport constants_for(const SimConfig& c, const Problem& p);

// Dispatches on c.mode and writes artifacts under c.out. Messages go to `log`
// (stdout in the CLI); a timestamped copy goes to <out>/run.log.
int run(const SimConfig& c, std::ostream& log);

}  // namespace transmission
