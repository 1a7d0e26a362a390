#include "transmission/errors.hpp"

namespace transmission {

namespace {

std::string join(const std::vector<std::string>& problems) {
  std::string s;
  for (const auto& p : problems) {
    if (!s.empty()) s += "; ";
    s += p;
  }
  return s;
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> problems_in)
    : Error(join(problems_in)), problems(std::move(problems_in)) {}

}  // namespace transmission
