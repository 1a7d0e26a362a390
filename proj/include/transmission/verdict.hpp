#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace transmission {

enum class Verdict { GlobalBounded, BlowUpPredicted, Indeterminate };

inline std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::GlobalBounded: return "GlobalBounded";
    case Verdict::BlowUpPredicted: return "BlowUpPredicted";
    case Verdict::Indeterminate: return "Indeterminate";
  }
  return "?";
}

inline std::optional<Verdict> parse_verdict(std::string_view s) {
  if (s == "GlobalBounded") return Verdict::GlobalBounded;
  if (s == "BlowUpPredicted") return Verdict::BlowUpPredicted;
  if (s == "Indeterminate") return Verdict::Indeterminate;
  return std::nullopt;
}

}  // namespace transmission
