#pragma once

#include <cmath>
#include <string_view>

namespace dissext {

/// Three-valued outcome of every dissipativity test. Equality cases of the
/// criterion cannot be resolved in floating point, so they get their own
/// value.
enum class Decision { dissipative, not_dissipative, boundary };

/// |margin| <= band is boundary; otherwise the sign decides.
inline Decision classify(double margin, double band) {
  if (std::abs(margin) <= band) return Decision::boundary;
  return margin > 0 ? Decision::dissipative : Decision::not_dissipative;
}

inline std::string_view to_string(Decision d) {
  switch (d) {
    case Decision::dissipative: return "dissipative";
    case Decision::not_dissipative: return "not_dissipative";
    case Decision::boundary: return "boundary";
  }
  return "?";
}

/// Same decision, worded for accretivity (iA dissipative).
inline std::string_view to_accretive_string(Decision d) {
  switch (d) {
    case Decision::dissipative: return "accretive";
    case Decision::not_dissipative: return "not_accretive";
    case Decision::boundary: return "boundary";
  }
  return "?";
}

/// True when two decisions do not contradict each other (boundary is
/// compatible with anything).
inline bool compatible(Decision a, Decision b) {
  return a == b || a == Decision::boundary || b == Decision::boundary;
}

}  // namespace dissext
