#pragma once

#include <cmath>
#include <cstdlib>
#include <sstream>
#include <string>
#include <vector>

#include "prequant/exact.hpp"

namespace prequant {

/// Rules for promoting a float quadrature result to an exact value.
/// Order of preference: declared targets (including small integer
/// multiples, both signs), exact zero, bounded-denominator rationals,
/// and finally a fresh numeric symbol with a warning.
struct SnappingPolicy {
  SymbolTablePtr table;
  double tolerance = 1e-5;
  std::vector<ExactReal> targets;
  int multiple_limit = 8;
  unsigned denominator_limit = 0;  // 0 disables the rational grid
};

struct SnapResult {
  ExactReal value;
  bool fresh = false;
  std::string warning;  // nonempty only when fresh
};

inline SnapResult snap(const SnappingPolicy& policy, double v) {
  for (const auto& target : policy.targets) {
    const double t = target.value();
    for (int m = 1; m <= policy.multiple_limit; ++m) {
      if (std::abs(v - m * t) <= policy.tolerance)
        return {target * mpq_class(m), false, ""};
      if (std::abs(v + m * t) <= policy.tolerance)
        return {target * mpq_class(-m), false, ""};
    }
  }
  if (std::abs(v) <= policy.tolerance)
    return {ExactReal(policy.table), false, ""};
  for (unsigned q = 1; q <= policy.denominator_limit; ++q) {
    const double scaled = v * q;
    const double p = std::nearbyint(scaled);
    if (std::abs(scaled - p) <= policy.tolerance * q &&
        std::abs(p) < 9.0e15) {
      return {ExactReal(policy.table,
                        make_rational(static_cast<long>(p), static_cast<long>(q))),
              false, ""};
    }
  }
  const size_t idx = policy.table->add_fresh(v);
  std::ostringstream os;
  os << "value " << v << " matched no declared constant or bounded rational;"
     << " admitted as fresh symbol '" << policy.table->symbol(idx).name << "'";
  return {ExactReal::symbol(policy.table, idx), true, os.str()};
}

}  // namespace prequant
