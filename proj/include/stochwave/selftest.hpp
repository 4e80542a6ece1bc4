#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace stochwave {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct SelftestReport {
  std::vector<CheckResult> checks;

  bool all_passed() const;
};

/// Runs the invariant suite: trigonometric identity, group law, H-isometry,
/// transform round trip, the gamma = 1 operator Hoelder bound, CN energy
/// conservation and LIE dissipation, componentwise/abstract EE equivalence,
/// additive reduction of G dW, collocation-vs-quadrature Nemytskij agreement,
/// exact noise coarsening and bit reproducibility. Finishes in a few seconds.
SelftestReport run_selftest();

void print_selftest(std::ostream& os, const SelftestReport& report);

}  // namespace stochwave
