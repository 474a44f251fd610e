#pragma once

// Exact replay of the explicit witness choices in the induction step C^q -> C^{q+1}.
// Every z vector is kept divided by pi and every determinant divided by pi^2.
//
// Display groups (n is the generated frequency):
//   base-step             n = (1,1,q+1)
//   step1-induction       n = (1,l,q+1), 2 <= l <= q
//   step1-induction-mirror n = (l,1,q+1), 2 <= l <= q (axes 1 and 2 exchanged)
//   step2                 n = (n1,n2,q+1), 2 <= n1,n2 <= q
//   part2                 n = (l,q+1,q+1), 1 <= l <= q
//   part3                 n = (q+1,q+1,q+1)

#include <optional>
#include <string>
#include <vector>

#include "satspec/rational.hpp"
#include "satspec/saturation.hpp"

namespace satspec {

struct TraceCheck {
  std::string display;  // e.g. "part2/z_alpha"
  std::string params;   // e.g. "q=4 l=2"
  std::string computed;
  std::string printed;
  bool matches_printed = false;
  /// Set when a corrected closed form is known for this display.
  std::optional<bool> matches_corrected;
  std::string corrected;
};

struct TraceReport {
  int q = 0;
  std::vector<TraceCheck> checks;
  std::vector<Certificate> certificates;

  std::vector<const TraceCheck*> mismatches() const;
  bool ok() const { return mismatches().empty(); }
};

/// Requires q >= 3.
TraceReport paper_trace(int q, const RationalDomain& domain);

std::string vec_str(const Vec3Q& v);

}  // namespace satspec
