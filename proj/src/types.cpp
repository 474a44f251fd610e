#include "satspec/types.hpp"

#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

namespace satspec {

DomainSpec::DomainSpec(double L1, double L2, double L3, double nu) : DomainSpec(Vec3{L1, L2, L3}, nu) {}

DomainSpec::DomainSpec(const Vec3& lengths, double nu) : lengths_(lengths), nu_(nu) {
  for (double L : lengths_) {
    if (!(L > 0.0) || !std::isfinite(L)) {
      throw std::invalid_argument("DomainSpec: box lengths must be positive and finite");
    }
  }
  if (!(nu_ > 0.0) || !std::isfinite(nu_)) {
    throw std::invalid_argument("DomainSpec: viscosity must be positive and finite");
  }
}

Vec3 Frequency::scaled(const DomainSpec& domain) const {
  return {n[0] / domain.length(0), n[1] / domain.length(1), n[2] / domain.length(2)};
}

std::string Frequency::str() const { return fmt::format("({},{},{})", n[0], n[1], n[2]); }

std::string ModeIndex::str() const { return fmt::format("Y^{{{},{}}}", j, k.str()); }

}  // namespace satspec
