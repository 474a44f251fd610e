#pragma once

// Exact rationals for certificate arithmetic. Lengths given as decimal strings ("1.41421356")
// or fractions ("11/3") are converted without rounding.

#include <gmpxx.h>

#include <array>
#include <string>
#include <string_view>

#include "json.hpp"

#include "satspec/types.hpp"

namespace satspec {

using Rational = mpq_class;
using Vec3Q = std::array<Rational, 3>;

/// Parse "-12", "3.25", "1e-3", "2.5E+2" or "7/5" exactly. Throws std::invalid_argument.
Rational parse_rational(std::string_view text);

/// "num/den" in lowest terms ("3/1" for integers).
std::string rational_str(const Rational& r);

/// JSON integer when it fits in 64 bits, decimal string otherwise.
nlohmann::json integer_json(const mpz_class& v);
mpz_class integer_from_json(const nlohmann::json& j);
/// [num, den] in lowest terms.
nlohmann::json rational_json(const Rational& r);
Rational rational_from_json(const nlohmann::json& j);

class RationalDomain {
 public:
  explicit RationalDomain(Vec3Q lengths);
  /// Comma-separated lengths, e.g. "1,2,3" or "7/5,11/3,2".
  static RationalDomain parse(std::string_view csv);

  const Vec3Q& lengths() const { return lengths_; }
  const Rational& length(std::size_t axis) const { return lengths_[axis]; }
  /// Nearest-double conversion.
  DomainSpec to_domain(double nu = 1.0) const;
  std::string str() const;

 private:
  Vec3Q lengths_;
};

}  // namespace satspec
