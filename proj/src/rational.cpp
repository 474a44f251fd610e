#include "satspec/rational.hpp"

#include <cstdint>

#include <fmt/format.h>

#include <regex>
#include <stdexcept>

namespace satspec {

Rational parse_rational(std::string_view text) {
  static const std::regex frac(R"(\s*([-+]?\d+)\s*/\s*(\d+)\s*)");
  static const std::regex dec(R"(\s*([-+]?)(\d*)(?:\.(\d*))?(?:[eE]([-+]?\d+))?\s*)");
  const std::string s(text);
  std::smatch m;
  if (std::regex_match(s, m, frac)) {
    mpz_class num(m[1].str()[0] == '+' ? m[1].str().substr(1) : m[1].str());
    mpz_class den(m[2].str());
    if (den == 0) throw std::invalid_argument("zero denominator in '" + s + "'");
    Rational r(num, den);
    r.canonicalize();
    return r;
  }
  if (std::regex_match(s, m, dec) && (m[2].length() > 0 || m[3].length() > 0)) {
    const std::string digits = m[2].str() + m[3].str();
    mpz_class mant(digits.empty() ? std::string("0") : digits);
    long exp10 = -static_cast<long>(m[3].length());
    if (m[4].matched) exp10 += std::stol(m[4].str());
    if (exp10 > 4096 || exp10 < -4096) throw std::invalid_argument("exponent out of range in '" + s + "'");
    mpz_class pow10;
    mpz_ui_pow_ui(pow10.get_mpz_t(), 10, static_cast<unsigned long>(exp10 < 0 ? -exp10 : exp10));
    Rational r = exp10 < 0 ? Rational(mant, pow10) : Rational(mant * pow10, 1);
    r.canonicalize();
    if (m[1].str() == "-") r = -r;
    return r;
  }
  throw std::invalid_argument("not a decimal or fraction: '" + s + "'");
}

std::string rational_str(const Rational& value) {
  Rational r = value;
  r.canonicalize();
  return r.get_num().get_str() + "/" + r.get_den().get_str();
}

nlohmann::json integer_json(const mpz_class& v) {
  if (v.fits_slong_p()) return nlohmann::json(static_cast<std::int64_t>(v.get_si()));
  return nlohmann::json(v.get_str());
}

mpz_class integer_from_json(const nlohmann::json& j) {
  if (j.is_number_integer()) return mpz_class(std::to_string(j.get<std::int64_t>()));
  if (j.is_string()) return mpz_class(j.get<std::string>());
  throw std::invalid_argument("expected an integer");
}

nlohmann::json rational_json(const Rational& value) {
  Rational r = value;
  r.canonicalize();
  return nlohmann::json::array({integer_json(r.get_num()), integer_json(r.get_den())});
}

Rational rational_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.size() != 2) throw std::invalid_argument("expected [num, den]");
  Rational r(integer_from_json(j[0]), integer_from_json(j[1]));
  if (r.get_den() == 0) throw std::invalid_argument("zero denominator");
  r.canonicalize();
  return r;
}

RationalDomain::RationalDomain(Vec3Q lengths) : lengths_(std::move(lengths)) {
  for (const auto& L : lengths_) {
    if (sgn(L) <= 0) throw std::invalid_argument("domain lengths must be positive");
  }
}

RationalDomain RationalDomain::parse(std::string_view csv) {
  Vec3Q L;
  std::size_t start = 0;
  for (int i = 0; i < 3; ++i) {
    const std::size_t comma = csv.find(',', start);
    const bool last = (i == 2);
    if (last != (comma == std::string_view::npos)) {
      throw std::invalid_argument("domain must be three comma-separated lengths");
    }
    L[i] = parse_rational(csv.substr(start, last ? std::string_view::npos : comma - start));
    start = comma + 1;
  }
  return RationalDomain(L);
}

DomainSpec RationalDomain::to_domain(double nu) const {
  return DomainSpec(lengths_[0].get_d(), lengths_[1].get_d(), lengths_[2].get_d(), nu);
}

std::string RationalDomain::str() const {
  return fmt::format("({}, {}, {})", lengths_[0].get_str(), lengths_[1].get_str(), lengths_[2].get_str());
}

}  // namespace satspec
