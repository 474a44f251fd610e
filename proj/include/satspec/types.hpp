#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <string>

namespace satspec {

using Vec3 = std::array<double, 3>;

/// Box (0,L1)x(0,L2)x(0,L3) with kinematic viscosity nu.
class DomainSpec {
 public:
  DomainSpec(double L1, double L2, double L3, double nu = 1.0);
  explicit DomainSpec(const Vec3& lengths, double nu = 1.0);

  const Vec3& lengths() const { return lengths_; }
  double length(std::size_t axis) const { return lengths_[axis]; }
  double nu() const { return nu_; }
  double volume() const { return lengths_[0] * lengths_[1] * lengths_[2]; }

  DomainSpec with_nu(double nu) const { return DomainSpec(lengths_, nu); }

 private:
  Vec3 lengths_;
  double nu_;
};

/// Nonnegative integer frequency triple.
struct Frequency {
  std::array<int, 3> n{0, 0, 0};

  constexpr Frequency() = default;
  constexpr Frequency(int a, int b, int c) : n{a, b, c} {}

  constexpr int operator[](std::size_t i) const { return n[i]; }

  /// Number of vanishing components (#0).
  constexpr int num_zero() const {
    return (n[0] == 0) + (n[1] == 0) + (n[2] == 0);
  }
  constexpr int max_component() const {
    int m = n[0];
    if (n[1] > m) m = n[1];
    if (n[2] > m) m = n[2];
    return m;
  }
  constexpr bool is_zero() const { return n[0] == 0 && n[1] == 0 && n[2] == 0; }

  /// (k1/L1, k2/L2, k3/L3)
  Vec3 scaled(const DomainSpec& domain) const;

  std::string str() const;

  friend constexpr auto operator<=>(const Frequency&, const Frequency&) = default;
};

/// Eigenmode label (branch j, frequency k). Ordered by k, then j.
struct ModeIndex {
  int j = 1;
  Frequency k;

  std::string str() const;

  friend constexpr bool operator==(const ModeIndex& a, const ModeIndex& b) = default;
  friend constexpr std::strong_ordering operator<=>(const ModeIndex& a, const ModeIndex& b) {
    if (auto c = a.k <=> b.k; c != 0) return c;
    return a.j <=> b.j;
  }
};

/// Number of eigenfunction branches at frequency k (2 - #0(k)), 0 if inadmissible.
constexpr int branch_count(const Frequency& k) {
  const int z = k.num_zero();
  return z <= 1 ? 2 - z : 0;
}

inline double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

}  // namespace satspec
