#pragma once

// Stokes eigenbasis of a 3D box under Lions boundary conditions.
//
//   Y^{j,k}(x) = ( w1 S1(k1) C2(k2) C3(k3),
//                  w2 C1(k1) S2(k2) C3(k3),
//                  w3 C1(k1) C2(k2) S3(k3) ),   Si(a) = sin(a pi xi / Li), Ci likewise,
//
// with w [L]-orthogonal to k (sum_i wi ki / Li = 0) and wi = 0 wherever ki = 0.
// Amplitudes are kept unnormalized; l2_norm_sq() supplies the L2 weight.

#include <array>
#include <stdexcept>
#include <vector>

#include "satspec/types.hpp"

namespace satspec {

/// Trigonometric vector field (z1 psi1^n, z2 psi2^n, z3 psi3^n); z is unconstrained.
struct TrigVectorField {
  Frequency n;
  Vec3 z{0.0, 0.0, 0.0};
};

class EigenMode {
 public:
  /// Canonical branch j of frequency k (see perp_basis).
  static EigenMode canonical(const Frequency& k, int j, const DomainSpec& domain);
  /// Mode with a caller-chosen admissible amplitude. Throws if w is not in {k}-perp.
  static EigenMode with_amplitude(const Frequency& k, const Vec3& w, const DomainSpec& domain,
                                  int j = 1);

  const Frequency& k() const { return k_; }
  int j() const { return j_; }
  const Vec3& w() const { return w_; }
  double norm_sq() const { return norm_sq_; }
  ModeIndex index() const { return ModeIndex{j_, k_}; }

  TrigVectorField as_field() const { return TrigVectorField{k_, w_}; }
  EigenMode scaled(double factor, const DomainSpec& domain) const;

 private:
  EigenMode(const Frequency& k, int j, const Vec3& w, double norm_sq)
      : k_(k), j_(j), w_(w), norm_sq_(norm_sq) {}

  Frequency k_;
  int j_;
  Vec3 w_;
  double norm_sq_;
};

/// { n : 0 <= n_i <= max_per_axis, #0(n) <= 1 }, lexicographically sorted.
std::vector<Frequency> enumerate_frequencies(int max_per_axis, const DomainSpec& domain);

/// All canonical modes whose frequency is in enumerate_frequencies(max_per_axis), sorted by index.
std::vector<EigenMode> enumerate_modes(int max_per_axis, const DomainSpec& domain);

/// Canonical amplitude basis of {k}-perp_[L] (length 2 - #0(k)).
std::vector<Vec3> perp_basis(const Frequency& k, const DomainSpec& domain);

/// nu pi^2 |k^L|^2
double eigenvalue(const Frequency& k, const DomainSpec& domain);

Vec3 evaluate(const TrigVectorField& field, const Vec3& x, const DomainSpec& domain);
Vec3 evaluate(const EigenMode& mode, const Vec3& x, const DomainSpec& domain);

/// Integral of psi_i^n squared over the box.
double psi_norm_sq(const Frequency& n, int component, const DomainSpec& domain);

double l2_norm_sq(const TrigVectorField& field, const DomainSpec& domain);
double l2_norm_sq(const EigenMode& mode, const DomainSpec& domain);

/// (w, k)_[L]
double l_inner(const Vec3& w, const Frequency& k, const DomainSpec& domain);

/// Scalar-generic canonical basis; shared by the floating-point and exact-rational paths.
///
/// #0(k)=1 with k_i=0: one vector on the two active axes a<b, (w_a, w_b) = (-k_b L_a, k_a L_b).
/// #0(k)=0: w1 = (-k2 L1, k1 L2, 0), w2 = Gram-Schmidt of (-k3 L1, 0, k1 L3) against w1.
template <class Scalar>
std::vector<std::array<Scalar, 3>> perp_basis_generic(const Frequency& k,
                                                      const std::array<Scalar, 3>& L) {
  using V = std::array<Scalar, 3>;
  if (k.is_zero() || k.num_zero() >= 2) {
    throw std::invalid_argument("perp_basis: frequency " + k.str() + " has #0 >= 2");
  }
  if (k.num_zero() == 1) {
    int a = -1;
    int b = -1;
    for (int i = 0; i < 3; ++i) {
      if (k[i] == 0) continue;
      (a < 0 ? a : b) = i;
    }
    V w{Scalar(0), Scalar(0), Scalar(0)};
    w[a] = Scalar(-k[b]) * L[a];
    w[b] = Scalar(k[a]) * L[b];
    return {w};
  }
  V w1{Scalar(-k[1]) * L[0], Scalar(k[0]) * L[1], Scalar(0)};
  V v{Scalar(-k[2]) * L[0], Scalar(0), Scalar(k[0]) * L[2]};
  Scalar vw = v[0] * w1[0] + v[1] * w1[1] + v[2] * w1[2];
  Scalar ww = w1[0] * w1[0] + w1[1] * w1[1] + w1[2] * w1[2];
  Scalar c = vw / ww;
  V w2{v[0] - c * w1[0], v[1] - c * w1[1], v[2] - c * w1[2]};
  return {w1, w2};
}

}  // namespace satspec
