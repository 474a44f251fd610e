#pragma once

// Advection interactions between eigenmodes and their Leray projection.
//
// For modes Y^k (amplitude wk) and Y^m (amplitude wm),
//
//   (Y^k.grad)Y^m + (Y^m.grad)Y^k
//     = sum_{s in {+,-}^3} sum_i (s_i wm_i beta^s_{wk,m} + wk_i beta^s_{wm,k}) psi_i^{k + s m},
//
//   beta^s_{w,m} = (pi/8) (s1 w1 m1/L1 + s2 w2 m2/L2 + s3 w3 m3/L3),
//
// where psi_i^{k+sm} is the sin/cos product with frequencies k_e + s_e m_e. Negative
// frequencies fold onto |k_e + s_e m_e|; a sine factor contributes sign(k_i + s_i m_i).

#include <functional>
#include <map>
#include <stdexcept>
#include <vector>

#include "satspec/spectral_basis.hpp"
#include "satspec/types.hpp"

namespace satspec {

struct SignTriple {
  std::array<int, 3> s{1, 1, 1};

  int operator[](std::size_t i) const { return s[i]; }
  static std::array<SignTriple, 8> all();
};

/// beta^{s}_{w,m}
double beta(const Vec3& w, const Frequency& m, const SignTriple& signs, const DomainSpec& domain);

/// Expansion of a vector field into TrigVectorFields, keyed by frequency.
struct InteractionTerm {
  std::map<Frequency, Vec3> terms;

  Vec3 at(const Frequency& n) const;
  Vec3 evaluate(const Vec3& x, const DomainSpec& domain) const;
};

/// Finite linear combination of canonical eigenmodes. Zero coefficients are pruned.
class FieldExpansion {
 public:
  using Map = std::map<ModeIndex, double>;

  FieldExpansion() = default;

  void add(const ModeIndex& idx, double value);
  void add(const FieldExpansion& other, double factor = 1.0);
  double coeff(const ModeIndex& idx) const;
  const Map& coeffs() const { return coeffs_; }
  bool empty() const { return coeffs_.empty(); }
  std::size_t size() const { return coeffs_.size(); }
  double max_abs() const;
  /// Drop entries with |c| <= tol.
  void prune(double tol);

  /// L2 norm squared using canonical mode weights.
  double l2_norm_sq(const DomainSpec& domain) const;
  /// Re-expansion as trigonometric fields (one per frequency).
  std::vector<TrigVectorField> as_fields(const DomainSpec& domain) const;
  Vec3 evaluate(const Vec3& x, const DomainSpec& domain) const;

 private:
  Map coeffs_;
};

/// (Y^a.grad)Y^b + (Y^b.grad)Y^a before projection.
InteractionTerm advection_sym(const EigenMode& a, const EigenMode& b, const DomainSpec& domain);

/// (Y^a.grad)Y^a from its closed form; equals advection_sym(a,a)/2.
InteractionTerm self_advection(const EigenMode& a, const DomainSpec& domain);

/// Leray projection of a trigonometric field onto canonical eigenmodes of the same frequency.
FieldExpansion project(const TrigVectorField& field, const DomainSpec& domain);
FieldExpansion project(const InteractionTerm& term, const DomainSpec& domain);

/// B(Y^a,Y^b) + B(Y^b,Y^a)
FieldExpansion bilinear_sym(const EigenMode& a, const EigenMode& b, const DomainSpec& domain);

using FieldFunction = std::function<Vec3(const Vec3&)>;

/// Midpoint tensor quadrature of <field, Y>/||Y||^2 for each mode. Used as an independent
/// verification path. Warns on stderr when grid_per_axis is too coarse for the mode set.
FieldExpansion quadrature_oracle(const FieldFunction& field, const std::vector<EigenMode>& modes,
                                 int grid_per_axis, const DomainSpec& domain);

// ---------------------------------------------------------------------------------------------
// Scalar-generic kernels. With Scalar = double the results include pi; the exact path uses a
// rational Scalar and factors pi out (every coefficient is pi times a rational).

template <class Scalar>
using Vec3T = std::array<Scalar, 3>;

/// beta / pi
template <class Scalar>
Scalar beta_reduced(const Vec3T<Scalar>& w, const Frequency& m, const SignTriple& s,
                    const Vec3T<Scalar>& L) {
  Scalar acc(0);
  for (int i = 0; i < 3; ++i) {
    if (m[i] == 0) continue;
    Scalar t = w[i] * Scalar(s[i] * m[i]) / L[i];
    acc += t;
  }
  Scalar out = acc / Scalar(8);
  return out;
}

/// Sign-folded expansion of (Y^k.grad)Y^m + (Y^m.grad)Y^k with pi factored out.
template <class Scalar>
std::map<Frequency, Vec3T<Scalar>> advection_terms_reduced(const Frequency& k,
                                                           const Vec3T<Scalar>& wk,
                                                           const Frequency& m,
                                                           const Vec3T<Scalar>& wm,
                                                           const Vec3T<Scalar>& L) {
  std::map<Frequency, Vec3T<Scalar>> out;
  for (const SignTriple& s : SignTriple::all()) {
    std::array<int, 3> raw{};
    for (int i = 0; i < 3; ++i) raw[i] = k[i] + s[i] * m[i];
    const Scalar bkm = beta_reduced(wk, m, s, L);
    const Scalar bmk = beta_reduced(wm, k, s, L);
    Frequency n(raw[0] < 0 ? -raw[0] : raw[0], raw[1] < 0 ? -raw[1] : raw[1],
                raw[2] < 0 ? -raw[2] : raw[2]);
    auto [it, inserted] = out.try_emplace(n, Vec3T<Scalar>{Scalar(0), Scalar(0), Scalar(0)});
    for (int i = 0; i < 3; ++i) {
      if (raw[i] == 0) continue;  // sin(0) = 0
      Scalar c = Scalar(s[i]) * wm[i] * bkm + wk[i] * bmk;
      if (raw[i] < 0) c = -c;
      it->second[i] += c;
    }
  }
  return out;
}

/// Coefficients of the Leray projection of psi^n_z on the canonical basis at n.
///
/// #0(n)=0: solve z = a1 w1 + a2 w2 + a0 n^L (w1, w2, n^L mutually orthogonal).
/// #0(n)=1: the inactive coordinate is discarded; z = a1 w1 + a0 n^L on the active plane.
/// Otherwise the field is a gradient (or zero) and the result is empty.
template <class Scalar>
std::vector<Scalar> project_coefficients_generic(const Frequency& n, const Vec3T<Scalar>& z,
                                                 const Vec3T<Scalar>& L) {
  if (n.is_zero() || n.num_zero() >= 2) return {};
  const auto basis = perp_basis_generic<Scalar>(n, L);
  Vec3T<Scalar> zz = z;
  for (int i = 0; i < 3; ++i) {
    if (n[i] == 0) zz[i] = Scalar(0);
  }
  std::vector<Scalar> out;
  out.reserve(basis.size());
  for (const auto& w : basis) {
    Scalar num = zz[0] * w[0] + zz[1] * w[1] + zz[2] * w[2];
    Scalar den = w[0] * w[0] + w[1] * w[1] + w[2] * w[2];
    if (den == Scalar(0)) throw std::logic_error("project: degenerate amplitude basis");
    Scalar a = num / den;
    out.push_back(a);
  }
  return out;
}

}  // namespace satspec
