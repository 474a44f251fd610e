#include "satspec/spectral_basis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace satspec {

namespace {

// Relative tolerance for accepting a caller-supplied amplitude as [L]-orthogonal.
constexpr double kPerpTol = 1e-12;

}  // namespace

EigenMode EigenMode::canonical(const Frequency& k, int j, const DomainSpec& domain) {
  const auto basis = perp_basis(k, domain);
  if (j < 1 || j > static_cast<int>(basis.size())) {
    throw std::invalid_argument("EigenMode: branch " + std::to_string(j) + " does not exist at " +
                                k.str());
  }
  const Vec3& w = basis[j - 1];
  EigenMode mode(k, j, w, 0.0);
  mode.norm_sq_ = l2_norm_sq(mode.as_field(), domain);
  return mode;
}

EigenMode EigenMode::with_amplitude(const Frequency& k, const Vec3& w, const DomainSpec& domain,
                                    int j) {
  if (branch_count(k) == 0) {
    throw std::invalid_argument("EigenMode: frequency " + k.str() + " has #0 >= 2");
  }
  double scale = 0.0;
  for (int i = 0; i < 3; ++i) {
    if (k[i] == 0 && w[i] != 0.0) {
      throw std::invalid_argument("EigenMode: amplitude must vanish where k_i = 0");
    }
    scale = std::max(scale, std::abs(w[i] * k[i] / domain.length(i)));
  }
  if (scale == 0.0) throw std::invalid_argument("EigenMode: zero amplitude");
  if (std::abs(l_inner(w, k, domain)) > kPerpTol * scale) {
    throw std::invalid_argument("EigenMode: amplitude is not [L]-orthogonal to " + k.str());
  }
  EigenMode mode(k, j, w, 0.0);
  mode.norm_sq_ = l2_norm_sq(mode.as_field(), domain);
  return mode;
}

EigenMode EigenMode::scaled(double factor, const DomainSpec& domain) const {
  Vec3 w{w_[0] * factor, w_[1] * factor, w_[2] * factor};
  return with_amplitude(k_, w, domain, j_);
}

std::vector<Frequency> enumerate_frequencies(int max_per_axis, const DomainSpec& /*domain*/) {
  std::vector<Frequency> out;
  for (int a = 0; a <= max_per_axis; ++a) {
    for (int b = 0; b <= max_per_axis; ++b) {
      for (int c = 0; c <= max_per_axis; ++c) {
        Frequency f(a, b, c);
        if (f.num_zero() <= 1) out.push_back(f);
      }
    }
  }
  return out;
}

std::vector<EigenMode> enumerate_modes(int max_per_axis, const DomainSpec& domain) {
  std::vector<EigenMode> out;
  for (const auto& k : enumerate_frequencies(max_per_axis, domain)) {
    for (int j = 1; j <= branch_count(k); ++j) out.push_back(EigenMode::canonical(k, j, domain));
  }
  return out;
}

std::vector<Vec3> perp_basis(const Frequency& k, const DomainSpec& domain) {
  return perp_basis_generic<double>(k, domain.lengths());
}

double eigenvalue(const Frequency& k, const DomainSpec& domain) {
  if (k.is_zero()) throw std::invalid_argument("eigenvalue: zero frequency");
  const Vec3 kl = k.scaled(domain);
  return domain.nu() * std::numbers::pi * std::numbers::pi * dot(kl, kl);
}

Vec3 evaluate(const TrigVectorField& field, const Vec3& x, const DomainSpec& domain) {
  std::array<double, 3> s{};
  std::array<double, 3> c{};
  for (int i = 0; i < 3; ++i) {
    const double arg = field.n[i] * std::numbers::pi * x[i] / domain.length(i);
    s[i] = std::sin(arg);
    c[i] = std::cos(arg);
  }
  return {field.z[0] * s[0] * c[1] * c[2], field.z[1] * c[0] * s[1] * c[2],
          field.z[2] * c[0] * c[1] * s[2]};
}

Vec3 evaluate(const EigenMode& mode, const Vec3& x, const DomainSpec& domain) {
  return evaluate(mode.as_field(), x, domain);
}

double psi_norm_sq(const Frequency& n, int component, const DomainSpec& domain) {
  double v = 1.0;
  for (int d = 0; d < 3; ++d) {
    const double L = domain.length(d);
    if (d == component) {
      if (n[d] == 0) return 0.0;  // sin(0) factor
      v *= L / 2.0;
    } else {
      v *= n[d] == 0 ? L : L / 2.0;
    }
  }
  return v;
}

double l2_norm_sq(const TrigVectorField& field, const DomainSpec& domain) {
  double v = 0.0;
  for (int i = 0; i < 3; ++i) v += field.z[i] * field.z[i] * psi_norm_sq(field.n, i, domain);
  return v;
}

double l2_norm_sq(const EigenMode& mode, const DomainSpec& domain) {
  return l2_norm_sq(mode.as_field(), domain);
}

double l_inner(const Vec3& w, const Frequency& k, const DomainSpec& domain) {
  return dot(w, k.scaled(domain));
}

}  // namespace satspec
