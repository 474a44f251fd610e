#include "satspec/interaction.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numbers>

namespace satspec {

std::array<SignTriple, 8> SignTriple::all() {
  std::array<SignTriple, 8> out{};
  int idx = 0;
  for (int a : {1, -1}) {
    for (int b : {1, -1}) {
      for (int c : {1, -1}) out[idx++] = SignTriple{{a, b, c}};
    }
  }
  return out;
}

double beta(const Vec3& w, const Frequency& m, const SignTriple& signs, const DomainSpec& domain) {
  return std::numbers::pi * beta_reduced<double>(w, m, signs, domain.lengths());
}

// ---- InteractionTerm ------------------------------------------------------------------------

Vec3 InteractionTerm::at(const Frequency& n) const {
  auto it = terms.find(n);
  return it == terms.end() ? Vec3{0.0, 0.0, 0.0} : it->second;
}

Vec3 InteractionTerm::evaluate(const Vec3& x, const DomainSpec& domain) const {
  Vec3 acc{0.0, 0.0, 0.0};
  for (const auto& [n, z] : terms) {
    const Vec3 v = satspec::evaluate(TrigVectorField{n, z}, x, domain);
    for (int i = 0; i < 3; ++i) acc[i] += v[i];
  }
  return acc;
}

// ---- FieldExpansion -------------------------------------------------------------------------

void FieldExpansion::add(const ModeIndex& idx, double value) {
  if (value == 0.0) return;
  auto [it, inserted] = coeffs_.try_emplace(idx, value);
  if (!inserted) {
    it->second += value;
    if (it->second == 0.0) coeffs_.erase(it);
  }
}

void FieldExpansion::add(const FieldExpansion& other, double factor) {
  for (const auto& [idx, c] : other.coeffs_) add(idx, factor * c);
}

double FieldExpansion::coeff(const ModeIndex& idx) const {
  auto it = coeffs_.find(idx);
  return it == coeffs_.end() ? 0.0 : it->second;
}

double FieldExpansion::max_abs() const {
  double m = 0.0;
  for (const auto& [idx, c] : coeffs_) m = std::max(m, std::abs(c));
  return m;
}

void FieldExpansion::prune(double tol) {
  std::erase_if(coeffs_, [tol](const auto& kv) { return std::abs(kv.second) <= tol; });
}

double FieldExpansion::l2_norm_sq(const DomainSpec& domain) const {
  double v = 0.0;
  for (const auto& [idx, c] : coeffs_) {
    v += c * c * EigenMode::canonical(idx.k, idx.j, domain).norm_sq();
  }
  return v;
}

std::vector<TrigVectorField> FieldExpansion::as_fields(const DomainSpec& domain) const {
  std::map<Frequency, Vec3> acc;
  for (const auto& [idx, c] : coeffs_) {
    const Vec3 w = perp_basis(idx.k, domain)[idx.j - 1];
    Vec3& z = acc.try_emplace(idx.k, Vec3{0.0, 0.0, 0.0}).first->second;
    for (int i = 0; i < 3; ++i) z[i] += c * w[i];
  }
  std::vector<TrigVectorField> out;
  out.reserve(acc.size());
  for (const auto& [n, z] : acc) out.push_back(TrigVectorField{n, z});
  return out;
}

Vec3 FieldExpansion::evaluate(const Vec3& x, const DomainSpec& domain) const {
  Vec3 acc{0.0, 0.0, 0.0};
  for (const auto& f : as_fields(domain)) {
    const Vec3 v = satspec::evaluate(f, x, domain);
    for (int i = 0; i < 3; ++i) acc[i] += v[i];
  }
  return acc;
}

// ---- advection and projection ---------------------------------------------------------------

InteractionTerm advection_sym(const EigenMode& a, const EigenMode& b, const DomainSpec& domain) {
  InteractionTerm out;
  auto reduced = advection_terms_reduced<double>(a.k(), a.w(), b.k(), b.w(), domain.lengths());
  for (auto& [n, z] : reduced) {
    out.terms.emplace(n, Vec3{std::numbers::pi * z[0], std::numbers::pi * z[1],
                              std::numbers::pi * z[2]});
  }
  return out;
}

InteractionTerm self_advection(const EigenMode& a, const DomainSpec& domain) {
  // Component i with the two other axes d, e:
  //   -(pi/2) w_i S_i(2k_i) [ (w_e k_e/L_e) C_d(k_d)^2 + (w_d k_d/L_d) C_e(k_e)^2 ]
  // and C^2(k) = (1 + C(2k))/2.
  const Frequency& k = a.k();
  const Vec3& w = a.w();
  const Vec3 kl = k.scaled(domain);
  InteractionTerm out;
  auto accumulate = [&out](const Frequency& n, int comp, double value) {
    if (value == 0.0 || n[comp] == 0) return;
    out.terms.try_emplace(n, Vec3{0.0, 0.0, 0.0}).first->second[comp] += value;
  };
  for (int i = 0; i < 3; ++i) {
    const int d = (i + 1) % 3;
    const int e = (i + 2) % 3;
    const double pref = -std::numbers::pi / 4.0 * w[i];
    const double we = w[e] * kl[e];
    const double wd = w[d] * kl[d];
    std::array<int, 3> base{0, 0, 0};
    base[i] = 2 * k[i];
    Frequency n0(base[0], base[1], base[2]);
    accumulate(n0, i, pref * (we + wd));
    std::array<int, 3> fd = base;
    fd[d] = 2 * k[d];
    accumulate(Frequency(fd[0], fd[1], fd[2]), i, pref * we);
    std::array<int, 3> fe = base;
    fe[e] = 2 * k[e];
    accumulate(Frequency(fe[0], fe[1], fe[2]), i, pref * wd);
  }
  return out;
}

FieldExpansion project(const TrigVectorField& field, const DomainSpec& domain) {
  FieldExpansion out;
  const auto alpha = project_coefficients_generic<double>(field.n, field.z, domain.lengths());
  for (std::size_t j = 0; j < alpha.size(); ++j) {
    out.add(ModeIndex{static_cast<int>(j) + 1, field.n}, alpha[j]);
  }
  return out;
}

FieldExpansion project(const InteractionTerm& term, const DomainSpec& domain) {
  FieldExpansion out;
  for (const auto& [n, z] : term.terms) out.add(project(TrigVectorField{n, z}, domain));
  return out;
}

FieldExpansion bilinear_sym(const EigenMode& a, const EigenMode& b, const DomainSpec& domain) {
  return project(advection_sym(a, b, domain), domain);
}

// ---- quadrature oracle ----------------------------------------------------------------------

FieldExpansion quadrature_oracle(const FieldFunction& field, const std::vector<EigenMode>& modes,
                                 int grid_per_axis, const DomainSpec& domain) {
  if (grid_per_axis < 1) throw std::invalid_argument("quadrature_oracle: empty grid");
  int max_freq = 0;
  for (const auto& m : modes) max_freq = std::max(max_freq, m.k().max_component());
  if (grid_per_axis < 2 * max_freq + 2) {
    std::cerr << "warning: quadrature grid " << grid_per_axis
              << " may alias frequencies up to " << max_freq << '\n';
  }
  const int N = grid_per_axis;
  std::array<std::vector<double>, 3> nodes;
  for (int d = 0; d < 3; ++d) {
    nodes[d].resize(N);
    for (int p = 0; p < N; ++p) nodes[d][p] = (p + 0.5) * domain.length(d) / N;
  }
  const double cell = domain.volume() / (static_cast<double>(N) * N * N);

  // Per-mode, per-axis sin/cos tables at the nodes.
  const std::size_t M = modes.size();
  std::vector<std::array<std::vector<double>, 6>> tab(M);
  for (std::size_t m = 0; m < M; ++m) {
    for (int d = 0; d < 3; ++d) {
      tab[m][2 * d].resize(N);
      tab[m][2 * d + 1].resize(N);
      for (int p = 0; p < N; ++p) {
        const double arg = modes[m].k()[d] * std::numbers::pi * nodes[d][p] / domain.length(d);
        tab[m][2 * d][p] = std::sin(arg);
        tab[m][2 * d + 1][p] = std::cos(arg);
      }
    }
  }

  std::vector<double> inner(M, 0.0);
  std::vector<double> self(M, 0.0);
  for (int p = 0; p < N; ++p) {
    for (int q = 0; q < N; ++q) {
      for (int r = 0; r < N; ++r) {
        const Vec3 x{nodes[0][p], nodes[1][q], nodes[2][r]};
        const Vec3 f = field(x);
        for (std::size_t m = 0; m < M; ++m) {
          const auto& t = tab[m];
          const Vec3& w = modes[m].w();
          const Vec3 y{w[0] * t[0][p] * t[3][q] * t[5][r], w[1] * t[1][p] * t[2][q] * t[5][r],
                       w[2] * t[1][p] * t[3][q] * t[4][r]};
          inner[m] += dot(f, y);
          self[m] += dot(y, y);
        }
      }
    }
  }
  FieldExpansion out;
  for (std::size_t m = 0; m < modes.size(); ++m) {
    out.add(modes[m].index(), (inner[m] * cell) / (self[m] * cell));
  }
  return out;
}

}  // namespace satspec
