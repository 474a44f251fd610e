#include <cmath>
#include <numbers>
#include <random>
#include <set>

#include "doctest.h"
#include "oracles.hpp"
#include "satspec/interaction.hpp"

using namespace satspec;

namespace {

constexpr double pi = std::numbers::pi;

const DomainSpec kUnit(1.0, 1.0, 1.0);
const DomainSpec kOdd(1.0, 2.0, 3.0);
const DomainSpec kIrr(1.0, std::sqrt(2.0), std::exp(1.0));

EigenMode random_mode(std::mt19937_64& rng, int max_freq, const DomainSpec& dom) {
  const auto modes = enumerate_modes(max_freq, dom);
  std::uniform_int_distribution<std::size_t> pick(0, modes.size() - 1);
  return modes[pick(rng)];
}

double scale_of(const EigenMode& a, const EigenMode& b, const DomainSpec& dom) {
  return pi * oracle::norm(a.w()) * oracle::norm(b.w()) *
         (oracle::norm(a.k().scaled(dom)) + oracle::norm(b.k().scaled(dom)));
}

void check_vec(const Vec3& got, const Vec3& want, double tol) {
  for (int i = 0; i < 3; ++i) CHECK(got[i] == doctest::Approx(want[i]).epsilon(tol).scale(1.0));
}

/// Max |coefficient difference| over the union of supports.
double max_diff(const FieldExpansion& a, const FieldExpansion& b) {
  double d = 0.0;
  for (const auto& [idx, c] : a.coeffs()) d = std::max(d, std::abs(c - b.coeff(idx)));
  for (const auto& [idx, c] : b.coeffs()) d = std::max(d, std::abs(c - a.coeff(idx)));
  return d;
}

}  // namespace

TEST_CASE("beta") {
  const DomainSpec dom(1.7, 0.6, 2.3);
  const double L1 = 1.7, L2 = 0.6, L3 = 2.3;
  for (int q : {3, 4, 7}) {
    for (int s1 : {1, -1}) {
      for (int s2 : {1, -1}) {
        const SignTriple s{{s1, s2, 1}};
        CHECK(beta(Vec3{L1 * q, 0, -L3}, Frequency(0, 1, 1), s, dom) ==
              doctest::Approx(-pi / 8).epsilon(1e-14));
        CHECK(beta(Vec3{0, L2, -L3}, Frequency(1, 0, q), s, dom) ==
              doctest::Approx(-pi / 8 * q).epsilon(1e-14));
        const SignTriple sm{{s1, s2, -1}};
        CHECK(beta(Vec3{L1 * q, 0, -L3}, Frequency(0, 1, 1), sm, dom) ==
              doctest::Approx(pi / 8).epsilon(1e-14));
      }
    }
  }
  for (const auto& s : SignTriple::all()) CHECK(beta(Vec3{0, 0, 0}, Frequency(2, 3, 1), s, dom) == 0.0);
}

TEST_CASE("advection_sym reproduces the base-step witnesses") {
  const DomainSpec dom(1.4, 11.0 / 3.0, 2.0);
  const double L1 = 1.4, L2 = 11.0 / 3.0, L3 = 2.0;
  for (int q : {3, 4, 5, 9}) {
    const auto a = EigenMode::with_amplitude(Frequency(1, 0, q), Vec3{L1 * q, 0, -L3}, dom);
    const auto b = EigenMode::with_amplitude(Frequency(0, 1, 1), Vec3{0, L2, -L3}, dom);
    const auto t = advection_sym(a, b, dom);
    std::set<Frequency> nonzero;
    for (const auto& [n, z] : t.terms) {
      if (oracle::norm(z) > 1e-12) nonzero.insert(n);
    }
    CHECK(nonzero == std::set<Frequency>{Frequency(1, 1, q + 1), Frequency(1, 1, q - 1)});
    // The second component is -L2: the expansion (and the determinant it feeds) fixes the sign.
    check_vec(t.at(Frequency(1, 1, q + 1)), Vec3{-pi / 2 * L1 * q * q, -pi / 2 * L2, pi / 2 * L3 * (q + 1)},
              1e-13);

    const auto c = EigenMode::with_amplitude(Frequency(1, 0, q - 1), Vec3{L1 * (q - 1), 0, -L3}, dom);
    const auto d = EigenMode::with_amplitude(Frequency(0, 1, 2), Vec3{0, 2 * L2, -L3}, dom);
    check_vec(advection_sym(c, d, dom).at(Frequency(1, 1, q + 1)),
              Vec3{-pi / 2 * L1 * (q - 1) * (q - 1), -pi / 2 * 4 * L2, pi / 2 * L3 * (q + 1)}, 1e-13);
  }
}

TEST_CASE("advection_sym matches the pointwise chain rule and is symmetric") {
  std::mt19937_64 rng(3);
  for (const auto* dom : {&kOdd, &kIrr}) {
    for (int trial = 0; trial < 50; ++trial) {
      const auto a = random_mode(rng, 4, *dom);
      const auto b = random_mode(rng, 4, *dom);
      const auto ab = advection_sym(a, b, *dom);
      const auto ba = advection_sym(b, a, *dom);
      const double scale = scale_of(a, b, *dom);

      std::set<Frequency> allowed;
      for (const auto& s : SignTriple::all()) {
        allowed.insert(Frequency(std::abs(a.k()[0] + s[0] * b.k()[0]), std::abs(a.k()[1] + s[1] * b.k()[1]),
                                 std::abs(a.k()[2] + s[2] * b.k()[2])));
      }
      for (const auto& [n, z] : ab.terms) CHECK(allowed.count(n) == 1);
      CHECK(ab.terms.size() == ba.terms.size());
      for (const auto& [n, z] : ab.terms) {
        const Vec3 zz = ba.at(n);
        for (int i = 0; i < 3; ++i) CHECK(std::abs(z[i] - zz[i]) <= 1e-12 * scale);
      }
      for (int t = 0; t < 5; ++t) {
        const Vec3 x = oracle::random_point(rng, *dom);
        const Vec3 want = oracle::advection_pointwise(a, b, x, *dom);
        const Vec3 got = ab.evaluate(x, *dom);
        for (int i = 0; i < 3; ++i) CHECK(std::abs(got[i] - want[i]) <= 1e-12 * scale);
      }
    }
  }
}

TEST_CASE("self_advection closed form") {
  for (const auto* dom : {&kUnit, &kOdd, &kIrr}) {
    for (const auto& mode : enumerate_modes(4, *dom)) {
      const auto self = self_advection(mode, *dom);
      const auto full = advection_sym(mode, mode, *dom);
      const double scale = scale_of(mode, mode, *dom);
      std::set<Frequency> keys;
      for (const auto& [n, z] : self.terms) keys.insert(n);
      for (const auto& [n, z] : full.terms) keys.insert(n);
      for (const auto& n : keys) {
        const Vec3 s = self.at(n);
        const Vec3 f = full.at(n);
        for (int i = 0; i < 3; ++i) CHECK(std::abs(s[i] - 0.5 * f[i]) <= 1e-12 * scale);
      }
      const auto proj = project(self, *dom);
      const double cscale = scale / oracle::norm(mode.w());
      if (mode.k().num_zero() == 1) {
        CHECK(proj.max_abs() <= 1e-12 * cscale);
        CHECK(bilinear_sym(mode, mode, *dom).max_abs() <= 1e-12 * cscale);
      } else {
        CHECK(proj.max_abs() >= 1e-6 * cscale);
      }
    }
  }
}

TEST_CASE("curl of the self-interaction separates the 2D and 3D cases") {
  std::mt19937_64 rng(5);
  for (const auto& mode : enumerate_modes(3, kOdd)) {
    const auto self = self_advection(mode, kOdd);
    oracle::VecFn f = [&](const Vec3& x) { return self.evaluate(x, kOdd); };
    const double scale = scale_of(mode, mode, kOdd) * pi * oracle::norm(mode.k().scaled(kOdd));
    double worst = 0.0;
    for (int t = 0; t < 60; ++t) {
      const Vec3 x = oracle::random_point(rng, kOdd);
      worst = std::max(worst, oracle::norm(oracle::fd_curl(f, x, 1e-4)));
    }
    if (mode.k().num_zero() == 1) {
      CHECK(worst <= 1e-8 * scale);
    } else {
      CHECK(worst > 1e-6 * scale);
    }
  }
}

TEST_CASE("project") {
  for (const auto& n : enumerate_frequencies(4, kUnit)) {
    CHECK(project(TrigVectorField{n, Vec3{double(n[0]), double(n[1]), double(n[2])}}, kUnit).max_abs() <= 1e-14);
  }
  for (const auto* dom : {&kOdd, &kIrr}) {
    for (const auto& n : enumerate_frequencies(4, *dom)) {
      CHECK(project(TrigVectorField{n, n.scaled(*dom)}, *dom).max_abs() <= 1e-13);
      const auto basis = perp_basis(n, *dom);
      for (std::size_t j = 0; j < basis.size(); ++j) {
        const auto e = project(TrigVectorField{n, basis[j]}, *dom);
        const ModeIndex idx{int(j) + 1, n};
        CHECK(e.coeff(idx) == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(std::abs(e.max_abs() - 1.0) <= 1e-14);
      }
    }
  }
  // Gradients and zero frequency.
  CHECK(project(TrigVectorField{Frequency(0, 0, 3), Vec3{1, 2, 3}}, kOdd).empty());
  CHECK(project(TrigVectorField{Frequency(0, 0, 0), Vec3{1, 2, 3}}, kOdd).empty());
  // The inactive component of a #0=1 field is ignored.
  const auto p1 = project(TrigVectorField{Frequency(2, 0, 1), Vec3{0.3, 5.0, -0.2}}, kOdd);
  const auto p2 = project(TrigVectorField{Frequency(2, 0, 1), Vec3{0.3, 0.0, -0.2}}, kOdd);
  CHECK(max_diff(p1, p2) == 0.0);
}

TEST_CASE("project agrees with the quadrature Leray projection") {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> g;
  for (const auto* dom : {&kUnit, &kIrr}) {
    for (const Frequency& n : {Frequency(1, 2, 3), Frequency(2, 0, 1), Frequency(4, 1, 3)}) {
      const Vec3 z{g(rng), g(rng), g(rng)};
      const TrigVectorField t{n, z};
      std::vector<EigenMode> modes;
      for (int j = 1; j <= branch_count(n); ++j) modes.push_back(EigenMode::canonical(n, j, *dom));
      const auto quad = quadrature_oracle([&](const Vec3& x) { return evaluate(t, x, *dom); }, modes, 12, *dom);
      const auto exact = project(t, *dom);
      for (const auto& m : modes) {
        const double ref = std::max(std::abs(quad.coeff(m.index())), 1e-300);
        CHECK(std::abs(exact.coeff(m.index()) - quad.coeff(m.index())) <= 1e-10 * std::max(ref, exact.max_abs()));
      }
    }
  }
}

TEST_CASE("quadrature oracle sanity") {
  const auto target = EigenMode::canonical(Frequency(1, 1, 1), 1, kIrr);
  const auto modes = enumerate_modes(2, kIrr);
  const auto rep = quadrature_oracle([&](const Vec3& x) { return evaluate(target, x, kIrr); }, modes, 16, kIrr);
  for (const auto& m : modes) {
    const double c = rep.coeff(m.index());
    if (m.index() == target.index()) {
      CHECK(c == doctest::Approx(1.0).epsilon(1e-10));
    } else {
      CHECK(std::abs(c) <= 1e-10);
    }
  }
  // Gradient of cos(pi x/L1) cos(2 pi y/L2) cos(pi z/L3) + cos(2 pi x/L1) cos(pi y/L2) cos(2 pi z/L3).
  oracle::VecFn grad = [&](const Vec3& x) {
    Vec3 out{0, 0, 0};
    for (const Frequency& n : {Frequency(1, 2, 1), Frequency(2, 1, 2)}) {
      std::array<double, 3> f{}, c{}, sn{};
      for (int d = 0; d < 3; ++d) {
        f[d] = n[d] * pi / kIrr.length(d);
        c[d] = std::cos(f[d] * x[d]);
        sn[d] = std::sin(f[d] * x[d]);
      }
      out[0] += -f[0] * sn[0] * c[1] * c[2];
      out[1] += -f[1] * c[0] * sn[1] * c[2];
      out[2] += -f[2] * c[0] * c[1] * sn[2];
    }
    return out;
  };
  const auto gr = quadrature_oracle(grad, modes, 16, kIrr);
  CHECK(gr.max_abs() <= 1e-8);
}

TEST_CASE("bilinear_sym against the quadrature oracle") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 20; ++trial) {
    const DomainSpec& dom = (trial % 2) ? kIrr : kOdd;
    const auto a = random_mode(rng, 4, dom);
    const auto b = random_mode(rng, 4, dom);
    const auto bl = bilinear_sym(a, b, dom);
    // Modes in the support plus one random mode that should get nothing.
    std::vector<EigenMode> modes;
    for (const auto& [idx, c] : bl.coeffs()) modes.push_back(EigenMode::canonical(idx.k, idx.j, dom));
    modes.push_back(random_mode(rng, 4, dom));
    const auto quad = quadrature_oracle(
        [&](const Vec3& x) { return oracle::advection_pointwise(a, b, x, dom); }, modes, 24, dom);
    const double ref = std::max({bl.max_abs(), quad.max_abs(), scale_of(a, b, dom) * 1e-6});
    for (const auto& m : modes) {
      CHECK(std::abs(bl.coeff(m.index()) - quad.coeff(m.index())) <= 1e-10 * ref);
    }
    // Same via evaluation of the InteractionTerm itself.
    const auto term = advection_sym(a, b, dom);
    const auto quad2 = quadrature_oracle([&](const Vec3& x) { return term.evaluate(x, dom); }, modes, 24, dom);
    for (const auto& m : modes) CHECK(std::abs(bl.coeff(m.index()) - quad2.coeff(m.index())) <= 1e-10 * ref);
  }
}

TEST_CASE("<(Y^a.grad)Y^b, Y^b> vanishes") {
  std::mt19937_64 rng(29);
  const int N = 24;
  for (int trial = 0; trial < 10; ++trial) {
    const auto a = random_mode(rng, 4, kIrr);
    const auto b = random_mode(rng, 4, kIrr);
    double acc = 0.0, mag = 0.0;
    for (int p = 0; p < N; ++p)
      for (int q = 0; q < N; ++q)
        for (int r = 0; r < N; ++r) {
          const Vec3 x{(p + 0.5) * kIrr.length(0) / N, (q + 0.5) * kIrr.length(1) / N,
                       (r + 0.5) * kIrr.length(2) / N};
          const Vec3 ya = evaluate(a, x, kIrr);
          const Vec3 yb = evaluate(b, x, kIrr);
          const auto jb = oracle::jacobian(b.k(), b.w(), x, kIrr);
          for (int i = 0; i < 3; ++i) {
            double adv = 0.0;
            for (int d = 0; d < 3; ++d) adv += ya[d] * jb[i][d];
            acc += adv * yb[i];
            mag += std::abs(adv * yb[i]);
          }
        }
    CHECK(std::abs(acc) <= 1e-12 * mag);
  }
}

TEST_CASE("bilinearity, symmetry and projection idempotence") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 30; ++trial) {
    const auto a = random_mode(rng, 4, kIrr);
    const auto b = random_mode(rng, 4, kIrr);
    const auto base = bilinear_sym(a, b, kIrr);
    const double ref = std::max(base.max_abs(), 1e-300);
    for (double alpha : {-1.0, 2.0}) {
      auto scaled = bilinear_sym(a.scaled(alpha, kIrr), b, kIrr);
      FieldExpansion want;
      want.add(base, alpha);
      CHECK(max_diff(scaled, want) <= 1e-12 * std::abs(alpha) * ref);
    }
    CHECK(max_diff(bilinear_sym(b, a, kIrr), base) <= 1e-12 * ref);

    FieldExpansion again;
    for (const auto& f : base.as_fields(kIrr)) again.add(project(f, kIrr));
    CHECK(max_diff(again, base) <= 1e-12 * ref);
  }
}
