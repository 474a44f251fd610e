#include "satspec/proof_trace.hpp"

#include <fmt/format.h>

#include <set>
#include <stdexcept>

namespace satspec {

namespace {

struct Choice {
  Frequency k;
  Vec3Q wk;
  Frequency m;
  Vec3Q wm;
};

Rational Q(long v) { return Rational(v); }

Vec3Q times(const Rational& c, const Vec3Q& v) { return {c * v[0], c * v[1], c * v[2]}; }

std::string freq_set_str(const std::set<Frequency>& s) {
  std::string out = "{";
  for (const auto& f : s) out += (out.size() > 1 ? ", " : "") + f.str();
  return out + "}";
}

class Tracer {
 public:
  Tracer(int q, const RationalDomain& domain) : L_(domain.lengths()) { rep_.q = q; }

  TraceReport take() { return std::move(rep_); }

  const Vec3Q& L() const { return L_; }

  bool admissible(const Frequency& k, const Vec3Q& w) const {
    Rational acc(0);
    for (int i = 0; i < 3; ++i) {
      if (k[i] == 0 && sgn(w[i]) != 0) return false;
      acc += w[i] * k[i] / L_[i];
    }
    return sgn(acc) == 0 && (sgn(w[0]) != 0 || sgn(w[1]) != 0 || sgn(w[2]) != 0);
  }

  Vec3Q z(const Choice& c, const Frequency& n) const { return witness_z(c.k, c.wk, c.m, c.wm, n, L_); }

  std::set<Frequency> support(const Choice& c) const {
    std::set<Frequency> out;
    for (const auto& [f, v] : advection_terms_reduced<Rational>(c.k, c.wk, c.m, c.wm, L_)) {
      if (sgn(v[0]) != 0 || sgn(v[1]) != 0 || sgn(v[2]) != 0) out.insert(f);
    }
    return out;
  }

  void check_admissible(const std::string& group, const std::string& params, const char* which,
                        const Choice& c) {
    const bool ok = admissible(c.k, c.wk) && admissible(c.m, c.wm);
    add(group + "/admissible_" + which, params, ok ? "admissible" : "not admissible", "admissible", ok);
  }

  /// Computed support of the unprojected sum must lie inside the printed frequency list.
  void check_support(const std::string& group, const std::string& params, const char* which,
                     const Choice& c, const std::set<Frequency>& printed,
                     std::optional<std::set<Frequency>> corrected = std::nullopt) {
    const auto s = support(c);
    const bool ok = std::includes(printed.begin(), printed.end(), s.begin(), s.end());
    std::optional<bool> cor;
    std::string cs;
    if (corrected) {
      cor = std::includes(corrected->begin(), corrected->end(), s.begin(), s.end());
      cs = freq_set_str(*corrected);
    }
    add(group + "/support_" + which, params, freq_set_str(s), freq_set_str(printed), ok, cor, cs);
  }

  void check_vec(const std::string& display, const std::string& params, const Vec3Q& got,
                 const Vec3Q& printed, std::optional<Vec3Q> corrected = std::nullopt) {
    std::optional<bool> cor;
    std::string cs;
    if (corrected) {
      cor = (got == *corrected);
      cs = vec_str(*corrected);
    }
    add(display, params, vec_str(got), vec_str(printed), got == printed, cor, cs);
  }

  /// scale * det(n, za, zg) against the printed closed form, plus the printed sign claim.
  void check_det(const std::string& group, const std::string& params, const Frequency& n,
                 const Vec3Q& za, const Vec3Q& zg, const Rational& scale, const Rational& printed,
                 int claimed_sign, std::optional<Rational> corrected = std::nullopt) {
    const Vec3Q nv{Q(n[0]), Q(n[1]), Q(n[2])};
    const Rational d = scale * det3(nv, za, zg);
    std::optional<bool> cor;
    std::string cs;
    if (corrected) {
      cor = (d == *corrected);
      cs = corrected->get_str();
    }
    add(group + "/det", params, d.get_str(), printed.get_str(), d == printed, cor, cs);
    const bool sign_ok = claimed_sign > 0 ? sgn(d) > 0 : sgn(d) < 0;
    add(group + "/det_sign", params, sgn(d) > 0 ? "> 0" : (sgn(d) < 0 ? "< 0" : "= 0"),
        claimed_sign > 0 ? "> 0" : "< 0", sign_ok);
  }

  /// Rank evidence that holds for every box: det(n^L, za, zg) != 0.
  void certify(const std::string& group, const std::string& params, const Frequency& n,
               const Choice& a, const Choice& g) {
    const Vec3Q za = z(a, n);
    const Vec3Q zg = z(g, n);
    const Rational d = rank2_det(n, za, zg, L_);
    add(group + "/leray_det", params, d.get_str(), "!= 0", sgn(d) != 0);
    const ModeIndex ia{1, a.k}, ib{1, a.m}, ga{1, g.k}, gb{1, g.m};
    for (int j = 1; j <= 2; ++j) {
      rep_.certificates.push_back(
          Certificate{ModeIndex{j, n}, {ia, ga}, {ib, gb}, {za, zg}, d, "rank2", rep_.q});
    }
  }

 private:
  void add(std::string display, std::string params, std::string computed, std::string printed, bool ok,
           std::optional<bool> cor = std::nullopt, std::string cs = {}) {
    rep_.checks.push_back(TraceCheck{std::move(display), std::move(params), std::move(computed),
                                     std::move(printed), ok, cor, std::move(cs)});
  }

  Vec3Q L_;
  TraceReport rep_;
};

}  // namespace

std::string vec_str(const Vec3Q& v) {
  return fmt::format("({}, {}, {})", v[0].get_str(), v[1].get_str(), v[2].get_str());
}

std::vector<const TraceCheck*> TraceReport::mismatches() const {
  std::vector<const TraceCheck*> out;
  for (const auto& c : checks) {
    if (!c.matches_printed) out.push_back(&c);
  }
  return out;
}

TraceReport paper_trace(int q, const RationalDomain& domain) {
  if (q < 3) throw std::invalid_argument("paper_trace requires q >= 3");
  Tracer t(q, domain);
  const Vec3Q& L = t.L();
  const Rational L1 = L[0], L2 = L[1], L3 = L[2];
  const Rational zero(0);
  const Rational half(1, 2), quarter(1, 4), eighth(1, 8);

  // ---- base step: n = (1,1,q+1)
  {
    const std::string g = "base-step";
    const std::string p = fmt::format("q={}", q);
    const Frequency n(1, 1, q + 1);
    const Choice a{Frequency(1, 0, q), {L1 * q, zero, -L3}, Frequency(0, 1, 1), {zero, L2, -L3}};
    const Choice c{Frequency(1, 0, q - 1), {L1 * (q - 1), zero, -L3}, Frequency(0, 1, 2), {zero, 2 * L2, -L3}};
    t.check_admissible(g, p, "alpha", a);
    t.check_admissible(g, p, "gamma", c);
    t.check_support(g, p, "alpha", a, {n, Frequency(1, 1, q - 1)});
    t.check_support(g, p, "gamma", c, {n, Frequency(1, 1, q - 2)}, std::set<Frequency>{n, Frequency(1, 1, q - 3)});
    const Vec3Q za = t.z(a, n), zg = t.z(c, n);
    t.check_vec(g + "/z_alpha", p, za, times(half, {-L1 * q * q, L2, L3 * (q + 1)}),
                times(half, {-L1 * q * q, -L2, L3 * (q + 1)}));
    t.check_vec(g + "/z_gamma", p, zg, times(half, {-L1 * (q - 1) * (q - 1), -4 * L2, L3 * (q + 1)}));
    const Rational printed =
        quarter * (q + 1) * (L1 * (L2 + L3) * (2 * q - 1) + 3 * L1 * L2 * q * q + 3 * L2 * L3);
    t.check_det(g, p, n, za, zg, Rational(1), printed, +1);
    t.certify(g, p, n, a, c);
  }

  // ---- step 1 induction: n = (1,l,q+1) and its mirror (l,1,q+1)
  for (int l = 2; l <= q; ++l) {
    const std::string p = fmt::format("q={} l={}", q, l);
    {
      const std::string g = "step1-induction";
      const Frequency n(1, l, q + 1);
      const Choice a{Frequency(1, l - 1, q), {zero, L2 * q, L3 * (1 - l)}, Frequency(0, 1, 1), {zero, L2, -L3}};
      const Choice c{Frequency(1, l - 1, q), {L1 * q, zero, -L3}, Frequency(0, 1, 1), {zero, L2, -L3}};
      t.check_admissible(g, p, "alpha", a);
      t.check_admissible(g, p, "gamma", c);
      t.check_support(g, p, "alpha", a,
                      {n, Frequency(1, l - 2, q + 1), Frequency(1, l, q - 1), Frequency(1, l - 2, q - 1)});
      const Vec3Q za = t.z(a, n), zg = t.z(c, n);
      t.check_vec(g + "/z_alpha", p, za, times(quarter, {zero, L2 * (q - l + 1) * (1 - q), L3 * (q - l + 1) * (l - 2)}));
      t.check_vec(g + "/z_gamma", p, zg, times(quarter, {-L1 * q * (q - l + 1), -L2, L3 * (q - l + 2)}));
      const Rational printed =
          -Rational(q) * (q - l + 1) * (q - l + 1) * (L2 * L3 + L1 * L3 * l * (l - 2) + L1 * L2 * (q * q - 1));
      t.check_det(g, p, n, za, zg, Rational(16), printed, -1);
      t.certify(g, p, n, a, c);
    }
    {
      // Same choices with axes 1 and 2 exchanged; the row swap flips the determinant sign.
      const std::string g = "step1-induction-mirror";
      const Frequency n(l, 1, q + 1);
      const Choice a{Frequency(l - 1, 1, q), {L1 * q, zero, L3 * (1 - l)}, Frequency(1, 0, 1), {L1, zero, -L3}};
      const Choice c{Frequency(l - 1, 1, q), {zero, L2 * q, -L3}, Frequency(1, 0, 1), {L1, zero, -L3}};
      t.check_admissible(g, p, "alpha", a);
      t.check_admissible(g, p, "gamma", c);
      const Vec3Q za = t.z(a, n), zg = t.z(c, n);
      t.check_vec(g + "/z_alpha", p, za, times(quarter, {L1 * (q - l + 1) * (1 - q), zero, L3 * (q - l + 1) * (l - 2)}));
      t.check_vec(g + "/z_gamma", p, zg, times(quarter, {-L1, -L2 * q * (q - l + 1), L3 * (q - l + 2)}));
      const Rational mirrored =
          Rational(q) * (q - l + 1) * (q - l + 1) * (L1 * L3 + L2 * L3 * l * (l - 2) + L2 * L1 * (q * q - 1));
      t.check_det(g, p, n, za, zg, Rational(16), mirrored, +1);
      t.certify(g, p, n, a, c);
    }
  }

  // ---- step 2: n = (n1,n2,q+1)
  for (int n1 = 2; n1 <= q; ++n1) {
    for (int n2 = 2; n2 <= q; ++n2) {
      const std::string g = "step2";
      const std::string p = fmt::format("q={} n1={} n2={}", q, n1, n2);
      const Frequency n(n1, n2, q + 1);
      const Choice a{Frequency(n1 - 1, n2 - 1, q), {zero, L2 * q, L3 * (1 - n2)}, Frequency(1, 1, 1), {zero, L2, -L3}};
      const Choice c{Frequency(n1 - 1, n2 - 1, q), {L1 * q, zero, L3 * (1 - n1)}, Frequency(1, 1, 1), {zero, L2, -L3}};
      t.check_admissible(g, p, "alpha", a);
      t.check_admissible(g, p, "gamma", c);
      std::set<Frequency> kappa;
      for (int a1 : {n1, n1 - 2})
        for (int a2 : {n2, n2 - 2})
          for (int a3 : {q + 1, q - 1}) kappa.insert(Frequency(a1, a2, a3));
      t.check_support(g, p, "alpha", a, kappa);
      const Vec3Q za = t.z(a, n), zg = t.z(c, n);
      const Rational s2 = L2 * (q - n2 + 1);
      t.check_vec(g + "/z_alpha", p, za, times(eighth, {zero, s2 * (1 - q), L3 * (q - n2 + 1) * (2 - n2)}),
                  times(eighth, {zero, s2 * (1 - q), L3 * (q - n2 + 1) * (n2 - 2)}));
      t.check_vec(g + "/z_gamma", p, zg,
                  times(eighth, {-L1 * q * (q - n2 + 1), L2 * (q - n1 + 1),
                                 L3 * (1 - n1) * (q - n2 + 1) + L3 * (q - n1 + 1)}),
                  times(eighth, {-L1 * q * (q - n2 + 1), L2 * (q - n1 + 1),
                                 L3 * (n1 - 1) * (q - n2 + 1) - L3 * (q - n1 + 1)}));
      const Rational printed = -Rational(q) * (q - n2 + 1) * (q - n2 + 1) *
                               (L2 * L3 * n1 * (n1 - 2) + L1 * L3 * n2 * (n2 - 2) + L1 * L2 * (q * q - 1));
      t.check_det(g, p, n, za, zg, Rational(64), printed, -1);
      t.certify(g, p, n, a, c);
    }
  }

  // ---- part 2: n = (l,q+1,q+1)
  for (int l = 1; l <= q; ++l) {
    const std::string g = "part2";
    const std::string p = fmt::format("q={} l={}", q, l);
    const Frequency n(l, q + 1, q + 1);
    const Choice a{Frequency(l, q - 1, q), {zero, L2 * q, L3 * (1 - q)}, Frequency(0, 2, 1), {zero, L2, -2 * L3}};
    const Choice c{Frequency(l, q - 1, q), {L1 * q, zero, -L3 * l}, Frequency(0, 2, 1), {zero, L2, -2 * L3}};
    t.check_admissible(g, p, "alpha", a);
    t.check_admissible(g, p, "gamma", c);
    t.check_support(g, p, "alpha", a, {n, Frequency(l, q - 2, q + 1), Frequency(l, q + 1, q - 1), Frequency(l, q - 2, q - 1)},
                    std::set<Frequency>{n, Frequency(l, q - 3, q + 1), Frequency(l, q + 1, q - 1), Frequency(l, q - 3, q - 1)});
    const Vec3Q za = t.z(a, n), zg = t.z(c, n);
    t.check_vec(g + "/z_alpha", p, za, times(quarter, {zero, L2 * (1 - q * q), L3 * (q + 1) * (q - 2)}),
                times(quarter, {zero, L2 * (1 - q * q), L3 * (q + 1) * (q - 3)}));
    t.check_vec(g + "/z_gamma", p, zg, times(quarter, {-L1 * q * (q + 1), -L2 * l, L3 * l * (q + 3)}));
    const Rational base = -Rational(q) * (q + 1) * (q + 1);
    const Rational printed = base * (L2 * L3 * l * l + L1 * L3 * (q + 1) * (q - 2) + L1 * L2 * (q * q - 1));
    const Rational corrected = base * (L2 * L3 * l * l + L1 * L3 * (q + 1) * (q - 3) + L1 * L2 * (q * q - 1));
    t.check_det(g, p, n, za, zg, Rational(16), printed, -1, corrected);
    t.certify(g, p, n, a, c);
  }

  // ---- part 3: n = (q+1,q+1,q+1)
  {
    const std::string g = "part3";
    const std::string p = fmt::format("q={}", q);
    const Frequency n(q + 1, q + 1, q + 1);
    const Choice a{Frequency(q, q - 1, q), {zero, L2 * q, L3 * (1 - q)}, Frequency(1, 2, 1), {zero, L2, -2 * L3}};
    const Choice c{Frequency(q, q - 1, q), {L1 * (1 - q), L2 * q, zero}, Frequency(1, 2, 1), {zero, L2, -2 * L3}};
    t.check_admissible(g, p, "alpha", a);
    t.check_admissible(g, p, "gamma", c);
    std::set<Frequency> printed_kappa{n,
                                      Frequency(q + 1, q + 1, q - 1),
                                      Frequency(q - 1, q + 1, q + 1),
                                      Frequency(q - 1, q - 2, q + 1),
                                      Frequency(q - 1, q + 1, q - 1),
                                      Frequency(q + 1, q - 2, q - 1),
                                      Frequency(q - 1, q - 2, q - 1)};
    std::set<Frequency> kappa;
    for (int a1 : {q + 1, q - 1})
      for (int a2 : {q + 1, q - 3})
        for (int a3 : {q + 1, q - 1}) kappa.insert(Frequency(a1, a2, a3));
    t.check_support(g, p, "alpha", a, printed_kappa, kappa);
    const Vec3Q za = t.z(a, n), zg = t.z(c, n);
    t.check_vec(g + "/z_alpha", p, za, times(eighth, {zero, L2 * (1 - q * q), L3 * (q + 1) * (q - 2)}),
                times(eighth, {zero, L2 * (1 - q * q), L3 * (q + 1) * (q - 3)}));
    t.check_vec(g + "/z_gamma", p, zg, times(eighth, {L1 * (q * q - 1), L2 * (1 - q * q), -2 * L3 * (q + 1)}));
    const Rational pre = Rational(1, 64) * (q + 1) * (q + 1) * (q + 1) * (q - 1);
    const Rational printed = pre * ((L1 * L2 + L2 * L3) * (q - 1) + L1 * L3 * (q - 2));
    const Rational corrected = pre * ((L1 * L2 + L2 * L3) * (q - 1) + L1 * L3 * (q - 3));
    t.check_det(g, p, n, za, zg, Rational(1), printed, +1, corrected);
    t.certify(g, p, n, a, c);
  }
  return t.take();
}

}  // namespace satspec
