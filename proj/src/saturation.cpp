#include "satspec/saturation.hpp"

#include <Eigen/Dense>
#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "satspec/parallel.hpp"

namespace satspec {

// ---- ModeSet --------------------------------------------------------------------------------

bool ModeSet::fully_reached(const Frequency& n) const {
  const int b = branch_count(n);
  if (b == 0) return false;
  for (int j = 1; j <= b; ++j) {
    if (!contains(ModeIndex{j, n})) return false;
  }
  return true;
}

bool ModeSet::includes(const ModeSet& other) const {
  return std::includes(members_.begin(), members_.end(), other.members_.begin(), other.members_.end());
}

bool ModeSet::includes(const std::vector<ModeIndex>& modes) const {
  return std::all_of(modes.begin(), modes.end(), [this](const ModeIndex& m) { return contains(m); });
}

std::vector<ModeIndex> c_modes(int q) {
  std::vector<ModeIndex> out;
  for (int a = 0; a <= q; ++a)
    for (int b = 0; b <= q; ++b)
      for (int c = 0; c <= q; ++c) {
        const Frequency n(a, b, c);
        for (int j = 1; j <= branch_count(n); ++j) out.push_back(ModeIndex{j, n});
      }
  return out;
}

ModeSet seed_set(const DomainSpec& domain) {
  std::set<ModeIndex> members;
  for (const auto& idx : c_modes(3)) {
    (void)EigenMode::canonical(idx.k, idx.j, domain);
    members.insert(idx);
  }
  return ModeSet(0, std::move(members));
}

// ---- JSON -----------------------------------------------------------------------------------

nlohmann::json to_json(const ModeIndex& idx) {
  return nlohmann::json{{"j", idx.j}, {"k", {idx.k[0], idx.k[1], idx.k[2]}}};
}

nlohmann::json to_json(const Certificate& c) {
  nlohmann::json a = nlohmann::json::array();
  nlohmann::json b = nlohmann::json::array();
  nlohmann::json z = nlohmann::json::array();
  for (const auto& m : c.pair_a) a.push_back(to_json(m));
  for (const auto& m : c.pair_b) b.push_back(to_json(m));
  for (const auto& v : c.z) z.push_back({rational_json(v[0]), rational_json(v[1]), rational_json(v[2])});
  return nlohmann::json{{"target", to_json(c.target)},
                        {"a", a},
                        {"b", b},
                        {"z", z},
                        {"det_num", integer_json(c.det_value.get_num())},
                        {"det_den", integer_json(c.det_value.get_den())},
                        {"evidence", c.rank_evidence},
                        {"generation", c.generation}};
}

// ---- index classes --------------------------------------------------------------------------

FrequencyClasses FrequencyClasses::build(int q) {
  FrequencyClasses fc;
  fc.q = q;
  fc.cq = c_modes(q);
  for (const auto& idx : fc.cq) {
    if (idx.j == 1) fc.sq.push_back(idx.k);
  }
  for (const auto& n : fc.sq) {
    if (n.num_zero() != 0) continue;
    for (int m = 0; m < 3; ++m) {
      bool inner = n[m] == q;
      for (int i = 0; i < 3; ++i) {
        if (i != m) inner = inner && n[i] >= 1 && n[i] <= q - 1;
      }
      if (inner) fc.rq[m].push_back(n);
    }
    for (int p = 0; p < 3; ++p) {
      const int m1 = p, m2 = (p + 1) % 3, o = (p + 2) % 3;
      if (n[m1] == q && n[m2] == q && n[o] >= 1 && n[o] <= q - 1) fc.lq[p].push_back(n);
    }
  }
  return fc;
}

bool partition_identity_holds(int q) {
  const auto small = FrequencyClasses::build(q);
  const auto big = FrequencyClasses::build(q + 1);
  std::set<Frequency> lhs;
  for (const auto& n : big.sq) {
    if (n.num_zero() == 0) lhs.insert(n);
  }
  std::vector<Frequency> parts;
  for (const auto& n : small.sq) {
    if (n.num_zero() == 0) parts.push_back(n);
  }
  for (const auto& r : big.rq) parts.insert(parts.end(), r.begin(), r.end());
  for (const auto& l : big.lq) parts.insert(parts.end(), l.begin(), l.end());
  parts.emplace_back(q + 1, q + 1, q + 1);
  const std::set<Frequency> rhs(parts.begin(), parts.end());
  return rhs.size() == parts.size() && rhs == lhs;
}

// ---- exact helpers --------------------------------------------------------------------------

Vec3Q witness_z(const Frequency& k, const Vec3Q& wk, const Frequency& m, const Vec3Q& wm,
                const Frequency& n, const Vec3Q& L) {
  const auto terms = advection_terms_reduced<Rational>(k, wk, m, wm, L);
  auto it = terms.find(n);
  if (it == terms.end()) return Vec3Q{Rational(0), Rational(0), Rational(0)};
  return it->second;
}

Rational det3(const Vec3Q& a, const Vec3Q& b, const Vec3Q& c) {
  return a[0] * (b[1] * c[2] - b[2] * c[1]) - a[1] * (b[0] * c[2] - b[2] * c[0]) +
         a[2] * (b[0] * c[1] - b[1] * c[0]);
}

Rational rank2_det(const Frequency& n, const Vec3Q& za, const Vec3Q& zg, const Vec3Q& L) {
  const Vec3Q nl{Rational(n[0]) / L[0], Rational(n[1]) / L[1], Rational(n[2]) / L[2]};
  return det3(nl, za, zg);
}

// ---- engine ---------------------------------------------------------------------------------

namespace {

constexpr double kPruneRel = 1e-10;
constexpr double kRankRel = 1e-9;
constexpr int kExactAttempts = 32;

double mode_norm(const ModeIndex& idx, const DomainSpec& dom) {
  return std::sqrt(EigenMode::canonical(idx.k, idx.j, dom).norm_sq());
}

}  // namespace

SaturationEngine::SaturationEngine(RationalDomain domain, int cutoff, Pairing pairing)
    : domain_(std::move(domain)), fdomain_(domain_.to_domain()), cutoff_(cutoff), pairing_(pairing) {
  if (cutoff < 3) throw std::invalid_argument("saturation cutoff must be >= 3");
}

Vec3Q SaturationEngine::amplitude(const ModeIndex& idx) const {
  return perp_basis_generic<Rational>(idx.k, domain_.lengths()).at(idx.j - 1);
}

std::vector<std::size_t> SaturationEngine::ensure_witnesses(
    const std::vector<std::pair<ModeIndex, ModeIndex>>& pairs) {
  std::vector<std::pair<ModeIndex, ModeIndex>> missing;
  for (const auto& p : pairs) {
    if (!witness_id_.count(p)) missing.push_back(p);
  }
  std::vector<Witness> fresh(missing.size());
  parallel_for(missing.size(), [&](std::size_t i) {
    const auto& [ia, ib] = missing[i];
    const auto a = EigenMode::canonical(ia.k, ia.j, fdomain_);
    const auto b = EigenMode::canonical(ib.k, ib.j, fdomain_);
    const auto bl = bilinear_sym(a, b, fdomain_);
    Witness w{ia, ib, {}};
    // Natural size of B(a,b) in L2; guards against pure round-off when the exact value is 0.
    const double ka = std::sqrt(dot(a.k().scaled(fdomain_), a.k().scaled(fdomain_)));
    const double kb = std::sqrt(dot(b.k().scaled(fdomain_), b.k().scaled(fdomain_)));
    double peak = std::numbers::pi * std::sqrt(dot(a.w(), a.w()) * dot(b.w(), b.w()) * fdomain_.volume()) * (ka + kb);
    for (const auto& [idx, c] : bl.coeffs()) {
      const double v = c * mode_norm(idx, fdomain_);
      w.coeffs.emplace_back(idx, v);
      peak = std::max(peak, std::abs(v));
    }
    std::erase_if(w.coeffs, [&](const auto& e) { return std::abs(e.second) <= kPruneRel * peak; });
    fresh[i] = std::move(w);
  });
  for (std::size_t i = 0; i < missing.size(); ++i) {
    witness_id_.emplace(missing[i], witnesses_.size());
    witnesses_.push_back(std::move(fresh[i]));
  }
  std::vector<std::size_t> ids;
  ids.reserve(pairs.size());
  for (const auto& p : pairs) ids.push_back(witness_id_.at(p));
  return ids;
}

const SaturationEngine::ExactExpansion& SaturationEngine::exact(std::size_t id) {
  auto it = exact_.find(id);
  if (it != exact_.end()) return it->second;
  const Witness& w = witnesses_[id];
  ExactExpansion e;
  const auto& L = domain_.lengths();
  e.z = advection_terms_reduced<Rational>(w.a.k, amplitude(w.a), w.b.k, amplitude(w.b), L);
  for (const auto& [n, z] : e.z) e.alpha.emplace(n, project_coefficients_generic<Rational>(n, z, L));
  return exact_.emplace(id, std::move(e)).first->second;
}

bool SaturationEngine::exact_clean(std::size_t id, const Frequency& n,
                                   const std::set<ModeIndex>& reached) {
  for (const auto& [f, alpha] : exact(id).alpha) {
    for (std::size_t j = 0; j < alpha.size(); ++j) {
      if (sgn(alpha[j]) == 0) continue;
      if (f == n) continue;
      if (!reached.count(ModeIndex{static_cast<int>(j) + 1, f})) return false;
    }
  }
  return true;
}

StepResult SaturationEngine::step(const ModeSet& seed, const ModeSet& current) {
  const auto& left = pairing_ == Pairing::SeedOnly ? seed.members() : current.members();
  std::set<std::pair<ModeIndex, ModeIndex>> pair_set;
  for (const auto& a : left) {
    for (const auto& b : current.members()) pair_set.insert(std::minmax(a, b));
  }
  const std::vector<std::pair<ModeIndex, ModeIndex>> pairs(pair_set.begin(), pair_set.end());
  const auto ids = ensure_witnesses(pairs);

  // Witness pairs are cached unordered; report the seed-side mode first.
  auto oriented = [&](std::size_t id) {
    const Witness& w = witnesses_[id];
    return seed.contains(w.a) ? std::pair{w.a, w.b} : std::pair{w.b, w.a};
  };

  StepResult out;
  std::set<ModeIndex> reached = current.members();
  const int gen = current.generation() + 1;

  auto certify_single = [&](const Frequency& n, int j, const std::vector<std::size_t>& pool,
                            const std::vector<double>& weight) -> bool {
    std::vector<std::size_t> order(pool.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](auto x, auto y) { return weight[x] > weight[y]; });
    const bool other_reached = branch_count(n) == 2 && reached.count(ModeIndex{3 - j, n});
    for (std::size_t t = 0; t < order.size() && t < static_cast<std::size_t>(kExactAttempts); ++t) {
      const std::size_t id = pool[order[t]];
      const auto& ex = exact(id);
      const auto& alpha = ex.alpha.at(n);
      if (sgn(alpha[j - 1]) == 0 || !exact_clean(id, n, reached)) continue;
      if (branch_count(n) == 2 && !other_reached && sgn(alpha[2 - j]) != 0) continue;
      const auto [a, b] = oriented(id);
      out.certificates.push_back(Certificate{ModeIndex{j, n}, {a}, {b}, {ex.z.at(n)}, alpha[j - 1],
                                             other_reached ? "complement" : "single", gen});
      return true;
    }
    return false;
  };

  auto certify_pair = [&](const Frequency& n, const std::vector<std::size_t>& pool,
                          const std::vector<Eigen::Vector2d>& rows) -> bool {
    std::vector<std::tuple<double, std::size_t, std::size_t>> cand;
    const std::size_t heads = std::min<std::size_t>(rows.size(), 8);
    for (std::size_t i = 0; i < heads; ++i) {
      for (std::size_t k = i + 1; k < rows.size(); ++k) {
        const double d = std::abs(rows[i][0] * rows[k][1] - rows[i][1] * rows[k][0]);
        if (d > kRankRel) cand.emplace_back(d, i, k);
      }
    }
    std::stable_sort(cand.begin(), cand.end(), [](const auto& x, const auto& y) { return std::get<0>(x) > std::get<0>(y); });
    for (std::size_t t = 0; t < cand.size() && t < static_cast<std::size_t>(kExactAttempts); ++t) {
      const std::size_t ia = pool[std::get<1>(cand[t])];
      const std::size_t ig = pool[std::get<2>(cand[t])];
      if (!exact_clean(ia, n, reached) || !exact_clean(ig, n, reached)) continue;
      const Vec3Q& za = exact(ia).z.at(n);
      const Vec3Q& zg = exact(ig).z.at(n);
      const Rational det = rank2_det(n, za, zg, domain_.lengths());
      if (sgn(det) == 0) continue;
      const auto [aa, ab] = oriented(ia);
      const auto [ga, gb] = oriented(ig);
      for (int j = 1; j <= 2; ++j) {
        out.certificates.push_back(
            Certificate{ModeIndex{j, n}, {aa, ga}, {ab, gb}, {za, zg}, det, "rank2", gen});
      }
      return true;
    }
    return false;
  };

  std::set<Frequency> rejected;
  for (bool changed = true; changed;) {
    changed = false;
    std::map<Frequency, std::vector<std::size_t>> pools;
    for (std::size_t id : ids) {
      std::optional<Frequency> target;
      bool usable = true;
      for (const auto& [idx, c] : witnesses_[id].coeffs) {
        if (reached.count(idx)) continue;
        if (target && *target != idx.k) {
          usable = false;
          break;
        }
        target = idx.k;
      }
      if (usable && target && target->max_component() <= cutoff_) pools[*target].push_back(id);
    }

    for (const auto& [n, pool] : pools) {
      std::vector<int> open;
      for (int j = 1; j <= branch_count(n); ++j) {
        if (!reached.count(ModeIndex{j, n})) open.push_back(j);
      }
      if (open.empty()) continue;

      // Rows restricted to the open branches, normalized.
      std::vector<Eigen::Vector2d> rows;
      for (std::size_t id : pool) {
        Eigen::Vector2d r = Eigen::Vector2d::Zero();
        for (const auto& [idx, c] : witnesses_[id].coeffs) {
          if (idx.k != n) continue;
          for (std::size_t o = 0; o < open.size(); ++o) {
            if (idx.j == open[o]) r[o] = c;
          }
        }
        rows.push_back(r / r.norm());
      }

      std::vector<int> newly;
      bool ok = false;
      bool attempted = true;
      if (open.size() == 1) {
        std::vector<double> weight;
        for (const auto& r : rows) weight.push_back(std::abs(r[0]));
        ok = certify_single(n, open[0], pool, weight);
        if (ok) newly = open;
      } else {
        Eigen::MatrixX2d stacked(rows.size(), 2);
        for (std::size_t i = 0; i < rows.size(); ++i) stacked.row(i) = rows[i].transpose();
        Eigen::JacobiSVD<Eigen::MatrixX2d> svd(stacked, Eigen::ComputeFullV);
        const auto& sv = svd.singularValues();
        if (sv.size() == 2 && sv[1] > kRankRel * sv[0]) {
          ok = certify_pair(n, pool, rows);
          if (ok) newly = open;
        } else {
          attempted = false;
          const Eigen::Vector2d d = svd.matrixV().col(0);
          for (int o = 0; o < 2 && !ok; ++o) {
            if (std::abs(d[1 - o]) > kRankRel) continue;
            attempted = true;
            std::vector<double> weight;
            for (const auto& r : rows) weight.push_back(std::abs(r[o]));
            ok = certify_single(n, open[o], pool, weight);
            if (ok) newly = {open[o]};
          }
        }
      }
      if (!ok) {
        if (attempted && rejected.insert(n).second) ++out.exact_rejections;
        continue;
      }
      for (int j : newly) reached.insert(ModeIndex{j, n});
      changed = true;
    }
  }
  out.next = ModeSet(gen, std::move(reached));
  return out;
}

StepResult f_l_step(const ModeSet& seed, const ModeSet& current, int cutoff,
                    const RationalDomain& domain, Pairing pairing) {
  SaturationEngine engine(domain, cutoff, pairing);
  return engine.step(seed, current);
}

SaturationReport saturate(int cutoff, int max_generations, const RationalDomain& domain, Pairing pairing) {
  SaturationEngine engine(domain, cutoff, pairing);
  SaturationReport rep;
  rep.cutoff = cutoff;
  const ModeSet seed = seed_set(domain.to_domain());
  rep.generations.push_back(seed);
  for (const auto& m : seed.members()) rep.reached_at[m] = 0;

  const auto all = c_modes(cutoff);
  while (static_cast<int>(rep.generations.size()) <= max_generations && !rep.generations.back().includes(all)) {
    StepResult res = engine.step(seed, rep.generations.back());
    rep.exact_rejections += res.exact_rejections;
    for (const auto& m : res.next.members()) rep.reached_at.try_emplace(m, res.next.generation());
    for (auto& c : res.certificates) rep.certificates.push_back(std::move(c));
    const bool stalled = res.next.size() == rep.generations.back().size();
    rep.generations.push_back(std::move(res.next));
    if (stalled) break;
  }

  for (int q = 3; q <= cutoff; ++q) {
    const auto cq = c_modes(q);
    int first = -1;
    for (const auto& g : rep.generations) {
      if (g.includes(cq)) {
        first = g.generation();
        break;
      }
    }
    rep.first_generation[q] = first;
    if (first < 0) {
      std::size_t missing = 0;
      for (const auto& m : cq) missing += !rep.generations.back().contains(m);
      rep.failures.push_back(fmt::format("C^{} not reached within {} generations ({} modes missing)", q,
                                         max_generations, missing));
    } else if (first > std::max(q - 1, 0) || (q == 3 && first != 0)) {
      rep.failures.push_back(fmt::format("C^{} first contained in G^{} > G^{}", q, first, q - 1));
    }
  }
  return rep;
}

}  // namespace satspec
