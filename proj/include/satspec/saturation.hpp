#pragma once

// Reachability of the recursion G^0 = span C, G^{j+1} = G^j + span{ B(a,b) : a in C, b in G^j },
// tracked as a set of eigenmode indices up to a per-axis frequency cutoff.
//
// A pair (a,b) is a witness for frequency n once every component of B(a,b) off n lies on modes
// already known to be in the current space. Witnesses are pooled per frequency and the span of
// their projected coefficients decides which branches at n are added. Decisions are made in
// floating point and then confirmed exactly with pi factored out.

#include <array>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "satspec/interaction.hpp"
#include "satspec/rational.hpp"

namespace satspec {

class ModeSet {
 public:
  ModeSet() = default;
  ModeSet(int generation, std::set<ModeIndex> members)
      : generation_(generation), members_(std::move(members)) {}

  int generation() const { return generation_; }
  const std::set<ModeIndex>& members() const { return members_; }
  std::size_t size() const { return members_.size(); }
  bool contains(const ModeIndex& idx) const { return members_.count(idx) != 0; }
  /// All 2 - #0(n) branches present.
  bool fully_reached(const Frequency& n) const;
  bool includes(const ModeSet& other) const;
  bool includes(const std::vector<ModeIndex>& modes) const;

  void insert(const ModeIndex& idx) { members_.insert(idx); }

 private:
  int generation_ = 0;
  std::set<ModeIndex> members_;
};

/// Canonical mode indices of C^q (frequencies S^q, all branches).
std::vector<ModeIndex> c_modes(int q);

/// C = C^3 as generation 0. Every index is checked to be admissible on the domain.
ModeSet seed_set(const DomainSpec& domain);

struct Certificate {
  ModeIndex target;
  std::vector<ModeIndex> pair_a;  // seed side, one per witness
  std::vector<ModeIndex> pair_b;  // current side
  std::vector<Vec3Q> z;           // advection term at the target frequency, divided by pi
  Rational det_value;             // rank-2: det(n^L, z1, z2)/pi^2; single: alpha_j/pi
  std::string rank_evidence;      // "rank2", "complement" or "single"
  int generation = 0;
};

nlohmann::json to_json(const Certificate& c);
nlohmann::json to_json(const ModeIndex& idx);

/// Index sets of the induction: S^q, C^q, R^q_m and L^q_{m1,m2}.
struct FrequencyClasses {
  int q = 0;
  std::vector<Frequency> sq;
  std::vector<ModeIndex> cq;
  std::array<std::vector<Frequency>, 3> rq;  // m = 1, 2, 3
  std::array<std::vector<Frequency>, 3> lq;  // (1,2), (2,3), (3,1)

  static FrequencyClasses build(int q);
};

/// {n in S^{q+1}: #0=0} is the disjoint union of {n in S^q: #0=0}, R^{q+1}_m, L^{q+1}_{m1,m2}
/// and {(q+1,q+1,q+1)}.
bool partition_identity_holds(int q);

// ---- exact helpers (pi factored out) --------------------------------------------------------

/// z/pi at frequency n of (Y^k.grad)Y^m + (Y^m.grad)Y^k for amplitudes wk, wm.
Vec3Q witness_z(const Frequency& k, const Vec3Q& wk, const Frequency& m, const Vec3Q& wm,
                const Frequency& n, const Vec3Q& L);

/// det(n^L, za, zg)
Rational rank2_det(const Frequency& n, const Vec3Q& za, const Vec3Q& zg, const Vec3Q& L);

Rational det3(const Vec3Q& a, const Vec3Q& b, const Vec3Q& c);

// ---- engine ---------------------------------------------------------------------------------

enum class Pairing {
  SeedOnly,  // a in seed, b in current
  AllPairs,  // a and b in current
};

struct StepResult {
  ModeSet next;
  std::vector<Certificate> certificates;
  /// Float decisions that the exact check rejected (should stay 0).
  int exact_rejections = 0;
};

class SaturationEngine {
 public:
  SaturationEngine(RationalDomain domain, int cutoff, Pairing pairing = Pairing::SeedOnly);

  StepResult step(const ModeSet& seed, const ModeSet& current);

  int cutoff() const { return cutoff_; }
  const RationalDomain& domain() const { return domain_; }

 private:
  struct Witness {
    ModeIndex a;
    ModeIndex b;
    std::vector<std::pair<ModeIndex, double>> coeffs;  // weighted by mode L2 norm, pruned
  };
  struct ExactExpansion {
    std::map<Frequency, Vec3Q> z;
    std::map<Frequency, std::vector<Rational>> alpha;
  };

  const Witness& witness(std::size_t id) const { return witnesses_[id]; }
  const ExactExpansion& exact(std::size_t id);
  bool exact_clean(std::size_t id, const Frequency& n, const std::set<ModeIndex>& reached);
  std::vector<std::size_t> ensure_witnesses(const std::vector<std::pair<ModeIndex, ModeIndex>>& pairs);
  Vec3Q amplitude(const ModeIndex& idx) const;

  RationalDomain domain_;
  DomainSpec fdomain_;
  int cutoff_;
  Pairing pairing_;
  std::vector<Witness> witnesses_;
  std::map<std::pair<ModeIndex, ModeIndex>, std::size_t> witness_id_;
  std::map<std::size_t, ExactExpansion> exact_;
};

StepResult f_l_step(const ModeSet& seed, const ModeSet& current, int cutoff,
                    const RationalDomain& domain, Pairing pairing = Pairing::SeedOnly);

struct SaturationReport {
  int cutoff = 0;
  std::vector<ModeSet> generations;
  std::vector<Certificate> certificates;
  std::map<ModeIndex, int> reached_at;
  /// q -> first j with C^q in G^j, or -1 if never.
  std::map<int, int> first_generation;
  int exact_rejections = 0;
  std::vector<std::string> failures;

  bool ok() const { return failures.empty(); }
};

SaturationReport saturate(int cutoff, int max_generations, const RationalDomain& domain,
                          Pairing pairing = Pairing::SeedOnly);

}  // namespace satspec
