// Acceptance run: one PASS/FAIL line per criterion. Exit status is the number of failures.

#include <fmt/format.h>

#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <string>

#include "oracles.hpp"
#include "satspec/galerkin.hpp"
#include "satspec/interaction.hpp"
#include "satspec/proof_trace.hpp"
#include "satspec/saturation.hpp"

using namespace satspec;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

int failures = 0;

void criterion(int id, const std::string& name, double limit_s, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool in_time = secs <= limit_s;
  const bool pass = o.pass && in_time;
  if (!pass) ++failures;
  std::cout << fmt::format("{} criterion {}: {}; {}; {:.2f} s (limit {:.0f} s){}", pass ? "PASS" : "FAIL", id, name,
                           o.detail, secs, limit_s, in_time ? "" : ", over time")
            << std::endl;
}

const std::vector<RationalDomain>& exact_domains() {
  static const std::vector<RationalDomain> d{RationalDomain::parse("1,1,1"), RationalDomain::parse("1,2,3"),
                                             RationalDomain::parse("7/5,11/3,2")};
  return d;
}

std::vector<DomainSpec> float_domains() {
  return {DomainSpec(1, 1, 1), DomainSpec(1, 2, 3), DomainSpec(7.0 / 5, 11.0 / 3, 2),
          DomainSpec(1, std::sqrt(2.0), std::exp(1.0))};
}

double scale_of(const EigenMode& a, const EigenMode& b, const DomainSpec& dom) {
  return std::numbers::pi * oracle::norm(a.w()) * oracle::norm(b.w()) *
         (oracle::norm(a.k().scaled(dom)) + oracle::norm(b.k().scaled(dom)));
}

Outcome seed_cardinality() {
  std::string sizes;
  bool ok = true;
  for (const auto& d : float_domains()) {
    const std::size_t n = seed_set(d).size();
    ok = ok && n == 81;
    sizes += (sizes.empty() ? "" : ",") + std::to_string(n);
  }
  return {ok, "seed sizes on 4 boxes: " + sizes};
}

Outcome dichotomy() {
  int zero_ok = 0, zero_n = 0, nonzero_ok = 0, nonzero_n = 0;
  double worst_2d = 0.0, least_3d = std::numeric_limits<double>::infinity();
  for (const auto& d : float_domains()) {
    for (const auto& m : enumerate_modes(5, d)) {
      const double cscale = scale_of(m, m, d) / oracle::norm(m.w());
      const double r = project(self_advection(m, d), d).max_abs() / cscale;
      if (m.k().num_zero() == 1) {
        ++zero_n;
        zero_ok += r <= 1e-12;
        worst_2d = std::max(worst_2d, r);
      } else {
        ++nonzero_n;
        nonzero_ok += r >= 1e-6;
        least_3d = std::min(least_3d, r);
      }
    }
  }
  return {zero_ok == zero_n && nonzero_ok == nonzero_n,
          fmt::format("#0=1: {}/{} vanish (max {:.2e}); #0=0: {}/{} nonzero (min {:.3e}); relative to pi|w||k^L|",
                      zero_ok, zero_n, worst_2d, nonzero_ok, nonzero_n, least_3d)};
}

Outcome oracle_equivalence() {
  const std::vector<DomainSpec> doms{DomainSpec(1, 1, 1), DomainSpec(1, 2, 3),
                                     DomainSpec(1, std::sqrt(2.0), std::exp(1.0))};
  std::mt19937_64 rng(2024);
  double worst = 0.0;
  for (int t = 0; t < 50; ++t) {
    const DomainSpec& d = doms[t % 3];
    const auto modes = enumerate_modes(4, d);
    std::uniform_int_distribution<std::size_t> pick(0, modes.size() - 1);
    const EigenMode& a = modes[pick(rng)];
    const EigenMode& b = modes[pick(rng)];
    const FieldExpansion bl = bilinear_sym(a, b, d);
    std::vector<EigenMode> targets;
    for (const auto& [idx, c] : bl.coeffs()) targets.push_back(EigenMode::canonical(idx.k, idx.j, d));
    targets.push_back(modes[pick(rng)]);
    const FieldExpansion q = quadrature_oracle(
        [&](const Vec3& x) { return oracle::advection_pointwise(a, b, x, d); }, targets, 24, d);
    const double ref = std::max({bl.max_abs(), q.max_abs(), 1e-6 * scale_of(a, b, d)});
    for (const auto& m : targets) {
      worst = std::max(worst, std::abs(bl.coeff(m.index()) - q.coeff(m.index())) / ref);
    }
  }
  return {worst <= 1e-9, fmt::format("50 pairs on 3 boxes, worst relative deviation {:.2e}", worst)};
}

Outcome proof_replay() {
  std::size_t checks = 0, mismatched = 0, corrected_ok = 0, signs = 0, signs_ok = 0, leray = 0, leray_ok = 0;
  std::set<std::string> displays;
  for (const auto& d : exact_domains()) {
    for (int q = 3; q <= 10; ++q) {
      const TraceReport rep = paper_trace(q, d);
      checks += rep.checks.size();
      for (const auto& c : rep.checks) {
        const std::string tail = c.display.substr(c.display.find('/') + 1);
        if (tail == "det_sign") {
          ++signs;
          signs_ok += c.matches_printed;
        }
        if (tail == "leray_det") {
          ++leray;
          leray_ok += c.matches_printed;
        }
        if (!c.matches_printed) {
          ++mismatched;
          displays.insert(c.display);
          corrected_ok += c.matches_corrected.value_or(false);
        }
      }
    }
  }
  std::string list;
  for (const auto& s : displays) list += (list.empty() ? "" : " ") + s;
  return {mismatched == 0,
          fmt::format("{} checks, {} printed displays differ from the exact values ({} of them match a corrected "
                      "closed form) in: {}; sign claims {}/{}; nonzero determinants {}/{}",
                      checks, mismatched, corrected_ok, list, signs_ok, signs, leray_ok, leray)};
}

Outcome reachability() {
  bool ok = true;
  std::string parts;
  for (const auto& d : exact_domains()) {
    const SaturationReport rep = saturate(6, 10, d);
    std::string gens;
    for (int q = 4; q <= 6; ++q) {
      const auto it = rep.first_generation.find(q);
      const int j = it == rep.first_generation.end() ? -1 : it->second;
      ok = ok && j >= 0 && j <= q - 1;
      gens += fmt::format("{}C^{}->G^{}", gens.empty() ? "" : " ", q, j);
    }
    ok = ok && rep.ok() && rep.exact_rejections == 0;
    parts += fmt::format("{}L={}: {} ({} certificates)", parts.empty() ? "" : "; ", d.str(), gens,
                         rep.certificates.size());
  }
  return {ok, parts};
}

Outcome galerkin_integrity() {
  const auto sys = GalerkinSystem::assemble(DomainSpec(1, 2, 3, 0.1), 4);
  std::mt19937_64 rng(77);
  std::normal_distribution<double> g(0.0, 1.0);
  auto random_state = [&](double s) {
    State u(sys.size());
    for (auto& x : u) x = s * g(rng);
    return u;
  };
  double worst_neutral = 0.0;
  State b(sys.size());
  for (int t = 0; t < 100; ++t) {
    const State u = random_state(1.0);
    sys.nonlinear(u.data(), b.data());
    double dot = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) dot += sys.norms_sq()[i] * u[i] * b[i];
    worst_neutral = std::max(worst_neutral, std::abs(dot) / std::pow(energy(sys, u), 1.5));
  }

  const double T = 1.0;
  const auto sched = ControlSchedule::zeros(T, 1, sys.control_modes().size());
  const State u0 = random_state(1e-12);
  const State uT = final_state(sys, u0, sched, 1e-3);
  double umax = 0.0, worst_decay = 0.0;
  for (double x : u0) umax = std::max(umax, std::abs(x));
  for (std::size_t i = 0; i < u0.size(); ++i) {
    worst_decay = std::max(worst_decay, std::abs(uT[i] - u0[i] * std::exp(-sys.lambdas()[i] * T)) / umax);
  }

  const auto sys3 = GalerkinSystem::assemble(DomainSpec(1, 1, 1, 0.1), 3);
  State v0(sys3.size());
  for (auto& x : v0) x = 0.3 * g(rng);
  const auto s3 = ControlSchedule::zeros(0.4, 1, sys3.control_modes().size());
  const State a = final_state(sys3, v0, s3, 3.2e-3);
  const State c = final_state(sys3, v0, s3, 1.6e-3);
  const State e = final_state(sys3, v0, s3, 0.8e-3);
  const double order = std::log2(v_distance(sys3, a, c) / v_distance(sys3, c, e));

  return {worst_neutral <= 1e-10 && worst_decay <= 1e-8 && order >= 3.5,
          fmt::format("energy neutrality max |<B(u,u),u>|/|u|^3 = {:.2e} (100 states, cutoff 4); linear decay max "
                      "error {:.2e} of max|u0|; RK4 observed order {:.3f}",
                      worst_neutral, worst_decay, order)};
}

Outcome adjoint() {
  double worst = 0.0;
  int trials = 0;
  for (const DomainSpec& d : {DomainSpec(1, 1, 1, 0.1), DomainSpec(7.0 / 5, 11.0 / 3, 2, 0.1)}) {
    const auto sys = GalerkinSystem::assemble(d, 3);
    std::mt19937_64 rng(99);
    std::normal_distribution<double> g(0.0, 1.0);
    State u0(sys.size()), target(sys.size());
    for (auto& x : u0) x = 0.2 * g(rng);
    for (auto& x : target) x = 0.1 * g(rng);
    ControlSchedule x = ControlSchedule::zeros(0.3, 3, sys.control_modes().size());
    for (auto& s : x.values)
      for (auto& v : s) v = 0.5 * g(rng);
    const double dt = std::min(2e-3, max_step(sys));
    const CostGradient cg = cost_and_gradient(sys, u0, target, x, dt);
    for (int t = 0; t < 5; ++t, ++trials) {
      ControlSchedule p = x, m = x;
      double dir = 0.0;
      const double eps = 1e-4;
      for (std::size_t s = 0; s < x.values.size(); ++s)
        for (std::size_t i = 0; i < x.values[s].size(); ++i) {
          const double v = g(rng);
          dir += cg.grad[s][i] * v;
          p.values[s][i] += eps * v;
          m.values[s][i] -= eps * v;
        }
      const double fd = (cost(sys, u0, target, p, dt) - cost(sys, u0, target, m, dt)) / (2 * eps);
      worst = std::max(worst, std::abs(fd - dir) / std::abs(dir));
    }
  }
  return {worst <= 1e-5, fmt::format("{} random directions on 2 cutoff-3 systems, worst relative deviation {:.2e}",
                                     trials, worst)};
}

Outcome controllability() {
  // Premise: some mode of the cutoff-5 truncation lies outside control_modes.
  std::string outside;
  bool has_outside = false;
  for (const auto& d : float_domains()) {
    const auto sys = GalerkinSystem::assemble(d.with_nu(0.1), 5);
    const std::size_t n = sys.size() - sys.control_modes().size();
    has_outside = has_outside || n > 0;
    outside += fmt::format("{}{}", outside.empty() ? "" : ",", n);
  }

  const auto sys = GalerkinSystem::assemble(DomainSpec(1, 1, 1, 0.1), 5);
  const ModeIndex tgt{1, Frequency(4, 4, 5)};
  const std::size_t ti = *sys.index_of(tgt);
  State target(sys.size(), 0.0);
  target[ti] = 1e-2 / std::sqrt(sys.norms_sq()[ti]);
  const State zero(sys.size(), 0.0);
  SteerOptions opt;
  opt.dt = 1e-3;
  const double T = 5.0;
  const int segments = 8, iters = 500;

  auto reduction = [](const SteerResult& r) { return 1.0 - r.final_distance / r.initial_distance; };
  const SteerResult full = steer(sys, zero, target, T, segments, iters, opt);

  std::vector<std::size_t> flat;
  for (std::size_t i = 0; i < sys.size(); ++i) {
    const Frequency& k = sys.modes()[i].k();
    if (k.max_component() <= 3 && k.num_zero() == 1) flat.push_back(i);
  }
  const SteerResult two_d = steer(sys.with_controls(flat), zero, target, T, segments, iters, opt);

  const bool measured = reduction(full) >= 0.9 && reduction(two_d) < 0.5;
  return {has_outside && measured,
          fmt::format("modes outside control_modes at cutoff 5 on 4 boxes: {}, so no non-control target exists; "
                      "measured with target 1e-2 * unit-L2 {} (a control mode), nu=0.1, T=5, dt=1e-3, 8 segments: "
                      "G^1 controls ({} modes) reduce the V-distance by {:.1f}% in {} iterations; #0=1 modes of C "
                      "({} modes) reduce it by {:.1f}% ({} iterations{})",
                      outside, tgt.str(), sys.control_modes().size(), 100 * reduction(full), full.iterations,
                      flat.size(), 100 * reduction(two_d), two_d.iterations, two_d.stagnated ? ", stagnated" : "")};
}

}  // namespace

int main() {
  criterion(1, "seed cardinality", 1, seed_cardinality);
  criterion(2, "self-interaction dichotomy", 10, dichotomy);
  criterion(3, "oracle equivalence", 120, oracle_equivalence);
  criterion(4, "proof replay", 30, proof_replay);
  criterion(5, "saturation reachability", 300, reachability);
  criterion(6, "Galerkin integrity", 120, galerkin_integrity);
  criterion(7, "adjoint correctness", 60, adjoint);
  criterion(8, "controllability demonstration", 600, controllability);
  std::cout << fmt::format("{} of 8 criteria failed", failures) << std::endl;
  return failures;
}
