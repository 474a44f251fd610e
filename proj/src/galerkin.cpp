#include "satspec/galerkin.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

#include "satspec/parallel.hpp"

namespace satspec {

double ControlSchedule::horizon() const {
  double t = 0.0;
  for (double d : durations) t += d;
  return t;
}

ControlSchedule ControlSchedule::zeros(double T, int n_segments, std::size_t n_controls) {
  if (n_segments < 1 || !(T > 0.0)) throw std::invalid_argument("ControlSchedule: need T > 0 and segments >= 1");
  ControlSchedule s;
  s.durations.assign(n_segments, T / n_segments);
  s.values.assign(n_segments, std::vector<double>(n_controls, 0.0));
  return s;
}

// ---- assembly -------------------------------------------------------------------------------

GalerkinSystem GalerkinSystem::assemble(const DomainSpec& domain, int cutoff, const FieldExpansion& h_spec) {
  if (cutoff < 3) throw std::invalid_argument("GalerkinSystem: cutoff must be >= 3");
  GalerkinSystem sys(domain);
  sys.cutoff_ = cutoff;
  sys.modes_ = enumerate_modes(cutoff, domain);
  const std::size_t M = sys.modes_.size();
  std::map<ModeIndex, std::size_t> pos;
  for (std::size_t i = 0; i < M; ++i) {
    pos.emplace(sys.modes_[i].index(), i);
    sys.lambdas_.push_back(eigenvalue(sys.modes_[i].k(), domain));
    sys.norms_sq_.push_back(sys.modes_[i].norm_sq());
  }

  struct Entry {
    std::uint32_t c;
    double coef;
  };
  const std::size_t P = M * (M + 1) / 2;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
  pairs.reserve(P);
  for (std::size_t a = 0; a < M; ++a)
    for (std::size_t b = a; b < M; ++b) pairs.emplace_back(a, b);
  std::vector<std::vector<Entry>> per_pair(P);
  parallel_for(P, [&](std::size_t p) {
    const auto [a, b] = pairs[p];
    const FieldExpansion e = bilinear_sym(sys.modes_[a], sys.modes_[b], domain);
    const double half = (a == b) ? 0.5 : 1.0;
    for (const auto& [idx, c] : e.coeffs()) {
      auto it = pos.find(idx);
      if (it != pos.end()) per_pair[p].push_back({static_cast<std::uint32_t>(it->second), half * c});
    }
  });
  double tmax = 0.0;
  for (const auto& v : per_pair)
    for (const auto& e : v) tmax = std::max(tmax, std::abs(e.coef));
  const double cut = kPruneRel * tmax;
  for (std::size_t p = 0; p < P; ++p) {
    bool any = false;
    for (const auto& e : per_pair[p]) {
      if (std::abs(e.coef) <= cut) continue;
      if (!any) {
        sys.pair_a_.push_back(pairs[p].first);
        sys.pair_b_.push_back(pairs[p].second);
        sys.pair_start_.push_back(static_cast<std::uint32_t>(sys.coef_.size()));
        any = true;
      }
      sys.out_c_.push_back(e.c);
      sys.coef_.push_back(e.coef);
    }
  }
  sys.pair_start_.push_back(static_cast<std::uint32_t>(sys.coef_.size()));

  sys.h_ = sys.state_from(h_spec);

  // Mode support of span(C u B(C,C)) with C the modes of frequency at most 3.
  std::vector<bool> in_g1(M, false);
  for (std::size_t i = 0; i < M; ++i) in_g1[i] = sys.modes_[i].k().max_component() <= 3;
  for (std::size_t p = 0; p + 1 < sys.pair_start_.size(); ++p) {
    if (sys.modes_[sys.pair_a_[p]].k().max_component() > 3 || sys.modes_[sys.pair_b_[p]].k().max_component() > 3) continue;
    for (std::uint32_t e = sys.pair_start_[p]; e < sys.pair_start_[p + 1]; ++e) in_g1[sys.out_c_[e]] = true;
  }
  for (std::size_t i = 0; i < M; ++i) {
    if (in_g1[i]) sys.control_.push_back(i);
  }
  return sys;
}

double GalerkinSystem::lambda_max() const {
  return lambdas_.empty() ? 0.0 : *std::max_element(lambdas_.begin(), lambdas_.end());
}

std::optional<std::size_t> GalerkinSystem::index_of(const ModeIndex& idx) const {
  auto it = std::lower_bound(modes_.begin(), modes_.end(), idx,
                             [](const EigenMode& m, const ModeIndex& i) { return m.index() < i; });
  if (it == modes_.end() || it->index() != idx) return std::nullopt;
  return static_cast<std::size_t>(it - modes_.begin());
}

double GalerkinSystem::tensor_entry(std::size_t c, std::size_t a, std::size_t b) const {
  if (a > b) std::swap(a, b);
  for (std::size_t p = 0; p + 1 < pair_start_.size(); ++p) {
    if (pair_a_[p] != a || pair_b_[p] != b) continue;
    for (std::uint32_t e = pair_start_[p]; e < pair_start_[p + 1]; ++e) {
      if (out_c_[e] == c) return (a == b) ? 2.0 * coef_[e] : coef_[e];
    }
  }
  return 0.0;
}

void GalerkinSystem::nonlinear(const double* u, double* out) const {
  std::fill(out, out + size(), 0.0);
  const std::size_t P = pair_a_.size();
  for (std::size_t p = 0; p < P; ++p) {
    const double s = u[pair_a_[p]] * u[pair_b_[p]];
    if (s == 0.0) continue;
    for (std::uint32_t e = pair_start_[p]; e < pair_start_[p + 1]; ++e) out[out_c_[e]] += coef_[e] * s;
  }
}

void GalerkinSystem::nonlinear_transpose(const double* u, const double* p, double* out) const {
  const std::size_t P = pair_a_.size();
  for (std::size_t q = 0; q < P; ++q) {
    double t = 0.0;
    for (std::uint32_t e = pair_start_[q]; e < pair_start_[q + 1]; ++e) t += coef_[e] * p[out_c_[e]];
    out[pair_a_[q]] += t * u[pair_b_[q]];
    out[pair_b_[q]] += t * u[pair_a_[q]];
  }
}

GalerkinSystem GalerkinSystem::with_controls(std::vector<std::size_t> control) const {
  std::sort(control.begin(), control.end());
  control.erase(std::unique(control.begin(), control.end()), control.end());
  for (std::size_t c : control) {
    if (c >= size()) throw std::out_of_range("with_controls: mode index out of range");
  }
  GalerkinSystem out = *this;
  out.control_ = std::move(control);
  return out;
}

GalerkinSystem GalerkinSystem::with_h(State h) const {
  if (h.size() != size()) throw std::invalid_argument("with_h: size mismatch");
  GalerkinSystem out = *this;
  out.h_ = std::move(h);
  return out;
}

State GalerkinSystem::state_from(const FieldExpansion& e) const {
  State u(size(), 0.0);
  for (const auto& [idx, c] : e.coeffs()) {
    auto i = index_of(idx);
    if (!i) throw std::invalid_argument("state_from: mode " + idx.str() + " outside the truncation");
    u[*i] = c;
  }
  return u;
}

FieldExpansion GalerkinSystem::expansion_of(const State& u) const {
  FieldExpansion e;
  for (std::size_t i = 0; i < size(); ++i) e.add(modes_[i].index(), u[i]);
  return e;
}

// ---- dynamics -------------------------------------------------------------------------------

namespace {

void check_size(const GalerkinSystem& sys, const State& u, const char* what) {
  if (u.size() != sys.size()) throw std::invalid_argument(std::string(what) + ": state size mismatch");
}

// f = -lambda u - B(u,u) - h + eta
void eval_rhs(const GalerkinSystem& sys, const double* u, const State& eta, double* f) {
  sys.nonlinear(u, f);
  const auto& lam = sys.lambdas();
  const auto& h = sys.h();
  for (std::size_t i = 0; i < sys.size(); ++i) f[i] = -lam[i] * u[i] - f[i] - h[i] + eta[i];
}

// out = J(u)^T p with J = -diag(lambda) - dB(u)
void rhs_transpose(const GalerkinSystem& sys, const double* u, const double* p, double* out) {
  const std::size_t M = sys.size();
  std::vector<double> tmp(M, 0.0);
  sys.nonlinear_transpose(u, p, tmp.data());
  const auto& lam = sys.lambdas();
  for (std::size_t i = 0; i < M; ++i) out[i] = -lam[i] * p[i] - tmp[i];
}

struct Stepper {
  const GalerkinSystem& sys;
  std::vector<double> k1, k2, k3, k4, tmp;
  explicit Stepper(const GalerkinSystem& s)
      : sys(s), k1(s.size()), k2(s.size()), k3(s.size()), k4(s.size()), tmp(s.size()) {}

  void step(State& u, const State& eta, double h) {
    const std::size_t M = u.size();
    eval_rhs(sys, u.data(), eta, k1.data());
    for (std::size_t i = 0; i < M; ++i) tmp[i] = u[i] + 0.5 * h * k1[i];
    eval_rhs(sys, tmp.data(), eta, k2.data());
    for (std::size_t i = 0; i < M; ++i) tmp[i] = u[i] + 0.5 * h * k2[i];
    eval_rhs(sys, tmp.data(), eta, k3.data());
    for (std::size_t i = 0; i < M; ++i) tmp[i] = u[i] + h * k3[i];
    eval_rhs(sys, tmp.data(), eta, k4.data());
    for (std::size_t i = 0; i < M; ++i) u[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  }
};

void check_finite(const State& u, double t) {
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (!std::isfinite(u[i])) {
      std::ostringstream os;
      os << "integration blew up at t = " << t << " (component " << i << " is " << u[i] << ")";
      throw BlowUpError(os.str());
    }
  }
}

struct SegmentPlan {
  std::size_t steps;
  double h;
};

std::vector<SegmentPlan> plan(const GalerkinSystem& sys, const ControlSchedule& schedule, double dt) {
  if (schedule.durations.size() != schedule.values.size() || schedule.durations.empty()) {
    throw std::invalid_argument("schedule: durations and values must be non-empty and of equal length");
  }
  if (!(dt > 0.0)) throw std::invalid_argument("integrate: dt must be positive");
  const double limit = max_step(sys);
  if (dt > limit * (1.0 + 1e-12)) {
    std::ostringstream os;
    os << "integrate: dt = " << dt << " exceeds 0.1/lambda_max = " << limit;
    throw std::invalid_argument(os.str());
  }
  std::vector<SegmentPlan> out;
  for (std::size_t s = 0; s < schedule.durations.size(); ++s) {
    const double d = schedule.durations[s];
    if (!(d > 0.0)) throw std::invalid_argument("schedule: segment durations must be positive");
    if (dt > d * (1.0 + 1e-12)) throw std::invalid_argument("integrate: dt exceeds a segment duration");
    if (schedule.values[s].size() != sys.control_modes().size()) {
      throw std::invalid_argument("schedule: values must have one entry per control mode");
    }
    const auto n = static_cast<std::size_t>(std::ceil(d / dt - 1e-9));
    out.push_back({n, d / static_cast<double>(n)});
  }
  return out;
}

}  // namespace

State rhs(const GalerkinSystem& sys, const State& u, const State& eta) {
  check_size(sys, u, "rhs");
  check_size(sys, eta, "rhs");
  State f(sys.size());
  eval_rhs(sys, u.data(), eta, f.data());
  return f;
}

State expand_control(const GalerkinSystem& sys, const std::vector<double>& slot_values) {
  const auto& ctl = sys.control_modes();
  if (slot_values.size() != ctl.size()) throw std::invalid_argument("expand_control: size mismatch");
  State eta(sys.size(), 0.0);
  for (std::size_t s = 0; s < ctl.size(); ++s) eta[ctl[s]] = slot_values[s];
  return eta;
}

double energy(const GalerkinSystem& sys, const State& u) {
  check_size(sys, u, "energy");
  double e = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) e += sys.norms_sq()[i] * u[i] * u[i];
  return e;
}

double v_norm(const GalerkinSystem& sys, const State& u) {
  check_size(sys, u, "v_norm");
  const double nu = sys.domain().nu();
  double e = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) e += sys.lambdas()[i] / nu * sys.norms_sq()[i] * u[i] * u[i];
  return std::sqrt(e);
}

double v_distance(const GalerkinSystem& sys, const State& u, const State& v) {
  check_size(sys, v, "v_distance");
  State d(u);
  for (std::size_t i = 0; i < d.size(); ++i) d[i] -= v[i];
  return v_norm(sys, d);
}

double max_step(const GalerkinSystem& sys) { return 0.1 / sys.lambda_max(); }

Trajectory integrate(const GalerkinSystem& sys, const State& u0, const ControlSchedule& schedule, double dt,
                     std::size_t sample_every) {
  check_size(sys, u0, "integrate");
  if (sample_every == 0) sample_every = 1;
  const auto segs = plan(sys, schedule, dt);
  Trajectory tr;
  State u = u0;
  Stepper st(sys);
  double t = 0.0;
  tr.times.push_back(t);
  tr.states.push_back(u);
  std::size_t count = 0;
  for (std::size_t s = 0; s < segs.size(); ++s) {
    const State eta = expand_control(sys, schedule.values[s]);
    const double t0 = t;
    for (std::size_t n = 0; n < segs[s].steps; ++n) {
      st.step(u, eta, segs[s].h);
      t = t0 + segs[s].h * static_cast<double>(n + 1);
      check_finite(u, t);
      ++count;
      if (count % sample_every == 0 || n + 1 == segs[s].steps) {
        tr.times.push_back(t);
        tr.states.push_back(u);
      }
    }
  }
  return tr;
}

State final_state(const GalerkinSystem& sys, const State& u0, const ControlSchedule& schedule, double dt) {
  check_size(sys, u0, "final_state");
  const auto segs = plan(sys, schedule, dt);
  State u = u0;
  Stepper st(sys);
  double t = 0.0;
  for (std::size_t s = 0; s < segs.size(); ++s) {
    const State eta = expand_control(sys, schedule.values[s]);
    for (std::size_t n = 0; n < segs[s].steps; ++n) st.step(u, eta, segs[s].h);
    t += schedule.durations[s];
    check_finite(u, t);
  }
  return u;
}

// ---- cost and adjoint -----------------------------------------------------------------------

namespace {

double weighted_sq(const GalerkinSystem& sys, const State& u, const State& target) {
  const double nu = sys.domain().nu();
  double J = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double d = u[i] - target[i];
    J += sys.lambdas()[i] / nu * sys.norms_sq()[i] * d * d;
  }
  return J;
}

}  // namespace

double cost(const GalerkinSystem& sys, const State& u0, const State& target, const ControlSchedule& schedule,
            double dt) {
  check_size(sys, target, "cost");
  return weighted_sq(sys, final_state(sys, u0, schedule, dt), target);
}

CostGradient cost_and_gradient(const GalerkinSystem& sys, const State& u0, const State& target,
                               const ControlSchedule& schedule, double dt) {
  check_size(sys, u0, "cost_and_gradient");
  check_size(sys, target, "cost_and_gradient");
  const auto segs = plan(sys, schedule, dt);
  const std::size_t M = sys.size();

  // Forward pass storing the state at the start of every step.
  std::size_t total = 0;
  for (const auto& s : segs) total += s.steps;
  std::vector<double> hist(total * M);
  std::vector<State> etas;
  State u = u0;
  Stepper st(sys);
  std::size_t n = 0;
  double t = 0.0;
  for (std::size_t s = 0; s < segs.size(); ++s) {
    etas.push_back(expand_control(sys, schedule.values[s]));
    for (std::size_t i = 0; i < segs[s].steps; ++i, ++n) {
      std::copy(u.begin(), u.end(), hist.begin() + static_cast<std::ptrdiff_t>(n * M));
      st.step(u, etas.back(), segs[s].h);
    }
    t += schedule.durations[s];
    check_finite(u, t);
  }

  CostGradient out;
  out.J = weighted_sq(sys, u, target);
  out.grad.assign(segs.size(), std::vector<double>(sys.control_modes().size(), 0.0));

  const double nu = sys.domain().nu();
  State lam(M);  // adjoint of the current state
  for (std::size_t i = 0; i < M; ++i) lam[i] = 2.0 * sys.lambdas()[i] / nu * sys.norms_sq()[i] * (u[i] - target[i]);

  std::vector<double> U2(M), U3(M), U4(M), k1(M), k2(M), k3(M), b1(M), b2(M), b3(M), b4(M), g(M), eta_bar(M);
  n = total;
  for (std::size_t s = segs.size(); s-- > 0;) {
    const double h = segs[s].h;
    const State& eta = etas[s];
    std::fill(eta_bar.begin(), eta_bar.end(), 0.0);
    for (std::size_t i = segs[s].steps; i-- > 0;) {
      --n;
      const double* un = hist.data() + n * M;
      // Recompute stages.
      eval_rhs(sys, un, eta, k1.data());
      for (std::size_t c = 0; c < M; ++c) U2[c] = un[c] + 0.5 * h * k1[c];
      eval_rhs(sys, U2.data(), eta, k2.data());
      for (std::size_t c = 0; c < M; ++c) U3[c] = un[c] + 0.5 * h * k2[c];
      eval_rhs(sys, U3.data(), eta, k3.data());
      for (std::size_t c = 0; c < M; ++c) U4[c] = un[c] + h * k3[c];

      for (std::size_t c = 0; c < M; ++c) {
        b1[c] = h / 6.0 * lam[c];
        b2[c] = h / 3.0 * lam[c];
        b3[c] = h / 3.0 * lam[c];
        b4[c] = h / 6.0 * lam[c];
      }
      rhs_transpose(sys, U4.data(), b4.data(), g.data());
      for (std::size_t c = 0; c < M; ++c) {
        eta_bar[c] += b4[c];
        lam[c] += g[c];
        b3[c] += h * g[c];
      }
      rhs_transpose(sys, U3.data(), b3.data(), g.data());
      for (std::size_t c = 0; c < M; ++c) {
        eta_bar[c] += b3[c];
        lam[c] += g[c];
        b2[c] += 0.5 * h * g[c];
      }
      rhs_transpose(sys, U2.data(), b2.data(), g.data());
      for (std::size_t c = 0; c < M; ++c) {
        eta_bar[c] += b2[c];
        lam[c] += g[c];
        b1[c] += 0.5 * h * g[c];
      }
      rhs_transpose(sys, un, b1.data(), g.data());
      for (std::size_t c = 0; c < M; ++c) {
        eta_bar[c] += b1[c];
        lam[c] += g[c];
      }
    }
    const auto& ctl = sys.control_modes();
    for (std::size_t k = 0; k < ctl.size(); ++k) out.grad[s][k] = eta_bar[ctl[k]];
  }
  return out;
}

// ---- steering -------------------------------------------------------------------------------

namespace {

double dot_sched(const std::vector<std::vector<double>>& a, const std::vector<std::vector<double>>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a[i].size(); ++j) s += a[i][j] * b[i][j];
  return s;
}

}  // namespace

SteerResult steer(const GalerkinSystem& sys, const State& u0, const State& target, double T, int n_segments,
                  int max_iters, const SteerOptions& opt) {
  if (max_iters < 0) throw std::invalid_argument("steer: max_iters must be >= 0");
  SteerResult res;
  ControlSchedule x = opt.initial ? *opt.initial : ControlSchedule::zeros(T, n_segments, sys.control_modes().size());
  if (std::abs(x.horizon() - T) > 1e-12 * T || x.durations.size() != static_cast<std::size_t>(n_segments)) {
    throw std::invalid_argument("steer: initial schedule does not match T and n_segments");
  }
  CostGradient cg = cost_and_gradient(sys, u0, target, x, opt.dt);
  res.initial_distance = std::sqrt(cg.J);
  res.schedule = x;
  res.final_distance = res.initial_distance;

  double best = cg.J;
  int since_best = 0;
  double step = 0.0;
  ControlSchedule prev_x;
  std::vector<std::vector<double>> prev_g;
  for (int it = 1; it <= max_iters; ++it) {
    res.iterations = it - 1;
    const double gg = dot_sched(cg.grad, cg.grad);
    if (gg == 0.0 || cg.J == 0.0) {
      res.stagnated = cg.J > 0.0;
      break;
    }
    // Barzilai-Borwein trial step, falling back to a quadratic-model guess.
    double trial = cg.J / gg;
    if (!prev_g.empty()) {
      double ss = 0.0, sy = 0.0;
      for (std::size_t i = 0; i < cg.grad.size(); ++i)
        for (std::size_t j = 0; j < cg.grad[i].size(); ++j) {
          const double dx = x.values[i][j] - prev_x.values[i][j];
          const double dg = cg.grad[i][j] - prev_g[i][j];
          ss += dx * dx;
          sy += dx * dg;
        }
      if (sy > 0.0) trial = ss / sy;
    }
    step = trial;
    bool accepted = false;
    ControlSchedule cand = x;
    for (int bt = 0; bt <= opt.max_backtracks; ++bt) {
      for (std::size_t i = 0; i < x.values.size(); ++i)
        for (std::size_t j = 0; j < x.values[i].size(); ++j) cand.values[i][j] = x.values[i][j] - step * cg.grad[i][j];
      try {
        if (cost(sys, u0, target, cand, opt.dt) <= cg.J - opt.armijo * step * gg) {
          accepted = true;
          break;
        }
      } catch (const BlowUpError&) {
      }
      step *= 0.5;
    }
    res.iterations = it;
    if (accepted) {
      prev_x = x;
      prev_g = cg.grad;
      x = cand;
      cg = cost_and_gradient(sys, u0, target, x, opt.dt);
    }
    if (opt.log) opt.log(it, cg.J, accepted ? step : 0.0);
    if (cg.J < best) {
      best = cg.J;
      since_best = 0;
      res.schedule = x;
      res.final_distance = std::sqrt(cg.J);
    } else if (++since_best >= opt.stagnation_window) {
      res.stagnated = true;
      break;
    }
    if (!accepted) {
      // Every later iteration would retry the same failed search.
      res.stagnated = true;
      break;
    }
  }
  return res;
}

}  // namespace satspec
