#pragma once

// Galerkin truncation of  u' + A u + B(u,u) + h = eta  on the canonical eigenmodes with
// max_i k_i <= cutoff. State coordinates are coefficients of the unnormalized canonical modes.

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

#include "satspec/interaction.hpp"

namespace satspec {

using State = std::vector<double>;

class BlowUpError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Piecewise-constant control; values[s] holds one coefficient per control mode.
struct ControlSchedule {
  std::vector<double> durations;
  std::vector<std::vector<double>> values;

  double horizon() const;
  static ControlSchedule zeros(double T, int n_segments, std::size_t n_controls);
};

struct Trajectory {
  std::vector<double> times;
  std::vector<State> states;
};

class GalerkinSystem {
 public:
  /// Tensor entries with |T| below this fraction of the largest entry are dropped as round-off.
  static constexpr double kPruneRel = 1e-13;

  /// control_modes defaults to the mode support of G^1 = span(C u B(C,C)) within the truncation,
  /// C being all modes of frequency at most 3. Requires cutoff >= 3.
  static GalerkinSystem assemble(const DomainSpec& domain, int cutoff, const FieldExpansion& h_spec = {});

  std::size_t size() const { return modes_.size(); }
  int cutoff() const { return cutoff_; }
  const DomainSpec& domain() const { return domain_; }
  const std::vector<EigenMode>& modes() const { return modes_; }
  const std::vector<double>& lambdas() const { return lambdas_; }
  const std::vector<double>& norms_sq() const { return norms_sq_; }
  const std::vector<double>& h() const { return h_; }
  double lambda_max() const;
  const std::vector<std::size_t>& control_modes() const { return control_; }
  std::optional<std::size_t> index_of(const ModeIndex& idx) const;

  /// <B(Y^a,Y^b) + B(Y^b,Y^a), Y^c> / ||Y^c||^2 (symmetric in a, b).
  double tensor_entry(std::size_t c, std::size_t a, std::size_t b) const;
  std::size_t tensor_nonzeros() const { return coef_.size(); }

  /// out = B(u,u)
  void nonlinear(const double* u, double* out) const;
  /// out += (dB(u,u)/du)^T p
  void nonlinear_transpose(const double* u, const double* p, double* out) const;

  GalerkinSystem with_controls(std::vector<std::size_t> control) const;
  GalerkinSystem with_h(State h) const;

  State state_from(const FieldExpansion& e) const;
  FieldExpansion expansion_of(const State& u) const;

 private:
  GalerkinSystem(const DomainSpec& domain) : domain_(domain) {}

  DomainSpec domain_;
  int cutoff_ = 0;
  std::vector<EigenMode> modes_;
  std::vector<double> lambdas_;
  std::vector<double> norms_sq_;
  State h_;
  std::vector<std::size_t> control_;
  // Pairs a <= b with their output list in CSR form; coefficients already carry the 1/2 of a = b.
  std::vector<std::uint32_t> pair_a_, pair_b_, pair_start_;
  std::vector<std::uint32_t> out_c_;
  std::vector<double> coef_;
};

/// -lambda u - B(u,u) - h + eta
State rhs(const GalerkinSystem& sys, const State& u, const State& eta);

/// Full-length control vector; zero outside control_modes.
State expand_control(const GalerkinSystem& sys, const std::vector<double>& slot_values);

double energy(const GalerkinSystem& sys, const State& u);
double v_norm(const GalerkinSystem& sys, const State& u);
double v_distance(const GalerkinSystem& sys, const State& u, const State& v);

/// Largest admissible fixed step for this system (0.1 / lambda_max).
double max_step(const GalerkinSystem& sys);

/// Classical RK4; every segment is split into ceil(duration/dt) equal steps so its end is hit
/// exactly. Samples every `sample_every` steps plus each segment end.
Trajectory integrate(const GalerkinSystem& sys, const State& u0, const ControlSchedule& schedule, double dt,
                     std::size_t sample_every = 1);
State final_state(const GalerkinSystem& sys, const State& u0, const ControlSchedule& schedule, double dt);

struct CostGradient {
  double J = 0.0;
  std::vector<std::vector<double>> grad;  // same shape as schedule.values
};

/// J = ||u(T) - target||_V^2 with its gradient by the discrete adjoint of the RK4 scheme.
CostGradient cost_and_gradient(const GalerkinSystem& sys, const State& u0, const State& target,
                               const ControlSchedule& schedule, double dt);
double cost(const GalerkinSystem& sys, const State& u0, const State& target, const ControlSchedule& schedule,
            double dt);

struct SteerOptions {
  double dt = 1e-3;
  double armijo = 1e-4;
  int max_backtracks = 40;
  int stagnation_window = 20;
  /// Starting schedule; zeros when empty.
  std::optional<ControlSchedule> initial;
  /// Called after each iteration with (iteration, J, step size).
  std::function<void(int, double, double)> log;
};

struct SteerResult {
  ControlSchedule schedule;
  double initial_distance = 0.0;
  double final_distance = 0.0;
  int iterations = 0;
  bool stagnated = false;
};

/// Gradient descent with backtracking; returns the best schedule seen.
SteerResult steer(const GalerkinSystem& sys, const State& u0, const State& target, double T, int n_segments,
                  int max_iters, const SteerOptions& options = {});

}  // namespace satspec
