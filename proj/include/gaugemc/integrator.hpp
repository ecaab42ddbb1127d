#ifndef GAUGEMC_INTEGRATOR_HPP
#define GAUGEMC_INTEGRATOR_HPP

// Fixed-step Heun (Stratonovich) integration of the log-variable SDEs. A
// trajectory is a deterministic function of its NoisePath: no RNG lives here.

#include <cstddef>
#include <span>
#include <vector>

#include "gaugemc/noise.hpp"
#include "gaugemc/phase_space.hpp"

namespace gaugemc {

/// |Re theta| or |Re omega| beyond this overflows exp() in double precision.
inline constexpr double kDivergenceThreshold = 700.0;

struct SimConfig {
  double nbar = 100.0;
  double total_time = 0.1;
  double dt = 1e-4;
  GaugeParams gauge{GaugeKind::Real, 2.0, 0.5, 100.0};
  std::size_t save_stride = 10;

  /// total_time / dt, which must be a positive integer.
  std::size_t steps() const;
  std::size_t channels() const { return noise_channels(gauge.kind); }
  void validate() const;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<PhaseState> states;
  double final_weight = 0.0;  // exp(Re omega(T))
};

struct FinalState {
  PhaseState state;
  double weight = 0.0;
};

/// One Heun step. `increments` holds one unit normal per noise channel; they
/// are scaled by sqrt(dt) here.
PhaseState step(const PhaseState& state, std::span<const double> increments, double dt,
                const GaugeParams& gauge);

Trajectory evolve(const NoisePath& path, const SimConfig& config);

/// Same computation as evolve() without retaining intermediate states.
FinalState evolve_final(const NoisePath& path, const SimConfig& config);

double final_weight(const NoisePath& path, const SimConfig& config);

/// Saved-time grid of evolve(): every save_stride steps plus the final step.
std::vector<std::size_t> saved_steps(const SimConfig& config);
std::vector<double> saved_times(const SimConfig& config);

/// Throws ErrorCode::Divergence if the state is past the overflow guard.
void check_divergence(const PhaseState& state, std::size_t step_index);

// Incremental integrator with cached theta-dependent terms; used by evolve()
// and by samplers that advance trajectories piecewise (branching).
class Stepper {
 public:
  Stepper(const PhaseState& state, const SimConfig& config);

  /// Advances one step with `xi[channel * stride]` as the unit normals.
  void advance(const double* xi, std::size_t stride);

  /// Sets Omega = 1. Nothing else depends on omega.
  void reset_weight() { state_.omega_log = 0.0; }

  const PhaseState& state() const { return state_; }
  std::size_t steps_taken() const { return taken_; }

 private:
  PhaseState state_;
  LocalTerms terms_;
  GaugeParams gauge_;
  double dt_;
  double sqrt_dt_;
  std::size_t channels_;
  std::size_t taken_ = 0;
};

}  // namespace gaugemc

#endif
