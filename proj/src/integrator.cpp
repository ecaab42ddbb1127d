#include "gaugemc/integrator.hpp"

#include <cmath>
#include <sstream>

#include "gaugemc/error.hpp"

namespace gaugemc {

namespace {

// Heun predictor-corrector. theta has zero drift and constant noise
// coefficients, so its corrector equals its predictor and the terms evaluated
// at the predicted state are exactly those of the next step's start.
PhaseState heun(const PhaseState& s, const LocalTerms& cur, LocalTerms& next,
                const double* xi, std::size_t stride, std::size_t channels, double dt,
                double sqrt_dt, const GaugeParams& gauge) {
  double dw[4] = {0.0, 0.0, 0.0, 0.0};
  for (std::size_t j = 0; j < channels; ++j)
    dw[j] = sqrt_dt * xi[j * stride];

  const double em = 0.5 * std::exp(-gauge.diffusion);
  const double ep = 0.5 * std::exp(gauge.diffusion);
  const cplx theta_noise = em * cplx(dw[0], -dw[1]);
  cplx phi_noise = -ep * cplx(dw[0], dw[1]);
  if (gauge.kind == GaugeKind::Real)
    phi_noise += gauge.lambda * cplx(dw[2], dw[3]);

  PhaseState out;
  out.theta = s.theta + theta_noise;
  next = local_terms(out.theta, gauge);

  cplx omega_noise_cur{};
  cplx omega_noise_next{};
  for (std::size_t j = 0; j < channels; ++j) {
    omega_noise_cur += cur.omega_noise[j] * dw[j];
    omega_noise_next += next.omega_noise[j] * dw[j];
  }
  out.phi = s.phi + 0.5 * (cur.dphi + next.dphi) * dt + phi_noise;
  out.omega_log = s.omega_log + 0.5 * (cur.domega + next.domega) * dt +
                  0.5 * (omega_noise_cur + omega_noise_next);
  return out;
}

}  // namespace

std::size_t SimConfig::steps() const {
  require(dt > 0.0 && total_time > 0.0, ErrorCode::InvalidParameter,
          "dt and total_time must be > 0");
  require(dt <= total_time * (1.0 + 1e-12), ErrorCode::InvalidParameter,
          "dt must not exceed total_time");
  const double ratio = total_time / dt;
  const double rounded = std::round(ratio);
  require(std::abs(ratio - rounded) <= 1e-9 * rounded, ErrorCode::InvalidParameter,
          "total_time / dt must be an integer");
  return static_cast<std::size_t>(rounded);
}

void SimConfig::validate() const {
  require(nbar > 0.0 && std::isfinite(nbar), ErrorCode::InvalidParameter,
          "nbar must be > 0");
  require(save_stride >= 1, ErrorCode::InvalidParameter, "save_stride must be >= 1");
  gauge.validate();
  (void)steps();
}

void check_divergence(const PhaseState& state, std::size_t step_index) {
  const double rt = state.theta.real();
  const double rw = state.omega_log.real();
  const bool ok = std::isfinite(rt) && std::isfinite(state.theta.imag()) &&
                  std::isfinite(state.phi.real()) && std::isfinite(state.phi.imag()) &&
                  std::isfinite(rw) && std::abs(rt) <= kDivergenceThreshold &&
                  std::abs(rw) <= kDivergenceThreshold;
  if (!ok) {
    std::ostringstream os;
    os << "trajectory diverged at step " << step_index << ": theta=" << state.theta
       << " phi=" << state.phi << " omega=" << state.omega_log;
    fail(ErrorCode::Divergence, os.str());
  }
}

PhaseState step(const PhaseState& state, std::span<const double> increments, double dt,
                const GaugeParams& gauge) {
  gauge.validate();
  const std::size_t channels = noise_channels(gauge.kind);
  require(increments.size() >= channels, ErrorCode::Shape,
          "step needs one increment per noise channel");
  LocalTerms next;
  const PhaseState out = heun(state, local_terms(state.theta, gauge), next,
                              increments.data(), 1, channels, dt, std::sqrt(dt), gauge);
  check_divergence(out, 1);
  return out;
}

Stepper::Stepper(const PhaseState& state, const SimConfig& config)
    : state_(state),
      terms_(local_terms(state.theta, config.gauge)),
      gauge_(config.gauge),
      dt_(config.dt),
      sqrt_dt_(std::sqrt(config.dt)),
      channels_(config.channels()) {}

void Stepper::advance(const double* xi, std::size_t stride) {
  LocalTerms next;
  state_ = heun(state_, terms_, next, xi, stride, channels_, dt_, sqrt_dt_, gauge_);
  terms_ = next;
  ++taken_;
  check_divergence(state_, taken_);
}

std::vector<std::size_t> saved_steps(const SimConfig& config) {
  const std::size_t n = config.steps();
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < n; k += config.save_stride)
    out.push_back(k);
  out.push_back(n);
  return out;
}

std::vector<double> saved_times(const SimConfig& config) {
  const std::size_t n = config.steps();
  std::vector<double> out;
  for (std::size_t k : saved_steps(config))
    out.push_back(k == n ? config.total_time
                         : config.total_time * static_cast<double>(k) /
                               static_cast<double>(n));
  return out;
}

namespace {

void check_shape(const NoisePath& path, const SimConfig& config) {
  config.validate();
  if (path.channels() != config.channels() || path.steps() != config.steps()) {
    std::ostringstream os;
    os << "noise path is " << path.channels() << "x" << path.steps() << ", expected "
       << config.channels() << "x" << config.steps();
    fail(ErrorCode::Shape, os.str());
  }
}

template <class Record>
PhaseState run(const NoisePath& path, const SimConfig& config, Record&& record) {
  check_shape(path, config);
  const std::size_t n = path.steps();
  Stepper stepper(initial_state(config.nbar), config);
  record(0, stepper.state());
  const double* base = path.values().data();
  for (std::size_t k = 0; k < n; ++k) {
    stepper.advance(base + k, n);
    record(k + 1, stepper.state());
  }
  return stepper.state();
}

}  // namespace

Trajectory evolve(const NoisePath& path, const SimConfig& config) {
  Trajectory traj;
  const std::size_t n = config.steps();
  const std::size_t stride = config.save_stride;
  const PhaseState last = run(path, config, [&](std::size_t k, const PhaseState& s) {
    if (k % stride == 0 || k == n)
      traj.states.push_back(s);
  });
  traj.times = saved_times(config);
  traj.final_weight = std::exp(last.omega_log.real());
  return traj;
}

FinalState evolve_final(const NoisePath& path, const SimConfig& config) {
  const PhaseState last = run(path, config, [](std::size_t, const PhaseState&) {});
  return {last, std::exp(last.omega_log.real())};
}

double final_weight(const NoisePath& path, const SimConfig& config) {
  return evolve_final(path, config).weight;
}

}  // namespace gaugemc
