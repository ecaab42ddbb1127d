#include "gaugemc/phase_space.hpp"

#include <cmath>
#include <string>

#include "gaugemc/error.hpp"

namespace gaugemc {

namespace {

constexpr cplx kI{0.0, 1.0};

cplx ipow(cplx z, int k) {
  cplx r{1.0, 0.0};
  for (; k > 0; k >>= 1) {
    if (k & 1)
      r *= z;
    z *= z;
  }
  return r;
}

}  // namespace

PhaseState PhaseState::from_modes(cplx alpha, cplx beta, cplx omega_log) {
  const cplx la = std::log(alpha);
  const cplx lb = std::log(beta);
  return {0.5 * (la + lb), (la - lb) / (2.0 * kI), omega_log};
}

void GaugeParams::validate() const {
  require(std::isfinite(diffusion), ErrorCode::InvalidParameter,
          "diffusion gauge must be finite");
  require(std::isfinite(frame_frequency), ErrorCode::InvalidParameter,
          "frame frequency must be finite");
  if (kind == GaugeKind::Real)
    require(lambda > 0.0 && std::isfinite(lambda), ErrorCode::InvalidParameter,
            "lambda must be > 0 for the real gauge, got " + std::to_string(lambda));
}

std::size_t noise_channels(GaugeKind kind) {
  return kind == GaugeKind::Real ? 4 : 2;
}

PhaseState initial_state(double nbar) {
  require(nbar > 0.0 && std::isfinite(nbar), ErrorCode::InvalidParameter,
          "nbar must be > 0, got " + std::to_string(nbar));
  return {cplx(0.5 * std::log(nbar), 0.0), {}, {}};
}

LocalTerms local_terms(cplx theta, const GaugeParams& gauge) {
  LocalTerms t;
  const double e2 = std::exp(2.0 * theta.real());
  const double s = std::sin(2.0 * theta.imag());
  const double c = std::cos(2.0 * theta.imag());
  switch (gauge.kind) {
    case GaugeKind::Real: {
      const double g4 = -e2 * s / gauge.lambda;
      t.dphi = cplx(-e2 * c + 0.5 + gauge.frame_frequency, 0.0);
      t.domega = cplx(-0.5 * g4 * g4, 0.0);
      t.omega_noise[3] = g4;
      break;
    }
    case GaugeKind::Complex: {
      // -exp(2 theta) + 1/2 + (1/2) e^A (g1 + i g2), with g1 + i g2 = 2i g2.
      // The weight drift -(g1^2 + g2^2)/2 vanishes identically.
      const double g2 = std::exp(gauge.diffusion) * e2 * s;
      const cplx g1 = kI * g2;
      t.dphi = cplx(-e2 * c + 0.5 + gauge.frame_frequency, -e2 * s) +
               kI * std::exp(gauge.diffusion) * g2;
      t.domega = 0.0;
      t.omega_noise[0] = g1;
      t.omega_noise[1] = g2;
      break;
    }
    case GaugeKind::None:
      t.dphi = cplx(-e2 * c + 0.5 + gauge.frame_frequency, -e2 * s);
      t.domega = 0.0;
      break;
  }
  return t;
}

Drift drift(const PhaseState& state, const GaugeParams& gauge) {
  const LocalTerms t = local_terms(state.theta, gauge);
  return {0.0, t.dphi, t.domega};
}

double gauge_g4(const PhaseState& state, const GaugeParams& gauge) {
  require(gauge.kind == GaugeKind::Real, ErrorCode::Unsupported,
          "g4 is defined for the real gauge only");
  require(gauge.lambda != 0.0, ErrorCode::InvalidParameter, "lambda must be nonzero");
  return -std::exp(2.0 * state.theta.real()) * std::sin(2.0 * state.theta.imag()) /
         gauge.lambda;
}

NoiseCoefficients noise_coefficients(const PhaseState& state,
                                     const GaugeParams& gauge) {
  NoiseCoefficients nc;
  const double em = 0.5 * std::exp(-gauge.diffusion);
  const double ep = 0.5 * std::exp(gauge.diffusion);
  nc.theta[0] = em;
  nc.theta[1] = -kI * em;
  nc.phi[0] = -ep;
  nc.phi[1] = -kI * ep;
  if (gauge.kind == GaugeKind::Real) {
    nc.phi[2] = gauge.lambda;
    nc.phi[3] = kI * gauge.lambda;
  }
  nc.omega = local_terms(state.theta, gauge).omega_noise;
  return nc;
}

std::array<cplx, 2> complex_gauge_drift(const PhaseState& state,
                                        const GaugeParams& gauge) {
  require(gauge.kind == GaugeKind::Complex, ErrorCode::Unsupported,
          "complex drift gauge requested for a non-complex gauge kind");
  const double g2 = std::exp(gauge.diffusion + 2.0 * state.theta.real()) *
                    std::sin(2.0 * state.theta.imag());
  return {kI * g2, cplx(g2, 0.0)};
}

cplx moment_kernel(const PhaseState& state, MomentKernelSpec spec) {
  require(spec.m >= 0 && spec.n >= 0, ErrorCode::InvalidParameter,
          "moment powers must be non-negative");
  const cplx a = state.alpha();
  const cplx b = state.beta();
  return ipow(b, spec.m) * ipow(a, spec.n) + std::conj(ipow(b, spec.n) * ipow(a, spec.m));
}

cplx number_kernel(const PhaseState& state) { return std::exp(2.0 * state.theta); }

cplx quad_x_kernel(const PhaseState& state) {
  return std::exp(state.theta) * std::cos(state.phi);
}

}  // namespace gaugemc
