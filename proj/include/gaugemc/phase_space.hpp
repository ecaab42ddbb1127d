#ifndef GAUGEMC_PHASE_SPACE_HPP
#define GAUGEMC_PHASE_SPACE_HPP

// Gauge-P phase-space model of the Kerr anharmonic oscillator in log
// variables. Everything here is a pure function of its arguments.

#include <array>
#include <complex>
#include <cstddef>

namespace gaugemc {

using cplx = std::complex<double>;

/// One trajectory's point in log variables:
///   theta = log(alpha*beta)/2, phi = log(alpha/beta)/(2i), omega_log = log(Omega).
struct PhaseState {
  cplx theta{};
  cplx phi{};
  cplx omega_log{};

  cplx alpha() const { return std::exp(theta + cplx(0.0, 1.0) * phi); }
  cplx beta() const { return std::exp(theta - cplx(0.0, 1.0) * phi); }
  cplx weight() const { return std::exp(omega_log); }

  /// Inverse of alpha()/beta() on the principal branch of the logarithm.
  static PhaseState from_modes(cplx alpha, cplx beta, cplx omega_log = {});
};

enum class GaugeKind { Real = 0, Complex = 1, None = 2 };

struct GaugeParams {
  GaugeKind kind = GaugeKind::Real;
  double diffusion = 2.0;        // constant diffusion gauge A
  double lambda = 0.5;           // amplitude of the extra (xi3, xi4) noise
  double frame_frequency = 0.0;  // rotating-frame angular frequency, usually nbar

  void validate() const;
};

/// Powers (m, n) of the normally ordered moment <(a^dagger)^m a^n>.
struct MomentKernelSpec {
  int m = 0;
  int n = 0;
};

inline constexpr MomentKernelSpec kNumberKernel{1, 1};
inline constexpr MomentKernelSpec kAmplitudeKernel{0, 1};

/// Noise channels consumed per time step: xi1..xi4 for the real gauge,
/// xi1, xi2 otherwise.
std::size_t noise_channels(GaugeKind kind);

/// Coherent state |sqrt(nbar)> as a delta function at alpha = beta = sqrt(nbar).
PhaseState initial_state(double nbar);

struct Drift {
  cplx dtheta;
  cplx dphi;
  cplx domega;
};

/// Deterministic part of the Stratonovich SDEs. Valid for every gauge kind;
/// theta never drifts because the drift gauges cancel in its equation.
Drift drift(const PhaseState& state, const GaugeParams& gauge);

/// Real drift gauge on xi4: -exp(2 theta_x) sin(2 theta_y) / lambda.
double gauge_g4(const PhaseState& state, const GaugeParams& gauge);

/// Coefficient of each unit-variance noise (per sqrt(dt)) in the theta, phi
/// and omega equations. Unused channels are zero.
struct NoiseCoefficients {
  std::array<cplx, 4> theta{};
  std::array<cplx, 4> phi{};
  std::array<cplx, 4> omega{};
};

NoiseCoefficients noise_coefficients(const PhaseState& state,
                                     const GaugeParams& gauge);

/// Complex drift gauge pair (g1, g2) with g1 = i g2.
std::array<cplx, 2> complex_gauge_drift(const PhaseState& state,
                                        const GaugeParams& gauge);

/// beta^m alpha^n + (beta^n alpha^m)^*
cplx moment_kernel(const PhaseState& state, MomentKernelSpec spec);

/// alpha*beta = exp(2 theta)
cplx number_kernel(const PhaseState& state);

/// (alpha + beta)/2 = exp(theta) cos(phi)
cplx quad_x_kernel(const PhaseState& state);

// The state-dependent part of drift() and noise_coefficients() depends on
// theta alone. The integrator caches it between Heun stages.
struct LocalTerms {
  cplx dphi;
  cplx domega;
  std::array<cplx, 4> omega_noise{};
};

LocalTerms local_terms(cplx theta, const GaugeParams& gauge);

}  // namespace gaugemc

#endif
