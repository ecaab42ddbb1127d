#ifndef GAUGEMC_NOISE_HPP
#define GAUGEMC_NOISE_HPP

// Gaussian noise paths, their per-channel DFT, and the frequency-domain
// proposal used by the Metropolis sampler.
//
// Spectrum convention: K(n) = sum_k exp(+2 pi i k n / N) w(k). For a real row
// K(N-n) = conj(K(n)), so only bins 0..N/2 are stored. Bin 0 is always real,
// and for even N so is bin N/2. Each channel then carries exactly N real
// degrees of freedom.

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "gaugemc/rng.hpp"

namespace gaugemc {

struct SimConfig;

/// R x N matrix of unit normal draws, row-major: row j is noise channel j.
class NoisePath {
 public:
  NoisePath() = default;
  NoisePath(std::size_t channels, std::size_t steps);

  std::size_t channels() const { return channels_; }
  std::size_t steps() const { return steps_; }

  double& operator()(std::size_t channel, std::size_t step) {
    return values_[channel * steps_ + step];
  }
  double operator()(std::size_t channel, std::size_t step) const {
    return values_[channel * steps_ + step];
  }

  std::span<double> row(std::size_t channel) {
    return {values_.data() + channel * steps_, steps_};
  }
  std::span<const double> row(std::size_t channel) const {
    return {values_.data() + channel * steps_, steps_};
  }

  const std::vector<double>& values() const { return values_; }

  bool operator==(const NoisePath&) const = default;

 private:
  std::size_t channels_ = 0;
  std::size_t steps_ = 0;
  std::vector<double> values_;
};

/// Independent half of each channel's spectrum (bins 0..N/2).
class SpectrumPath {
 public:
  SpectrumPath() = default;
  SpectrumPath(std::size_t channels, std::size_t steps);

  std::size_t channels() const { return channels_; }
  std::size_t steps() const { return steps_; }
  std::size_t stored_bins() const { return steps_ / 2 + 1; }

  std::span<std::complex<double>> row(std::size_t channel) {
    return {bins_.data() + channel * stored_bins(), stored_bins()};
  }
  std::span<const std::complex<double>> row(std::size_t channel) const {
    return {bins_.data() + channel * stored_bins(), stored_bins()};
  }

  /// Any bin 0..N-1; bins above N/2 are reconstructed by conjugation.
  std::complex<double> bin(std::size_t channel, std::size_t n) const;

  bool operator==(const SpectrumPath&) const = default;

 private:
  std::size_t channels_ = 0;
  std::size_t steps_ = 0;
  std::vector<std::complex<double>> bins_;
};

/// Full-length channel spectrum, as used by the symmetry check of from_spectrum.
std::vector<std::complex<double>> full_spectrum(const SpectrumPath& spec,
                                                std::size_t channel);

/// Number of bins 0..N/2 that carry independent randomness (all of them).
std::size_t independent_bins(std::size_t steps);

/// True for bins whose value is real by symmetry (DC, and Nyquist for even N).
bool is_real_bin(std::size_t n, std::size_t steps);

NoisePath sample(std::size_t channels, std::size_t steps, Rng& rng);

SpectrumPath to_spectrum(const NoisePath& path);
NoisePath from_spectrum(const SpectrumPath& spec);

/// Builds a spectrum from full-length rows (N bins each) and checks the
/// Hermitian symmetry and reality constraints to within `tolerance`.
SpectrumPath spectrum_from_full(std::span<const std::vector<std::complex<double>>> rows,
                                double tolerance = 1e-9);

/// Draws a fresh value for bin n from its prior: N(0, sqrt(N)) for real bins,
/// N(0, sqrt(N/2)) for the real and imaginary parts of interior bins.
std::complex<double> draw_bin(std::size_t n, std::size_t steps, Rng& rng);

/// Redraws ceil(fraction * B) uniformly chosen bins of every channel from the
/// prior, B = N/2 + 1. Unselected bins are left bit-identical.
void mutate_spectrum(SpectrumPath& spec, double fraction, Rng& rng);

NoisePath mutate(const NoisePath& path, double fraction, Rng& rng);

/// Bins selected per channel by mutate_spectrum for the given fraction.
std::size_t bins_per_mutation(std::size_t steps, double fraction);

/// Standard deviation of the final weight when bin `bin` of `channel` is
/// redrawn `trials` times with the rest of `base` held fixed.
double sensitivity_scan(const NoisePath& base, const SimConfig& config,
                        std::size_t channel, std::size_t bin, std::size_t trials,
                        Rng& rng);

/// Same scan with caller-supplied bin values (one per trial).
double sensitivity_scan(const NoisePath& base, const SimConfig& config,
                        std::size_t channel, std::size_t bin,
                        std::span<const std::complex<double>> values);

}  // namespace gaugemc

#endif
