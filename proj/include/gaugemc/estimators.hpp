#ifndef GAUGEMC_ESTIMATORS_HPP
#define GAUGEMC_ESTIMATORS_HPP

#include <cstddef>
#include <span>
#include <vector>

#include "gaugemc/phase_space.hpp"

namespace gaugemc {

/// Neumaier-compensated running sum; order-stable to well below 1e-12
/// relative for the ensemble sizes used here.
class CompensatedSum {
 public:
  void add(double x);
  void add(const CompensatedSum& other) {
    add(other.sum_);
    add(other.carry_);
  }
  double value() const { return sum_ + carry_; }

 private:
  double sum_ = 0.0;
  double carry_ = 0.0;
};

struct WeightedSample {
  PhaseState state;
  double weight = 1.0;
};

struct MomentValue {
  double value = 0.0;  // Re <(a^dagger)^m a^n>
  // |Im| / |Re| of sum Omega (beta^m alpha^n + beta^n alpha^m), which
  // estimates a Hermitian operator and so should have no imaginary part.
  double imag_residue = 0.0;
};

/// sum_i Omega_i O_mn(state_i) / sum_i 2 Omega_i (real part).
MomentValue weighted_moment(std::span<const WeightedSample> samples, MomentKernelSpec spec);

struct MomentEstimate {
  double mean = 0.0;
  double error = 0.0;  // standard error of the mean
  std::size_t n_groups = 0;
};

/// Mean of group means with error sqrt(sum (m_i - mean)^2 / G / (G - 1)).
MomentEstimate combine(std::span<const double> group_means);

/// Mean of Metropolis kernel samples divided by two; the weight is already
/// in the sampling density.
double metropolis_estimate(std::span<const double> sample_kernels);

struct MomentSeries {
  std::vector<double> times;
  std::vector<MomentKernelSpec> kernels;
  std::vector<std::vector<MomentEstimate>> moments;  // [kernel][time]
  std::vector<MomentEstimate> omega_mean;            // [time]
  // [kernel] largest |Im|/|Re| of the Hermitian numerator pooled over all
  // groups, taken over times.
  std::vector<double> max_imag_residue;

  /// Index of `spec` in kernels; throws if absent.
  std::size_t kernel_index(MomentKernelSpec spec) const;
};

// Per-group weighted sums at each saved time. Groups accumulate
// independently and are reduced into a MomentSeries at the end.
class MomentAccumulator {
 public:
  MomentAccumulator(std::size_t n_times, std::span<const MomentKernelSpec> kernels);

  void add(std::size_t time_index, const PhaseState& state, double weight);
  void merge(const MomentAccumulator& other);

  /// The group's <Omega> at time t is scale * weight_sum / count. Branching
  /// uses this to carry the normalisation lost when weights are reset.
  void set_omega_scale(std::size_t t, double scale) { omega_scale_[t] = scale; }
  double omega_mean(std::size_t t) const;

  std::size_t n_times() const { return n_times_; }
  double weight_sum(std::size_t t) const { return weight_[t].value(); }
  double count(std::size_t t) const { return count_[t]; }

  /// Moment estimate for kernel k at time t within this group.
  MomentValue moment(std::size_t t, std::size_t k) const;

  /// Raw sum Omega (beta^m alpha^n + beta^n alpha^m) for kernel k at time t.
  cplx hermitian_sum(std::size_t t, std::size_t k) const;

 private:
  // sum Omega (beta^m alpha^n + beta^n alpha^m); its real part equals
  // sum Omega Re O_mn.
  struct KernelSums {
    CompensatedSum re;
    CompensatedSum im;
  };

  std::size_t n_times_;
  std::vector<MomentKernelSpec> kernels_;
  std::vector<CompensatedSum> weight_;
  std::vector<double> count_;
  std::vector<double> omega_scale_;
  std::vector<KernelSums> sums_;  // [t * kernels + k]
};

/// Reduces group accumulators into mean +- multi-group error per time.
MomentSeries reduce_groups(std::span<const MomentAccumulator> groups,
                           std::span<const MomentKernelSpec> kernels,
                           std::vector<double> times);

}  // namespace gaugemc

#endif
