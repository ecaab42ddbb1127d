#include "gaugemc/estimators.hpp"

#include <algorithm>
#include <cmath>

#include "gaugemc/error.hpp"

namespace gaugemc {

namespace {

cplx power(cplx z, int k) {
  cplx r{1.0, 0.0};
  for (; k > 0; k >>= 1) {
    if (k & 1)
      r *= z;
    z *= z;
  }
  return r;
}

cplx hermitian_numerator(const PhaseState& s, MomentKernelSpec spec) {
  const cplx a = s.alpha();
  const cplx b = s.beta();
  return power(b, spec.m) * power(a, spec.n) + power(b, spec.n) * power(a, spec.m);
}

double residue_ratio(double re, double im) {
  if (re == 0.0)
    return im == 0.0 ? 0.0 : INFINITY;
  return std::abs(im) / std::abs(re);
}

}  // namespace

void CompensatedSum::add(double x) {
  const double t = sum_ + x;
  if (std::abs(sum_) >= std::abs(x))
    carry_ += (sum_ - t) + x;
  else
    carry_ += (x - t) + sum_;
  sum_ = t;
}

MomentValue weighted_moment(std::span<const WeightedSample> samples, MomentKernelSpec spec) {
  require(!samples.empty(), ErrorCode::InvalidArgument, "weighted_moment needs samples");
  CompensatedSum w, re, im;
  for (const auto& s : samples) {
    const cplx h = hermitian_numerator(s.state, spec);
    w.add(s.weight);
    re.add(s.weight * h.real());
    im.add(s.weight * h.imag());
  }
  require(w.value() > 0.0, ErrorCode::InvalidArgument, "total weight must be positive");
  return {re.value() / (2.0 * w.value()), residue_ratio(re.value(), im.value())};
}

MomentEstimate combine(std::span<const double> group_means) {
  require(group_means.size() >= 2, ErrorCode::InvalidArgument,
          "combine needs at least two groups");
  const double g = static_cast<double>(group_means.size());
  CompensatedSum total;
  for (double m : group_means)
    total.add(m);
  const double mean = total.value() / g;
  CompensatedSum ss;
  for (double m : group_means)
    ss.add((m - mean) * (m - mean));
  return {mean, std::sqrt(ss.value() / g / (g - 1.0)), group_means.size()};
}

double metropolis_estimate(std::span<const double> sample_kernels) {
  require(!sample_kernels.empty(), ErrorCode::InvalidArgument,
          "metropolis_estimate needs samples");
  CompensatedSum total;
  for (double k : sample_kernels)
    total.add(k);
  return total.value() / static_cast<double>(sample_kernels.size()) / 2.0;
}

std::size_t MomentSeries::kernel_index(MomentKernelSpec spec) const {
  for (std::size_t k = 0; k < kernels.size(); ++k)
    if (kernels[k].m == spec.m && kernels[k].n == spec.n)
      return k;
  fail(ErrorCode::InvalidArgument, "kernel not present in series");
}

MomentAccumulator::MomentAccumulator(std::size_t n_times,
                                     std::span<const MomentKernelSpec> kernels)
    : n_times_(n_times),
      kernels_(kernels.begin(), kernels.end()),
      weight_(n_times),
      count_(n_times, 0.0),
      omega_scale_(n_times, 1.0),
      sums_(n_times * kernels.size()) {}

void MomentAccumulator::add(std::size_t t, const PhaseState& state, double weight) {
  weight_[t].add(weight);
  count_[t] += 1.0;
  KernelSums* row = &sums_[t * kernels_.size()];
  for (std::size_t k = 0; k < kernels_.size(); ++k) {
    const cplx h = hermitian_numerator(state, kernels_[k]);
    row[k].re.add(weight * h.real());
    row[k].im.add(weight * h.imag());
  }
}

void MomentAccumulator::merge(const MomentAccumulator& other) {
  require(other.n_times_ == n_times_ && other.kernels_.size() == kernels_.size(),
          ErrorCode::Shape, "accumulator shapes differ");
  for (std::size_t t = 0; t < n_times_; ++t) {
    weight_[t].add(other.weight_[t]);
    count_[t] += other.count_[t];
  }
  for (std::size_t i = 0; i < sums_.size(); ++i) {
    sums_[i].re.add(other.sums_[i].re);
    sums_[i].im.add(other.sums_[i].im);
  }
}

cplx MomentAccumulator::hermitian_sum(std::size_t t, std::size_t k) const {
  const KernelSums& s = sums_[t * kernels_.size() + k];
  return {s.re.value(), s.im.value()};
}

double MomentAccumulator::omega_mean(std::size_t t) const {
  return count_[t] > 0.0 ? omega_scale_[t] * weight_[t].value() / count_[t] : 0.0;
}

MomentValue MomentAccumulator::moment(std::size_t t, std::size_t k) const {
  const KernelSums& s = sums_[t * kernels_.size() + k];
  const double w = weight_[t].value();
  require(w > 0.0, ErrorCode::InvalidArgument, "group has no weight at this time");
  return {s.re.value() / (2.0 * w), residue_ratio(s.re.value(), s.im.value())};
}

MomentSeries reduce_groups(std::span<const MomentAccumulator> groups,
                           std::span<const MomentKernelSpec> kernels,
                           std::vector<double> times) {
  require(groups.size() >= 2, ErrorCode::InvalidArgument, "need at least two groups");
  MomentSeries out;
  out.times = std::move(times);
  out.kernels.assign(kernels.begin(), kernels.end());
  const std::size_t nt = out.times.size();
  out.moments.assign(kernels.size(), std::vector<MomentEstimate>(nt));
  out.omega_mean.resize(nt);
  out.max_imag_residue.assign(kernels.size(), 0.0);

  std::vector<double> means(groups.size());
  for (std::size_t t = 0; t < nt; ++t) {
    for (std::size_t k = 0; k < kernels.size(); ++k) {
      CompensatedSum re, im;
      for (std::size_t g = 0; g < groups.size(); ++g) {
        means[g] = groups[g].moment(t, k).value;
        const cplx h = groups[g].hermitian_sum(t, k);
        re.add(h.real());
        im.add(h.imag());
      }
      out.moments[k][t] = combine(means);
      out.max_imag_residue[k] =
          std::max(out.max_imag_residue[k], residue_ratio(re.value(), im.value()));
    }
    for (std::size_t g = 0; g < groups.size(); ++g)
      means[g] = groups[g].omega_mean(t);
    out.omega_mean[t] = combine(means);
  }
  return out;
}

}  // namespace gaugemc
