#include "gaugemc/noise.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numeric>
#include <sstream>

#include "gaugemc/error.hpp"
#include "gaugemc/integrator.hpp"

namespace gaugemc {

namespace {

using cd = std::complex<double>;

// FFTW plans are created once per length and shared. Planning is not
// thread-safe, execution with the new-array interface is. FFTW_UNALIGNED
// keeps results independent of where std::vector happens to put its buffer.
class PlanCache {
 public:
  struct Plans {
    fftw_plan forward;
    fftw_plan backward;
  };

  static PlanCache& instance() {
    static PlanCache cache;
    return cache;
  }

  Plans get(std::size_t n) {
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = plans_.find(n);
    if (it != plans_.end())
      return it->second;
    const int len = static_cast<int>(n);
    double* real = fftw_alloc_real(n);
    fftw_complex* spec = fftw_alloc_complex(n / 2 + 1);
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    Plans p{fftw_plan_dft_r2c_1d(len, real, spec, flags),
            fftw_plan_dft_c2r_1d(len, spec, real, flags)};
    fftw_free(real);
    fftw_free(spec);
    plans_.emplace(n, p);
    return p;
  }

  ~PlanCache() {
    for (auto& [n, p] : plans_) {
      fftw_destroy_plan(p.forward);
      fftw_destroy_plan(p.backward);
    }
  }

 private:
  std::mutex mutex_;
  std::map<std::size_t, Plans> plans_;
};

// FFTW's forward transform uses exp(-2 pi i k n / N); ours uses the + sign,
// which for real input is the complex conjugate.
void forward_row(std::span<const double> in, std::span<cd> out) {
  const std::size_t n = in.size();
  auto plans = PlanCache::instance().get(n);
  std::vector<double> scratch(in.begin(), in.end());
  fftw_execute_dft_r2c(plans.forward, scratch.data(),
                       reinterpret_cast<fftw_complex*>(out.data()));
  for (std::size_t b = 0; b < out.size(); ++b)
    out[b] = is_real_bin(b, n) ? cd(out[b].real(), 0.0) : std::conj(out[b]);
}

void inverse_row(std::span<const cd> in, std::span<double> out) {
  const std::size_t n = out.size();
  auto plans = PlanCache::instance().get(n);
  std::vector<cd> scratch(in.size());
  for (std::size_t b = 0; b < in.size(); ++b)
    scratch[b] = std::conj(in[b]);
  fftw_execute_dft_c2r(plans.backward, reinterpret_cast<fftw_complex*>(scratch.data()),
                       out.data());
  const double inv = 1.0 / static_cast<double>(n);
  for (double& v : out)
    v *= inv;
}

double spectrum_scale(std::span<const cd> row) {
  double m = 1.0;
  for (const cd& z : row)
    m = std::max(m, std::abs(z));
  return m;
}

}  // namespace

NoisePath::NoisePath(std::size_t channels, std::size_t steps)
    : channels_(channels), steps_(steps), values_(channels * steps, 0.0) {
  require(channels >= 1 && steps >= 1, ErrorCode::Shape,
          "noise path needs at least one channel and one step");
}

SpectrumPath::SpectrumPath(std::size_t channels, std::size_t steps)
    : channels_(channels), steps_(steps), bins_(channels * (steps / 2 + 1)) {
  require(channels >= 1 && steps >= 1, ErrorCode::Shape,
          "spectrum needs at least one channel and one step");
}

cd SpectrumPath::bin(std::size_t channel, std::size_t n) const {
  require(n < steps_, ErrorCode::InvalidArgument, "bin index out of range");
  const auto r = row(channel);
  return n < r.size() ? r[n] : std::conj(r[steps_ - n]);
}

std::vector<cd> full_spectrum(const SpectrumPath& spec, std::size_t channel) {
  std::vector<cd> out(spec.steps());
  for (std::size_t n = 0; n < spec.steps(); ++n)
    out[n] = spec.bin(channel, n);
  return out;
}

std::size_t independent_bins(std::size_t steps) { return steps / 2 + 1; }

bool is_real_bin(std::size_t n, std::size_t steps) {
  return n == 0 || (steps % 2 == 0 && n == steps / 2);
}

NoisePath sample(std::size_t channels, std::size_t steps, Rng& rng) {
  NoisePath p(channels, steps);
  for (std::size_t j = 0; j < channels; ++j)
    for (double& v : p.row(j))
      v = rng.normal();
  return p;
}

SpectrumPath to_spectrum(const NoisePath& path) {
  SpectrumPath spec(path.channels(), path.steps());
  for (std::size_t j = 0; j < path.channels(); ++j)
    forward_row(path.row(j), spec.row(j));
  return spec;
}

NoisePath from_spectrum(const SpectrumPath& spec) {
  NoisePath path(spec.channels(), spec.steps());
  for (std::size_t j = 0; j < spec.channels(); ++j) {
    const auto r = spec.row(j);
    const double tol = 1e-9 * spectrum_scale(r);
    for (std::size_t b = 0; b < r.size(); ++b) {
      if (is_real_bin(b, spec.steps()) && std::abs(r[b].imag()) > tol) {
        std::ostringstream os;
        os << "spectrum bin " << b << " of channel " << j
           << " must be real, imaginary part " << r[b].imag();
        fail(ErrorCode::InvalidSpectrum, os.str());
      }
    }
    inverse_row(r, path.row(j));
  }
  return path;
}

SpectrumPath spectrum_from_full(std::span<const std::vector<cd>> rows, double tolerance) {
  require(!rows.empty(), ErrorCode::Shape, "no spectrum rows");
  const std::size_t n = rows.front().size();
  SpectrumPath spec(rows.size(), n);
  for (std::size_t j = 0; j < rows.size(); ++j) {
    const auto& full = rows[j];
    require(full.size() == n, ErrorCode::Shape, "spectrum rows differ in length");
    const double tol = tolerance * spectrum_scale(full);
    for (std::size_t b = 1; b < n; ++b) {
      if (std::abs(full[n - b] - std::conj(full[b])) > tol) {
        std::ostringstream os;
        os << "spectrum channel " << j << " violates K(N-n) = K(n)* at n=" << b;
        fail(ErrorCode::InvalidSpectrum, os.str());
      }
    }
    auto out = spec.row(j);
    std::copy_n(full.begin(), out.size(), out.begin());
  }
  // Reality of DC/Nyquist is checked by from_spectrum.
  (void)from_spectrum(spec);
  return spec;
}

cd draw_bin(std::size_t n, std::size_t steps, Rng& rng) {
  const double nn = static_cast<double>(steps);
  if (is_real_bin(n, steps))
    return {std::sqrt(nn) * rng.normal(), 0.0};
  const double s = std::sqrt(0.5 * nn);
  const double re = s * rng.normal();
  const double im = s * rng.normal();
  return {re, im};
}

std::size_t bins_per_mutation(std::size_t steps, double fraction) {
  require(fraction > 0.0 && fraction <= 1.0, ErrorCode::InvalidParameter,
          "mutation fraction must lie in (0, 1]");
  const std::size_t b = independent_bins(steps);
  const double want = std::ceil(fraction * static_cast<double>(b) - 1e-9);
  return std::clamp<std::size_t>(static_cast<std::size_t>(want), 1, b);
}

void mutate_spectrum(SpectrumPath& spec, double fraction, Rng& rng) {
  const std::size_t n = spec.steps();
  const std::size_t b = independent_bins(n);
  const std::size_t k = bins_per_mutation(n, fraction);
  std::vector<std::size_t> idx(b);
  for (std::size_t j = 0; j < spec.channels(); ++j) {
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    auto row = spec.row(j);
    // Partial Fisher-Yates: the first k entries are a uniform k-subset.
    for (std::size_t i = 0; i < k; ++i) {
      const std::size_t pick = i + static_cast<std::size_t>(rng.below(b - i));
      std::swap(idx[i], idx[pick]);
      row[idx[i]] = draw_bin(idx[i], n, rng);
    }
  }
}

NoisePath mutate(const NoisePath& path, double fraction, Rng& rng) {
  SpectrumPath spec = to_spectrum(path);
  mutate_spectrum(spec, fraction, rng);
  return from_spectrum(spec);
}

double sensitivity_scan(const NoisePath& base, const SimConfig& config,
                        std::size_t channel, std::size_t bin,
                        std::span<const cd> values) {
  require(channel < base.channels(), ErrorCode::InvalidArgument, "channel out of range");
  require(bin < independent_bins(base.steps()), ErrorCode::InvalidArgument,
          "bin must index an independent spectrum bin");
  require(values.size() >= 2, ErrorCode::InvalidParameter, "need at least two trials");

  const SpectrumPath spec = to_spectrum(base);
  std::vector<cd> row(spec.row(channel).begin(), spec.row(channel).end());
  NoisePath work = base;
  std::vector<double> weights;
  weights.reserve(values.size());
  for (const cd& v : values) {
    row[bin] = is_real_bin(bin, base.steps()) ? cd(v.real(), 0.0) : v;
    inverse_row(row, work.row(channel));
    weights.push_back(final_weight(work, config));
  }
  // shifted by the first weight so that identical weights give exactly 0
  const double n = static_cast<double>(weights.size());
  double sum = 0.0, sq = 0.0;
  for (double w : weights) {
    const double d = w - weights.front();
    sum += d;
    sq += d * d;
  }
  return std::sqrt(std::max(0.0, sq - sum * sum / n) / (n - 1.0));
}

double sensitivity_scan(const NoisePath& base, const SimConfig& config,
                        std::size_t channel, std::size_t bin, std::size_t trials,
                        Rng& rng) {
  require(trials >= 2, ErrorCode::InvalidParameter, "need at least two trials");
  require(bin < independent_bins(base.steps()), ErrorCode::InvalidArgument,
          "bin must index an independent spectrum bin");
  std::vector<cd> values(trials);
  for (cd& v : values)
    v = draw_bin(bin, base.steps(), rng);
  return sensitivity_scan(base, config, channel, bin, values);
}

}  // namespace gaugemc
