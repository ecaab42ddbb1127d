#ifndef GAUGEMC_ORACLE_HPP
#define GAUGEMC_ORACLE_HPP

// Exact Kerr-oscillator reference values for an initial coherent state with
// real amplitude sqrt(nbar), in the interaction picture. "Rotating" values
// are additionally rotated at angular frequency nbar.

#include <complex>
#include <cstddef>
#include <vector>

namespace gaugemc {

/// sqrt(nbar) exp(nbar (cos tau - 1)) cos(nbar (sin tau - tau))
double exact_X_rotating(double nbar, double tau);

/// Large-nbar Gaussian envelope sqrt(nbar) exp(-nbar tau^2). Approximate.
double collapse_envelope(double nbar, double tau);

/// Default cutoff: nbar + 10 sqrt(nbar) rounded up, and at least 30.
std::size_t default_cutoff(double nbar);

struct FockStateVector {
  std::vector<std::complex<double>> amplitudes;  // n = 0..cutoff

  std::size_t cutoff() const { return amplitudes.size() - 1; }
  double norm() const;
};

/// Truncated coherent state, renormalised; throws if more than 1e-10 of the
/// norm is lost to the cutoff.
FockStateVector coherent_state(double nbar, std::size_t cutoff);

/// Applies exp(-i n (n-1) tau / 2) to every number-state amplitude.
FockStateVector evolve_fock(const FockStateVector& psi, double tau);

struct FockMoments {
  std::complex<double> a_mean;
  double n_mean = 0.0;
  double x_rotating = 0.0;  // Re(exp(i nbar tau) <a>)
};

FockMoments fock_moments(double nbar, double tau, std::size_t cutoff);
FockMoments fock_moments(double nbar, double tau);

}  // namespace gaugemc

#endif
