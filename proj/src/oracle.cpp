#include "gaugemc/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "gaugemc/error.hpp"
#include "gaugemc/estimators.hpp"

namespace gaugemc {

double exact_X_rotating(double nbar, double tau) {
  require(nbar > 0.0, ErrorCode::InvalidParameter, "nbar must be > 0");
  return std::sqrt(nbar) * std::exp(nbar * (std::cos(tau) - 1.0)) *
         std::cos(nbar * (std::sin(tau) - tau));
}

double collapse_envelope(double nbar, double tau) {
  require(nbar > 0.0, ErrorCode::InvalidParameter, "nbar must be > 0");
  return std::sqrt(nbar) * std::exp(-nbar * tau * tau);
}

std::size_t default_cutoff(double nbar) {
  // The Poisson tail is heavier than 10 sigma suggests for small nbar.
  return std::max<std::size_t>(30, static_cast<std::size_t>(std::ceil(nbar + 10.0 * std::sqrt(nbar))));
}

double FockStateVector::norm() const {
  CompensatedSum s;
  for (const auto& c : amplitudes)
    s.add(std::norm(c));
  return s.value();
}

FockStateVector coherent_state(double nbar, std::size_t cutoff) {
  require(nbar > 0.0, ErrorCode::InvalidParameter, "nbar must be > 0");
  FockStateVector psi;
  psi.amplitudes.resize(cutoff + 1);
  const double log_nbar = std::log(nbar);
  for (std::size_t n = 0; n <= cutoff; ++n) {
    const double dn = static_cast<double>(n);
    psi.amplitudes[n] = std::exp(-0.5 * nbar + 0.5 * dn * log_nbar - 0.5 * std::lgamma(dn + 1.0));
  }
  const double norm = psi.norm();
  if (1.0 - norm > 1e-10) {
    std::ostringstream os;
    os << "Fock cutoff " << cutoff << " loses " << 1.0 - norm << " of the norm at nbar=" << nbar;
    fail(ErrorCode::InvalidParameter, os.str());
  }
  // removes lgamma roundoff, which reaches 1e-11 for nbar ~ 1e4
  const double scale = 1.0 / std::sqrt(norm);
  for (auto& c : psi.amplitudes)
    c *= scale;
  return psi;
}

FockStateVector evolve_fock(const FockStateVector& psi, double tau) {
  FockStateVector out = psi;
  for (std::size_t n = 0; n < out.amplitudes.size(); ++n) {
    const double dn = static_cast<double>(n);
    out.amplitudes[n] *= std::polar(1.0, -0.5 * dn * (dn - 1.0) * tau);
  }
  return out;
}

FockMoments fock_moments(double nbar, double tau, std::size_t cutoff) {
  const FockStateVector psi = evolve_fock(coherent_state(nbar, cutoff), tau);
  const auto& c = psi.amplitudes;
  CompensatedSum are, aim, nsum;
  for (std::size_t n = 0; n < c.size(); ++n) {
    nsum.add(static_cast<double>(n) * std::norm(c[n]));
    if (n + 1 < c.size()) {
      const auto term = std::conj(c[n]) * c[n + 1] * std::sqrt(static_cast<double>(n + 1));
      are.add(term.real());
      aim.add(term.imag());
    }
  }
  FockMoments m;
  m.a_mean = {are.value(), aim.value()};
  m.n_mean = nsum.value();
  m.x_rotating = (std::polar(1.0, nbar * tau) * m.a_mean).real();
  return m;
}

FockMoments fock_moments(double nbar, double tau) {
  return fock_moments(nbar, tau, default_cutoff(nbar));
}

}  // namespace gaugemc
