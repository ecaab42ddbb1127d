#include "gaugemc/experiments.hpp"

#include <cmath>

#include "gaugemc/error.hpp"
#include "gaugemc/noise.hpp"
#include "gaugemc/oracle.hpp"
#include "gaugemc/parallel.hpp"

namespace gaugemc {

Table weight_spread(const SimConfig& sim, std::size_t count, std::uint64_t seed) {
  require(count >= 1, ErrorCode::InvalidParameter, "need at least one trajectory");
  SimConfig every_step = sim;
  every_step.save_stride = 1;
  const bool complex_weight = sim.gauge.kind == GaugeKind::Complex;

  Table t;
  t.columns.push_back("tau");
  for (std::size_t i = 0; i < count; ++i) {
    if (complex_weight) {
      t.columns.push_back("abs_omega_" + std::to_string(i));
      t.columns.push_back("arg_omega_" + std::to_string(i));
    } else {
      t.columns.push_back("omega_" + std::to_string(i));
    }
  }
  const std::vector<double> times = saved_times(every_step);
  t.rows.assign(times.size(), {});
  for (std::size_t r = 0; r < times.size(); ++r)
    t.rows[r].push_back(times[r]);

  for (std::size_t i = 0; i < count; ++i) {
    Rng rng(derive_seed(seed, i));
    const Trajectory traj =
        evolve(sample(every_step.channels(), every_step.steps(), rng), every_step);
    for (std::size_t r = 0; r < traj.states.size(); ++r) {
      const cplx w = traj.states[r].weight();
      if (complex_weight) {
        t.rows[r].push_back(std::abs(w));
        t.rows[r].push_back(std::arg(w));
      } else {
        t.rows[r].push_back(w.real());
      }
    }
  }
  return t;
}

Table noise_scan(const SimConfig& sim, std::size_t trials,
                 const std::vector<std::size_t>& channels, std::uint64_t seed,
                 std::size_t workers) {
  sim.validate();
  require(trials >= 2, ErrorCode::InvalidParameter, "noise scan needs >= 2 trials per bin");
  for (std::size_t c : channels)
    require(c < sim.channels(), ErrorCode::InvalidParameter, "noise channel out of range");

  Rng base_rng(derive_seed(seed, 0));
  const NoisePath base = sample(sim.channels(), sim.steps(), base_rng);
  const std::size_t bins = independent_bins(sim.steps());

  Table t;
  t.columns = {"channel", "bin", "sigma_omega"};
  t.rows.assign(channels.size() * bins, {});
  parallel_for(t.rows.size(), workers, [&](std::size_t i) {
    const std::size_t channel = channels[i / bins];
    const std::size_t bin = i % bins;
    Rng rng(derive_seed(seed, 1 + channel * bins + bin));
    const double sigma = sensitivity_scan(base, sim, channel, bin, trials, rng);
    t.rows[i] = {static_cast<double>(channel), static_cast<double>(bin), sigma};
  });
  return t;
}

Table oracle_table(const SimConfig& sim, std::size_t cutoff) {
  sim.validate();
  if (cutoff == 0)
    cutoff = default_cutoff(sim.nbar);
  Table t;
  t.columns = {"tau", "exact_x", "envelope_x", "fock_x", "mean_n"};
  for (double tau : saved_times(sim)) {
    const FockMoments m = fock_moments(sim.nbar, tau, cutoff);
    t.rows.push_back({tau, exact_X_rotating(sim.nbar, tau), collapse_envelope(sim.nbar, tau),
                      m.x_rotating, m.n_mean});
  }
  return t;
}

}  // namespace gaugemc
