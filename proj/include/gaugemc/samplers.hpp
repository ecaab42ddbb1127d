#ifndef GAUGEMC_SAMPLERS_HPP
#define GAUGEMC_SAMPLERS_HPP

// The three ways of sampling weighted gauge-P trajectories: plain stochastic
// averaging, Metropolis-Hastings over noise paths, and population branching.
// Every run is a deterministic function of its config; work units (groups,
// chains, populations) draw from independent seeded streams, so results do
// not depend on the worker count.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "gaugemc/estimators.hpp"
#include "gaugemc/integrator.hpp"
#include "gaugemc/noise.hpp"
#include "gaugemc/rng.hpp"

namespace gaugemc {

struct StochasticRunConfig {
  SimConfig sim;
  std::size_t n_trajectories = 1000000;
  std::size_t n_groups = 100;
  std::uint64_t seed = 1;
  std::size_t workers = 0;

  void validate() const;
};

struct MetropolisRunConfig {
  SimConfig sim;  // sim.total_time is the target time
  std::size_t n_chains = 100;
  std::size_t samples_per_chain = 10000;
  std::size_t burn_in = 10000;
  double mutate_fraction = 0.1;
  std::uint64_t seed = 1;
  std::size_t workers = 0;

  void validate() const;
};

struct BranchingRunConfig {
  SimConfig sim;
  std::size_t n_pop = 10000;
  std::size_t n_populations = 100;
  double branch_interval = 1e-3;
  std::uint64_t seed = 1;
  std::size_t workers = 0;

  /// branch_interval / dt; throws unless it and total_time / branch_interval
  /// are positive integers.
  std::size_t steps_per_branch() const;
  void validate() const;
};

MomentSeries run_stochastic(const StochasticRunConfig& cfg,
                            std::span<const MomentKernelSpec> kernels);

struct ChainRecord {
  std::size_t accepted = 0;
  std::size_t proposed = 0;
  std::size_t burn_in_accepted = 0;
  std::vector<double> means;  // per kernel, already halved
};

struct MetropolisResult {
  double target_time = 0.0;
  std::vector<MomentKernelSpec> kernels;
  std::vector<MomentEstimate> estimates;  // per kernel
  std::vector<ChainRecord> chains;
  std::vector<std::string> warnings;

  double acceptance_rate() const;
};

/// min(1, new/old): the full Hastings ratio once proposals regenerate bins
/// from their prior.
double acceptance_probability(double weight_new, double weight_old);

/// What the chain needs from one noise path: its weight at the target time
/// and the kernel values O_mn whose halved means are the estimates.
struct PathEvaluation {
  double weight = 0.0;
  std::vector<double> kernels;
};

using PathEvaluator = std::function<PathEvaluation(const NoisePath&)>;

struct ChainSettings {
  std::size_t channels = 4;
  std::size_t steps = 1000;
  std::size_t n_chains = 100;
  std::size_t samples_per_chain = 10000;
  std::size_t burn_in = 10000;
  double mutate_fraction = 0.1;
  std::uint64_t seed = 1;
  std::size_t workers = 0;
};

/// Metropolis-Hastings over noise paths with an arbitrary positive weight.
/// `kernels` only labels the result.
MetropolisResult run_chains(const ChainSettings& settings, const PathEvaluator& evaluate,
                            std::span<const MomentKernelSpec> kernels);

MetropolisResult run_metropolis(const MetropolisRunConfig& cfg,
                                std::span<const MomentKernelSpec> kernels);

/// floor(ratio + u)
std::size_t clone_count(double ratio, double u);

/// Clone counts for one branching event: mean weight as the reference, one
/// uniform draw per member in order.
std::vector<std::size_t> clone_counts(std::span<const double> weights, Rng& rng);

struct BranchingResult {
  MomentSeries series;
  std::vector<std::size_t> initial_sizes;
  std::vector<std::vector<std::size_t>> sizes;  // [population][event], after branching
};

BranchingResult run_branching(const BranchingRunConfig& cfg,
                              std::span<const MomentKernelSpec> kernels);

}  // namespace gaugemc

#endif
