#include "gaugemc/samplers.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "gaugemc/error.hpp"
#include "gaugemc/parallel.hpp"

namespace gaugemc {

namespace {

// Trajectories per stochastic work unit. Fixed so that the reduction order
// is the same for every worker count.
constexpr std::size_t kChunk = 512;

void require_real_gauge(const SimConfig& sim, const char* what) {
  if (sim.gauge.kind != GaugeKind::Real) {
    std::ostringstream os;
    os << what << " requires the real gauge: a complex weight cannot be a sampling density";
    fail(ErrorCode::Unsupported, os.str());
  }
}

std::size_t checked_ratio(double num, double den, const char* what) {
  const double r = num / den;
  const double rounded = std::round(r);
  if (!(rounded >= 1.0) || std::abs(r - rounded) > 1e-9 * rounded) {
    std::ostringstream os;
    os << what << " must be a positive integer, got " << r;
    fail(ErrorCode::InvalidParameter, os.str());
  }
  return static_cast<std::size_t>(rounded);
}

}  // namespace

void StochasticRunConfig::validate() const {
  sim.validate();
  require(n_groups >= 2, ErrorCode::InvalidParameter, "n_groups must be >= 2");
  require(n_trajectories >= n_groups && n_trajectories % n_groups == 0,
          ErrorCode::InvalidParameter, "n_trajectories must be a multiple of n_groups");
}

void MetropolisRunConfig::validate() const {
  sim.validate();
  require(n_chains >= 2, ErrorCode::InvalidParameter, "n_chains must be >= 2");
  require(samples_per_chain >= 1, ErrorCode::InvalidParameter,
          "samples_per_chain must be >= 1");
  (void)bins_per_mutation(sim.steps(), mutate_fraction);
}

std::size_t BranchingRunConfig::steps_per_branch() const {
  const std::size_t per = checked_ratio(branch_interval, sim.dt, "branch_interval / dt");
  (void)checked_ratio(sim.total_time, branch_interval, "total_time / branch_interval");
  return per;
}

void BranchingRunConfig::validate() const {
  sim.validate();
  require(n_populations >= 2, ErrorCode::InvalidParameter, "n_populations must be >= 2");
  require(n_pop >= 1, ErrorCode::InvalidParameter, "n_pop must be >= 1");
  (void)steps_per_branch();
}

// ---------------------------------------------------------------------------
// Plain stochastic sampling

MomentSeries run_stochastic(const StochasticRunConfig& cfg,
                            std::span<const MomentKernelSpec> kernels) {
  cfg.validate();
  const SimConfig& sim = cfg.sim;
  const std::vector<double> times = saved_times(sim);
  const std::size_t per_group = cfg.n_trajectories / cfg.n_groups;
  const std::size_t chunks_per_group = (per_group + kChunk - 1) / kChunk;
  const std::size_t n_units = chunks_per_group * cfg.n_groups;

  std::vector<MomentAccumulator> units(n_units, MomentAccumulator(times.size(), kernels));
  parallel_for(n_units, cfg.workers, [&](std::size_t unit) {
    const std::size_t group = unit / chunks_per_group;
    const std::size_t chunk = unit % chunks_per_group;
    const std::size_t begin = group * per_group + chunk * kChunk;
    const std::size_t end = std::min(begin + kChunk, (group + 1) * per_group);
    MomentAccumulator& acc = units[unit];
    for (std::size_t i = begin; i < end; ++i) {
      Rng rng(derive_seed(cfg.seed, i));
      const Trajectory traj = evolve(sample(sim.channels(), sim.steps(), rng), sim);
      for (std::size_t t = 0; t < traj.states.size(); ++t)
        acc.add(t, traj.states[t], std::exp(traj.states[t].omega_log.real()));
    }
  });

  std::vector<MomentAccumulator> groups;
  groups.reserve(cfg.n_groups);
  for (std::size_t g = 0; g < cfg.n_groups; ++g) {
    groups.push_back(units[g * chunks_per_group]);
    for (std::size_t c = 1; c < chunks_per_group; ++c)
      groups.back().merge(units[g * chunks_per_group + c]);
  }
  return reduce_groups(groups, kernels, times);
}

// ---------------------------------------------------------------------------
// Metropolis-Hastings over noise paths

double acceptance_probability(double weight_new, double weight_old) {
  if (!(weight_old > 0.0))
    return 1.0;
  return std::min(1.0, weight_new / weight_old);
}

double MetropolisResult::acceptance_rate() const {
  std::size_t a = 0, p = 0;
  for (const auto& c : chains) {
    a += c.accepted;
    p += c.proposed;
  }
  return p == 0 ? 0.0 : static_cast<double>(a) / static_cast<double>(p);
}

MetropolisResult run_chains(const ChainSettings& s, const PathEvaluator& evaluate,
                            std::span<const MomentKernelSpec> kernels) {
  require(s.n_chains >= 2, ErrorCode::InvalidParameter, "need at least two chains");
  require(s.samples_per_chain >= 1, ErrorCode::InvalidParameter,
          "samples_per_chain must be >= 1");
  (void)bins_per_mutation(s.steps, s.mutate_fraction);

  MetropolisResult result;
  result.kernels.assign(kernels.begin(), kernels.end());
  result.chains.resize(s.n_chains);

  parallel_for(s.n_chains, s.workers, [&](std::size_t c) {
    Rng rng(derive_seed(s.seed, c));
    SpectrumPath current = to_spectrum(sample(s.channels, s.steps, rng));
    PathEvaluation here = evaluate(from_spectrum(current));
    const std::size_t nk = here.kernels.size();
    std::vector<std::vector<double>> samples(nk);
    for (auto& v : samples)
      v.reserve(s.samples_per_chain);

    ChainRecord rec;
    const std::size_t total = s.burn_in + s.samples_per_chain;
    for (std::size_t it = 0; it < total; ++it) {
      SpectrumPath proposal = current;
      mutate_spectrum(proposal, s.mutate_fraction, rng);
      PathEvaluation there = evaluate(from_spectrum(proposal));
      const double u = rng.uniform();
      ++rec.proposed;
      if (u < acceptance_probability(there.weight, here.weight)) {
        current = std::move(proposal);
        here = std::move(there);
        ++rec.accepted;
        if (it < s.burn_in)
          ++rec.burn_in_accepted;
      }
      if (it >= s.burn_in)
        for (std::size_t k = 0; k < nk; ++k)
          samples[k].push_back(here.kernels[k]);
    }
    for (const auto& v : samples)
      rec.means.push_back(metropolis_estimate(v));
    result.chains[c] = std::move(rec);
  });

  const std::size_t nk = result.chains.front().means.size();
  std::vector<double> means(s.n_chains);
  for (std::size_t k = 0; k < nk; ++k) {
    for (std::size_t c = 0; c < s.n_chains; ++c)
      means[c] = result.chains[c].means[k];
    result.estimates.push_back(combine(means));
  }
  for (std::size_t c = 0; c < s.n_chains; ++c) {
    if (s.burn_in > 0 && result.chains[c].burn_in_accepted == 0) {
      std::ostringstream os;
      os << "chain " << c << " accepted no proposals during " << s.burn_in
         << " burn-in steps";
      result.warnings.push_back(os.str());
    }
  }
  return result;
}

MetropolisResult run_metropolis(const MetropolisRunConfig& cfg,
                                std::span<const MomentKernelSpec> kernels) {
  require_real_gauge(cfg.sim, "Metropolis sampling");
  cfg.validate();
  const SimConfig sim = cfg.sim;
  const std::vector<MomentKernelSpec> ks(kernels.begin(), kernels.end());
  PathEvaluator evaluate = [sim, ks](const NoisePath& path) {
    const FinalState fin = evolve_final(path, sim);
    PathEvaluation ev;
    ev.weight = fin.weight;
    ev.kernels.reserve(ks.size());
    for (const auto& k : ks)
      ev.kernels.push_back(moment_kernel(fin.state, k).real());
    return ev;
  };
  ChainSettings s;
  s.channels = sim.channels();
  s.steps = sim.steps();
  s.n_chains = cfg.n_chains;
  s.samples_per_chain = cfg.samples_per_chain;
  s.burn_in = cfg.burn_in;
  s.mutate_fraction = cfg.mutate_fraction;
  s.seed = cfg.seed;
  s.workers = cfg.workers;
  MetropolisResult r = run_chains(s, evaluate, kernels);
  r.target_time = sim.total_time;
  return r;
}

// ---------------------------------------------------------------------------
// Branching

std::size_t clone_count(double ratio, double u) {
  return static_cast<std::size_t>(std::floor(ratio + u));
}

std::vector<std::size_t> clone_counts(std::span<const double> weights, Rng& rng) {
  require(!weights.empty(), ErrorCode::InvalidArgument, "empty population");
  CompensatedSum total;
  for (double w : weights)
    total.add(w);
  const double mean = total.value() / static_cast<double>(weights.size());
  require(mean > 0.0, ErrorCode::InvalidArgument, "population has no weight");
  std::vector<std::size_t> counts(weights.size());
  for (std::size_t i = 0; i < weights.size(); ++i)
    counts[i] = clone_count(weights[i] / mean, rng.uniform());
  return counts;
}

BranchingResult run_branching(const BranchingRunConfig& cfg,
                              std::span<const MomentKernelSpec> kernels) {
  require_real_gauge(cfg.sim, "branching");
  cfg.validate();
  const SimConfig& sim = cfg.sim;
  const std::size_t n_steps = sim.steps();
  const std::size_t per_branch = cfg.steps_per_branch();
  const std::vector<double> times = saved_times(sim);
  const std::vector<std::size_t> save_at = saved_steps(sim);
  const std::size_t channels = sim.channels();

  BranchingResult result;
  result.initial_sizes.assign(cfg.n_populations, cfg.n_pop);
  result.sizes.resize(cfg.n_populations);
  std::vector<MomentAccumulator> groups(cfg.n_populations,
                                        MomentAccumulator(times.size(), kernels));

  parallel_for(cfg.n_populations, cfg.workers, [&](std::size_t p) {
    Rng rng(derive_seed(cfg.seed, p));
    MomentAccumulator& acc = groups[p];
    std::vector<Stepper> members(cfg.n_pop, Stepper(initial_state(sim.nbar), sim));
    std::vector<double> weights;
    std::vector<Stepper> next;
    // Total weight relative to the initial population, carried across resets.
    double norm = 1.0;
    const double n0 = static_cast<double>(cfg.n_pop);
    std::size_t save_index = 0;
    double xi[4];

    auto record = [&](std::size_t k) {
      if (save_index >= save_at.size() || save_at[save_index] != k)
        return;
      for (const Stepper& m : members)
        acc.add(save_index, m.state(), std::exp(m.state().omega_log.real()));
      acc.set_omega_scale(save_index, norm * static_cast<double>(members.size()) / n0);
      ++save_index;
    };

    record(0);
    for (std::size_t k = 1; k <= n_steps; ++k) {
      for (Stepper& m : members) {
        for (std::size_t j = 0; j < channels; ++j)
          xi[j] = rng.normal();
        m.advance(xi, 1);
      }
      record(k);
      if (k % per_branch != 0)
        continue;

      weights.resize(members.size());
      for (std::size_t i = 0; i < members.size(); ++i)
        weights[i] = std::exp(members[i].state().omega_log.real());
      CompensatedSum total;
      for (double w : weights)
        total.add(w);
      const std::vector<std::size_t> counts = clone_counts(weights, rng);
      next.clear();
      for (std::size_t i = 0; i < members.size(); ++i) {
        members[i].reset_weight();
        for (std::size_t c = 0; c < counts[i]; ++c)
          next.push_back(members[i]);
      }
      if (next.empty()) {
        std::ostringstream os;
        os << "population " << p << " became extinct at step " << k;
        fail(ErrorCode::Extinction, os.str());
      }
      norm *= total.value() / static_cast<double>(next.size());
      members.swap(next);
      result.sizes[p].push_back(members.size());
    }
  });

  result.series = reduce_groups(groups, kernels, times);
  return result;
}

}  // namespace gaugemc
