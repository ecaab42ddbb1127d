#include "gaugemc/gaugemc.h"

#include <exception>
#include <limits>
#include <new>
#include <stdexcept>
#include <string>
#include <vector>

#include "gaugemc/error.hpp"
#include "gaugemc/experiments.hpp"
#include "gaugemc/oracle.hpp"
#include "gaugemc/samplers.hpp"

#ifndef GAUGEMC_VERSION_STRING
#define GAUGEMC_VERSION_STRING "unknown"
#endif

using namespace gaugemc;

struct gmc_series {
  MomentSeries series;
  std::vector<std::vector<std::size_t>> sizes;
};

struct gmc_metropolis_result {
  MetropolisResult result;
};

struct gmc_table {
  Table table;
};

namespace {

thread_local std::string last_error;

constexpr MomentKernelSpec kKernels[] = {kAmplitudeKernel, kNumberKernel};

gmc_status to_status(ErrorCode code) { return static_cast<gmc_status>(code); }

template <class F>
gmc_status guarded(F&& f) {
  last_error.clear();
  try {
    f();
    return GMC_OK;
  } catch (const Error& e) {
    last_error = e.what();
    return to_status(e.code());
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return GMC_ERR_INTERNAL;
  } catch (const std::exception& e) {
    last_error = e.what();
    return GMC_ERR_INTERNAL;
  } catch (...) {
    last_error = "unknown error";
    return GMC_ERR_INTERNAL;
  }
}

void need(const void* p, const char* name) {
  if (p == nullptr)
    throw std::invalid_argument(std::string("null argument: ") + name);
}

SimConfig to_sim(const gmc_sim_config* c) {
  need(c, "sim");
  SimConfig s;
  s.nbar = c->nbar;
  s.total_time = c->total_time;
  s.dt = c->dt;
  require(c->gauge_kind >= GMC_GAUGE_REAL && c->gauge_kind <= GMC_GAUGE_NONE,
          ErrorCode::InvalidParameter, "unknown gauge kind");
  s.gauge.kind = static_cast<GaugeKind>(c->gauge_kind);
  s.gauge.diffusion = c->diffusion;
  s.gauge.lambda = c->lambda;
  s.gauge.frame_frequency = c->frame_frequency;
  s.save_stride = c->save_stride;
  s.validate();
  return s;
}

}  // namespace

// Null pointers are reported as GMC_ERR_NULL_ARGUMENT rather than INTERNAL.
#define GMC_NEED(p)                                          \
  do {                                                       \
    if ((p) == nullptr) {                                    \
      last_error = "null argument: " #p;                     \
      return GMC_ERR_NULL_ARGUMENT;                          \
    }                                                        \
  } while (0)

extern "C" {

void gmc_sim_config_default(gmc_sim_config* cfg) {
  if (cfg == nullptr)
    return;
  const SimConfig s;
  cfg->nbar = s.nbar;
  cfg->total_time = s.total_time;
  cfg->dt = s.dt;
  cfg->gauge_kind = static_cast<int>(s.gauge.kind);
  cfg->diffusion = s.gauge.diffusion;
  cfg->lambda = s.gauge.lambda;
  cfg->frame_frequency = s.gauge.frame_frequency;
  cfg->save_stride = s.save_stride;
}

const char* gmc_version(void) { return GAUGEMC_VERSION_STRING; }

const char* gmc_last_error(void) { return last_error.c_str(); }

const char* gmc_status_string(gmc_status status) {
  switch (status) {
    case GMC_OK: return "ok";
    case GMC_ERR_INVALID_PARAMETER: return "invalid parameter";
    case GMC_ERR_INVALID_ARGUMENT: return "invalid argument";
    case GMC_ERR_SHAPE: return "shape mismatch";
    case GMC_ERR_INVALID_SPECTRUM: return "invalid spectrum";
    case GMC_ERR_UNSUPPORTED: return "unsupported configuration";
    case GMC_ERR_DIVERGENCE: return "trajectory diverged";
    case GMC_ERR_EXTINCTION: return "population extinct";
    case GMC_ERR_NULL_ARGUMENT: return "null argument";
    case GMC_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

// ---- series ------------------------------------------------------------------

gmc_status gmc_run_stochastic(const gmc_sim_config* sim, uint64_t n_trajectories,
                              uint64_t n_groups, uint64_t seed, uint32_t workers,
                              gmc_series** out) {
  GMC_NEED(sim);
  GMC_NEED(out);
  *out = nullptr;
  return guarded([&] {
    StochasticRunConfig cfg;
    cfg.sim = to_sim(sim);
    cfg.n_trajectories = n_trajectories;
    cfg.n_groups = n_groups;
    cfg.seed = seed;
    cfg.workers = workers;
    auto* s = new gmc_series{run_stochastic(cfg, kKernels), {}};
    *out = s;
  });
}

gmc_status gmc_run_branching(const gmc_sim_config* sim, uint64_t n_pop,
                             uint64_t n_populations, double branch_interval, uint64_t seed,
                             uint32_t workers, gmc_series** out) {
  GMC_NEED(sim);
  GMC_NEED(out);
  *out = nullptr;
  return guarded([&] {
    BranchingRunConfig cfg;
    cfg.sim = to_sim(sim);
    cfg.n_pop = n_pop;
    cfg.n_populations = n_populations;
    cfg.branch_interval = branch_interval;
    cfg.seed = seed;
    cfg.workers = workers;
    BranchingResult r = run_branching(cfg, kKernels);
    *out = new gmc_series{std::move(r.series), std::move(r.sizes)};
  });
}

size_t gmc_series_length(const gmc_series* series) {
  return series == nullptr ? 0 : series->series.times.size();
}

gmc_status gmc_series_get_row(const gmc_series* series, size_t index, gmc_series_row* row) {
  GMC_NEED(series);
  GMC_NEED(row);
  return guarded([&] {
    const MomentSeries& s = series->series;
    require(index < s.times.size(), ErrorCode::InvalidArgument, "row index out of range");
    const auto& x = s.moments[s.kernel_index(kAmplitudeKernel)][index];
    const auto& n = s.moments[s.kernel_index(kNumberKernel)][index];
    const auto& w = s.omega_mean[index];
    *row = {s.times[index], x.mean, x.error, n.mean, n.error, w.mean, w.error};
  });
}

gmc_status gmc_series_imag_residue(const gmc_series* series, double* x_residue,
                                   double* n_residue) {
  GMC_NEED(series);
  return guarded([&] {
    const MomentSeries& s = series->series;
    if (x_residue)
      *x_residue = s.max_imag_residue[s.kernel_index(kAmplitudeKernel)];
    if (n_residue)
      *n_residue = s.max_imag_residue[s.kernel_index(kNumberKernel)];
  });
}

size_t gmc_series_population_count(const gmc_series* series) {
  return series == nullptr ? 0 : series->sizes.size();
}

size_t gmc_series_event_count(const gmc_series* series) {
  return series == nullptr || series->sizes.empty() ? 0 : series->sizes.front().size();
}

gmc_status gmc_series_population_size(const gmc_series* series, size_t population,
                                      size_t event, uint64_t* size) {
  GMC_NEED(series);
  GMC_NEED(size);
  return guarded([&] {
    require(population < series->sizes.size() && event < series->sizes[population].size(),
            ErrorCode::InvalidArgument, "population/event index out of range");
    *size = series->sizes[population][event];
  });
}

void gmc_series_destroy(gmc_series* series) { delete series; }

// ---- metropolis --------------------------------------------------------------

void gmc_metropolis_config_default(gmc_metropolis_config* cfg) {
  if (cfg == nullptr)
    return;
  const MetropolisRunConfig d;
  cfg->n_chains = d.n_chains;
  cfg->samples_per_chain = d.samples_per_chain;
  cfg->burn_in = d.burn_in;
  cfg->mutate_fraction = d.mutate_fraction;
  cfg->seed = d.seed;
  cfg->workers = static_cast<uint32_t>(d.workers);
}

gmc_status gmc_run_metropolis(const gmc_sim_config* sim, const gmc_metropolis_config* cfg,
                              gmc_metropolis_result** out) {
  GMC_NEED(sim);
  GMC_NEED(cfg);
  GMC_NEED(out);
  *out = nullptr;
  return guarded([&] {
    MetropolisRunConfig c;
    c.sim = to_sim(sim);
    c.n_chains = cfg->n_chains;
    c.samples_per_chain = cfg->samples_per_chain;
    c.burn_in = cfg->burn_in;
    c.mutate_fraction = cfg->mutate_fraction;
    c.seed = cfg->seed;
    c.workers = cfg->workers;
    *out = new gmc_metropolis_result{run_metropolis(c, kKernels)};
  });
}

gmc_status gmc_metropolis_get_row(const gmc_metropolis_result* result,
                                  gmc_metropolis_row* row) {
  GMC_NEED(result);
  GMC_NEED(row);
  const MetropolisResult& r = result->result;
  *row = {r.target_time,      r.estimates[0].mean, r.estimates[0].error,
          r.estimates[1].mean, r.estimates[1].error, r.acceptance_rate()};
  return GMC_OK;
}

size_t gmc_metropolis_warning_count(const gmc_metropolis_result* result) {
  return result == nullptr ? 0 : result->result.warnings.size();
}

const char* gmc_metropolis_warning(const gmc_metropolis_result* result, size_t index) {
  if (result == nullptr || index >= result->result.warnings.size())
    return nullptr;
  return result->result.warnings[index].c_str();
}

void gmc_metropolis_destroy(gmc_metropolis_result* result) { delete result; }

// ---- tables ------------------------------------------------------------------

size_t gmc_table_rows(const gmc_table* table) {
  return table == nullptr ? 0 : table->table.rows.size();
}

size_t gmc_table_cols(const gmc_table* table) {
  return table == nullptr ? 0 : table->table.columns.size();
}

const char* gmc_table_column_name(const gmc_table* table, size_t col) {
  if (table == nullptr || col >= table->table.columns.size())
    return nullptr;
  return table->table.columns[col].c_str();
}

double gmc_table_value(const gmc_table* table, size_t row, size_t col) {
  if (table == nullptr || row >= table->table.rows.size() ||
      col >= table->table.rows[row].size())
    return std::numeric_limits<double>::quiet_NaN();
  return table->table.rows[row][col];
}

void gmc_table_destroy(gmc_table* table) { delete table; }

gmc_status gmc_weight_spread(const gmc_sim_config* sim, size_t count, uint64_t seed,
                             gmc_table** out) {
  GMC_NEED(sim);
  GMC_NEED(out);
  *out = nullptr;
  return guarded([&] { *out = new gmc_table{weight_spread(to_sim(sim), count, seed)}; });
}

gmc_status gmc_noise_scan(const gmc_sim_config* sim, uint64_t trials, int all_channels,
                          uint64_t seed, uint32_t workers, gmc_table** out) {
  GMC_NEED(sim);
  GMC_NEED(out);
  *out = nullptr;
  return guarded([&] {
    const SimConfig s = to_sim(sim);
    std::vector<std::size_t> channels;
    if (all_channels) {
      for (std::size_t c = 0; c < s.channels(); ++c)
        channels.push_back(c);
    } else {
      require(s.gauge.kind == GaugeKind::Real, ErrorCode::Unsupported,
              "the default xi4 scan needs the real gauge; pass all_channels");
      channels.push_back(3);
    }
    *out = new gmc_table{noise_scan(s, trials, channels, seed, workers)};
  });
}

gmc_status gmc_oracle_table(const gmc_sim_config* sim, uint64_t cutoff, gmc_table** out) {
  GMC_NEED(sim);
  GMC_NEED(out);
  *out = nullptr;
  return guarded([&] { *out = new gmc_table{oracle_table(to_sim(sim), cutoff)}; });
}

gmc_status gmc_exact_x_rotating(double nbar, double tau, double* x) {
  GMC_NEED(x);
  return guarded([&] { *x = exact_X_rotating(nbar, tau); });
}

gmc_status gmc_fock_moments(double nbar, double tau, uint64_t cutoff, double* x_rotating,
                            double* n_mean) {
  return guarded([&] {
    const FockMoments m = cutoff == 0 ? fock_moments(nbar, tau) : fock_moments(nbar, tau, cutoff);
    if (x_rotating)
      *x_rotating = m.x_rotating;
    if (n_mean)
      *n_mean = m.n_mean;
  });
}

}  // extern "C"
