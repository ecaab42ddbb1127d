/*
 * gaugemc C API.
 *
 * Weighted gauge-P simulation of the Kerr anharmonic oscillator with three
 * samplers (plain stochastic, Metropolis-Hastings over noise paths,
 * branching), plus exact reference values.
 *
 * Every function returns a gmc_status. On failure the message for the
 * calling thread is available from gmc_last_error() until the next call.
 * Result objects are opaque and owned by the caller; release them with the
 * matching *_destroy function (NULL is accepted).
 */
#ifndef GAUGEMC_H
#define GAUGEMC_H

#include <stddef.h>
#include <stdint.h>

#if defined(GAUGEMC_BUILDING)
#  define GMC_API __attribute__((visibility("default")))
#else
#  define GMC_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum gmc_status {
  GMC_OK = 0,
  GMC_ERR_INVALID_PARAMETER = 1,
  GMC_ERR_INVALID_ARGUMENT = 2,
  GMC_ERR_SHAPE = 3,
  GMC_ERR_INVALID_SPECTRUM = 4,
  GMC_ERR_UNSUPPORTED = 5,
  GMC_ERR_DIVERGENCE = 6,
  GMC_ERR_EXTINCTION = 7,
  GMC_ERR_NULL_ARGUMENT = 8,
  GMC_ERR_INTERNAL = 9
} gmc_status;

typedef enum gmc_gauge_kind {
  GMC_GAUGE_REAL = 0,
  GMC_GAUGE_COMPLEX = 1,
  GMC_GAUGE_NONE = 2
} gmc_gauge_kind;

typedef struct gmc_sim_config {
  double nbar;            /* mean boson number of the initial coherent state */
  double total_time;      /* tau units; the target time for Metropolis */
  double dt;              /* integration step; total_time/dt must be an integer */
  int gauge_kind;         /* gmc_gauge_kind */
  double diffusion;       /* constant diffusion gauge A */
  double lambda;          /* extra-noise amplitude, > 0 for the real gauge */
  double frame_frequency; /* rotating-frame angular frequency */
  size_t save_stride;     /* record every save_stride steps */
} gmc_sim_config;

/* nbar=100, T=0.1, dt=1e-4, real gauge, A=2, lambda=1/2, frame=nbar, stride 10. */
GMC_API void gmc_sim_config_default(gmc_sim_config* cfg);

GMC_API const char* gmc_version(void);
GMC_API const char* gmc_last_error(void);
GMC_API const char* gmc_status_string(gmc_status status);

/* ---- Moment series (stochastic and branching samplers) ---------------- */

typedef struct gmc_series gmc_series;

typedef struct gmc_series_row {
  double tau;
  double mean_x, err_x;         /* <X> = Re <a> */
  double mean_n, err_n;         /* <a^dagger a> */
  double mean_omega, err_omega; /* <Omega> */
} gmc_series_row;

GMC_API gmc_status gmc_run_stochastic(const gmc_sim_config* sim, uint64_t n_trajectories,
                                      uint64_t n_groups, uint64_t seed, uint32_t workers,
                                      gmc_series** out);

GMC_API gmc_status gmc_run_branching(const gmc_sim_config* sim, uint64_t n_pop,
                                     uint64_t n_populations, double branch_interval,
                                     uint64_t seed, uint32_t workers, gmc_series** out);

GMC_API size_t gmc_series_length(const gmc_series* series);
GMC_API gmc_status gmc_series_get_row(const gmc_series* series, size_t index,
                                      gmc_series_row* row);
/* Largest |Im|/|Re| of the Hermitian numerators over all groups and times. */
GMC_API gmc_status gmc_series_imag_residue(const gmc_series* series, double* x_residue,
                                           double* n_residue);
/* Branching only (zero for stochastic runs). Sizes are recorded after each event. */
GMC_API size_t gmc_series_population_count(const gmc_series* series);
GMC_API size_t gmc_series_event_count(const gmc_series* series);
GMC_API gmc_status gmc_series_population_size(const gmc_series* series, size_t population,
                                              size_t event, uint64_t* size);
GMC_API void gmc_series_destroy(gmc_series* series);

/* ---- Metropolis-Hastings -------------------------------------------------- */

typedef struct gmc_metropolis_config {
  uint64_t n_chains;
  uint64_t samples_per_chain;
  uint64_t burn_in;
  double mutate_fraction;
  uint64_t seed;
  uint32_t workers;
} gmc_metropolis_config;

/* 100 chains x 10^4 samples, burn-in 10^4, fraction 0.1, seed 1. */
GMC_API void gmc_metropolis_config_default(gmc_metropolis_config* cfg);

typedef struct gmc_metropolis_row {
  double tau;
  double mean_x, err_x;
  double mean_n, err_n;
  double acceptance_rate;
} gmc_metropolis_row;

typedef struct gmc_metropolis_result gmc_metropolis_result;

/* Samples the weight at sim->total_time. Real gauge only. */
GMC_API gmc_status gmc_run_metropolis(const gmc_sim_config* sim,
                                      const gmc_metropolis_config* cfg,
                                      gmc_metropolis_result** out);
GMC_API gmc_status gmc_metropolis_get_row(const gmc_metropolis_result* result,
                                          gmc_metropolis_row* row);
GMC_API size_t gmc_metropolis_warning_count(const gmc_metropolis_result* result);
GMC_API const char* gmc_metropolis_warning(const gmc_metropolis_result* result, size_t index);
GMC_API void gmc_metropolis_destroy(gmc_metropolis_result* result);

/* ---- Tables (weight spread, noise scan, oracle) ------------------------- */

typedef struct gmc_table gmc_table;

GMC_API size_t gmc_table_rows(const gmc_table* table);
GMC_API size_t gmc_table_cols(const gmc_table* table);
GMC_API const char* gmc_table_column_name(const gmc_table* table, size_t col);
/* NaN when row or col is out of range. */
GMC_API double gmc_table_value(const gmc_table* table, size_t row, size_t col);
GMC_API void gmc_table_destroy(gmc_table* table);

/* Per-step weights of `count` random trajectories. Columns: tau, omega_0..
 * (real gauge or none) or tau, abs_omega_i, arg_omega_i (complex gauge). */
GMC_API gmc_status gmc_weight_spread(const gmc_sim_config* sim, size_t count, uint64_t seed,
                                     gmc_table** out);

/* Standard deviation of the final weight when one spectrum bin of one random
 * base path is redrawn `trials` times. Scans channel xi4 (index 3) or, with
 * all_channels != 0, every channel. Columns: channel, bin, sigma_omega. */
GMC_API gmc_status gmc_noise_scan(const gmc_sim_config* sim, uint64_t trials,
                                  int all_channels, uint64_t seed, uint32_t workers,
                                  gmc_table** out);

/* Exact reference on the saved-time grid of `sim`. Columns: tau, exact_x,
 * envelope_x, fock_x, mean_n. cutoff 0 selects the default. */
GMC_API gmc_status gmc_oracle_table(const gmc_sim_config* sim, uint64_t cutoff,
                                    gmc_table** out);

GMC_API gmc_status gmc_exact_x_rotating(double nbar, double tau, double* x);
/* Truncated Fock-basis values; cutoff 0 selects the default. Either output
 * pointer may be NULL. */
GMC_API gmc_status gmc_fock_moments(double nbar, double tau, uint64_t cutoff,
                                    double* x_rotating, double* n_mean);

#ifdef __cplusplus
}
#endif

#endif
