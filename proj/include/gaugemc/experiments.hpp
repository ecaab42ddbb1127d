#ifndef GAUGEMC_EXPERIMENTS_HPP
#define GAUGEMC_EXPERIMENTS_HPP

// Table-producing experiments that are not samplers: weight spreading,
// spectral noise sensitivity and the exact reference curves.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "gaugemc/integrator.hpp"

namespace gaugemc {

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

/// Weights of `count` independent trajectories at every step.
Table weight_spread(const SimConfig& sim, std::size_t count, std::uint64_t seed);

/// sigma(Omega_final) per independent bin for the given channels; one random
/// base path shared by every bin. Columns: channel, bin, sigma_omega.
Table noise_scan(const SimConfig& sim, std::size_t trials,
                 const std::vector<std::size_t>& channels, std::uint64_t seed,
                 std::size_t workers);

/// Columns: tau, exact_x, envelope_x, fock_x, mean_n on the saved-time grid.
Table oracle_table(const SimConfig& sim, std::size_t cutoff);

}  // namespace gaugemc

#endif
