#ifndef GAUGEMC_PARALLEL_HPP
#define GAUGEMC_PARALLEL_HPP

#include <cstddef>
#include <functional>

namespace gaugemc {

/// Runs fn(0..count-1) on up to `workers` threads (0 = hardware concurrency).
/// Each index must write only to its own output slot. If any call throws, the
/// exception of the lowest failing index is rethrown after all threads join.
void parallel_for(std::size_t count, std::size_t workers,
                  const std::function<void(std::size_t)>& fn);

}  // namespace gaugemc

#endif
