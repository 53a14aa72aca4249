#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>

namespace spikelab {

// SPIKELAB_THREADS if set and positive, else the hardware concurrency (at least 1).
unsigned default_thread_count();

// Runs body(i) for i in [0, count) on up to `threads` workers (0 = default).
// The exception from the lowest failing index is rethrown after all workers stop.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& body);

// Seed of stream `index` under `master` (splitmix64 mixing).
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

}  // namespace spikelab
