#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>

namespace witness_forge {

/// Worker count used when a caller passes threads <= 0: the value set by
/// set_thread_count, else WITNESS_FORGE_THREADS, else the hardware count.
int thread_count();
void set_thread_count(int threads);

/// Runs fn(i) for i in [0, n) on up to `threads` workers. The first exception
/// thrown by any task is rethrown on the calling thread after all join.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn);

/// SplitMix64 finalizer; derives independent stream seeds from a master seed.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace witness_forge
