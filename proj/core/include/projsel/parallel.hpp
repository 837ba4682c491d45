#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>

namespace projsel {

// Global worker count used by every parallel loop in the library. Values < 1
// mean "use the hardware concurrency".
void set_thread_count(int threads);
int thread_count();

/// Runs body(i) for i in [0, n). Each index is executed exactly once; callers
/// write results into per-index slots so output never depends on scheduling.
/// Nested calls from inside a worker run serially on that worker.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

/// 64-bit mixing function used to derive independent child seeds.
std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream);

}  // namespace projsel
