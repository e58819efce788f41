#pragma once

#include <cstddef>
#include <functional>

namespace malab {

// Worker count used by parallel_for. Defaults to 1.
void set_thread_count(int threads);
int thread_count();

/// Runs body(begin, end) over a static partition of [0, count). Each index is
/// visited exactly once; the partition depends only on count and the thread
/// count, so per-index writes are deterministic. Reductions belong to the
/// caller and should run serially over per-index results.
void parallel_for(std::size_t count,
                  const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace malab
