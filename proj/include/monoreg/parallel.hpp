#pragma once

#include <functional>

namespace monoreg {

/// Runs fn(i) for i in [0, n) on `workers` threads. Tasks are claimed through
/// an atomic counter; callers must make fn(i) independent of claim order
/// (write results into a preallocated slot i) to keep output deterministic
/// for any worker count.
void parallel_for(long n, int workers, const std::function<void(long)>& fn);

}  // namespace monoreg
