#pragma once

#include <functional>

namespace obstacle {

// Worker count: OBSTACLE_MFEM_THREADS if set (>= 1), else the hardware count.
int worker_count();
void set_worker_count(int n);  // 0 restores the default

// Runs fn(i) for i in [0, n) over contiguous chunks. Callers write to
// per-index slots only, so results do not depend on the thread count.
void parallel_for(int n, const std::function<void(int)>& fn);

}  // namespace obstacle
