#pragma once

#include <functional>

namespace sebm {

// Global worker count for path-parallel loops; 0 means hardware default.
void set_thread_count(int threads);
int thread_count();

// Runs body(i) for i in [0, count), split across workers. Each index must
// touch only its own output slot; results are independent of scheduling.
void parallel_for(int count, const std::function<void(int)>& body);

} // namespace sebm
