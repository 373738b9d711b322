#pragma once

#include <cstddef>
#include <functional>

namespace sbts {

//! Worker count used by parallel loops; 0 means hardware concurrency.
void set_thread_count(std::size_t threads);
std::size_t thread_count();

//! Calls fn(i) for i in [0, count), handing indices to workers dynamically;
//! callers must write results by index so the outcome does not depend on the
//! number of workers. The first exception thrown by any worker is rethrown.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn);

} // namespace sbts
