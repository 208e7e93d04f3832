#pragma once

#include <cstddef>
#include <functional>

namespace wastebench {

/// Number of workers used by parallel_for. 0 selects hardware concurrency.
void set_worker_count(std::size_t workers);
std::size_t worker_count();

/// Runs body(i) for i in [0, n). Work items must write to disjoint outputs;
/// results therefore do not depend on the worker count. The first exception
/// (lowest index) is rethrown after all workers finish.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace wastebench
