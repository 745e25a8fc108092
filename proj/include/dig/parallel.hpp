#ifndef DIG_PARALLEL_HPP
#define DIG_PARALLEL_HPP

#include <cstddef>
#include <functional>

namespace dig {

// Worker count: DIG_THREADS when set to a positive integer, otherwise the
// hardware concurrency (at least 1).
std::size_t worker_count();

// Calls body(i) for every i in [0, count). Work items are claimed dynamically;
// callers write results into per-index slots so the outcome does not depend
// on scheduling. The first exception thrown by any item is rethrown.
void parallel_for(std::size_t count, const std::function<void(std::size_t)> &body,
                  std::size_t workers = 0);

} // namespace dig

#endif // DIG_PARALLEL_HPP
