#pragma once

#include <cstddef>
#include <functional>

namespace minmax_match {

/// Environment variable capping worker threads; 0 or unset means one per core.
inline constexpr const char* kThreadsEnvVar = "MINMAX_MATCH_THREADS";

/// `requested` if nonzero, else the environment cap, else hardware concurrency.
[[nodiscard]] unsigned resolve_threads(unsigned requested = 0);

/// Calls body(k) for k in [0, count) on up to `threads` workers. If any call
/// throws, the exception from the lowest k is rethrown after all workers stop.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& body);

}  // namespace minmax_match
