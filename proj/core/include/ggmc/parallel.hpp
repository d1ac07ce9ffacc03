#pragma once

#include <cstddef>
#include <functional>

namespace ggmc {

// Worker count used by every parallel loop in the library. Defaults to 1.
void set_thread_count(unsigned count);
unsigned thread_count() noexcept;

// Work is cut into chunks of `grain` items whose boundaries depend only on
// `count` and `grain`. Callers that reduce per chunk therefore get results
// independent of the worker count.
inline constexpr std::size_t kDefaultGrain = 256;

// Calls body(begin, end) once per chunk of [0, count). Exceptions thrown by
// the body are rethrown on the calling thread (first one wins).
void parallel_chunks(std::size_t count, std::size_t grain,
                     const std::function<void(std::size_t, std::size_t)>& body);

inline std::size_t chunk_count(std::size_t count, std::size_t grain) {
  return (count + grain - 1) / grain;
}

}  // namespace ggmc
