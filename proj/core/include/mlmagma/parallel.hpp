#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>

namespace mlm {

/// 0 means "one thread per hardware core".
unsigned resolve_threads(unsigned requested);

/// Runs body(begin, end, worker) over [0, count) split into chunks of
/// `chunk` items, handed out dynamically to `threads` workers. Worker ids
/// are dense in [0, threads). Exceptions thrown by body are rethrown on the
/// calling thread after all workers stop.
void parallel_for(std::uint64_t count, unsigned threads, std::uint64_t chunk,
                  const std::function<void(std::uint64_t, std::uint64_t, unsigned)>& body);

}  // namespace mlm
