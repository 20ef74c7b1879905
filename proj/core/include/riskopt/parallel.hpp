#pragma once

#include <cstddef>
#include <functional>

namespace riskopt {

/// Runs body(i) for i in [0, count) on up to `threads` workers (0: hardware
/// concurrency). Work is handed out by index, so callers that write result
/// i into slot i get the same output for any thread count. The exception of
/// the lowest failing index is rethrown after all workers stop.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body,
                  unsigned threads = 0);

}  // namespace riskopt
