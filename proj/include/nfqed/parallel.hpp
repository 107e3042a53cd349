#pragma once

#include <cstddef>
#include <functional>
#include <optional>

namespace nfqed {

// Worker count: explicit request, else $NANOFIBER_QED_THREADS, else the
// hardware concurrency (at least 1).
unsigned resolve_thread_count(std::optional<unsigned> requested = std::nullopt);

// Calls fn(i) for i in [0, n) on up to `threads` workers. Each index is
// processed exactly once; results must be written to per-index slots. The
// exception thrown for the lowest index, if any, is rethrown after all
// workers finish.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn);

}  // namespace nfqed
