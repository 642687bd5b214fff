#pragma once

#include <cstddef>
#include <functional>

namespace udset {

// Worker count from UDSET_WORKERS, else hardware concurrency (at least 1).
std::size_t worker_count();

// Runs body(chunk_begin, chunk_end, chunk_index) over [0, n) split into
// `chunks` contiguous pieces. Chunk boundaries depend only on n and chunks,
// so reductions that combine per-chunk results in index order are
// independent of scheduling.
void parallel_chunks(std::size_t n, std::size_t chunks,
                     const std::function<void(std::size_t, std::size_t, std::size_t)>& body);

}  // namespace udset
