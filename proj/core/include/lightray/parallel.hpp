#pragma once

#include <cstddef>
#include <functional>

namespace lightray {

/// Worker count used by assembly and mat-vecs. Defaults to 1.
void set_thread_count(int threads);
int thread_count();

/// Calls body(begin, end) on contiguous chunks of [0, n). Chunk boundaries
/// depend only on n and the thread count; bodies must write disjoint data.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace lightray
