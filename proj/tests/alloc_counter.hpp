#pragma once

#include <cstddef>

namespace attmpc::testing {

/// Counts global operator new/delete hits (see alloc_counter.cpp, linked into
/// the test binaries). Used to prove the solver hot paths stay off the heap.
void reset_alloc_counters();
std::size_t allocation_count();
std::size_t allocated_bytes();

}  // namespace attmpc::testing
