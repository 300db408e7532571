#pragma once

#include <cstddef>
#include <functional>

namespace glassbox {

// Process-wide worker cap, set once from the CLI --threads flag.
int max_threads();
void set_max_threads(int n);

// Runs fn(i) for i in [0, n). Each index must write only to its own output
// slot; chunk assignment is static, so results are identical for any worker
// count. Exceptions propagate (first one wins).
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace glassbox
