// This file is part of the fillin library.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdlib>
#include <thread>
#include <vector>

namespace fillin::detail {

/// Worker cap for internal parallelism. FILLIN_THREADS (a positive integer)
/// overrides the hardware count; unparsable values fall back to 1.
inline std::size_t thread_budget() {
    if (const char* env = std::getenv("FILLIN_THREADS")) {
        char* end = nullptr;
        const unsigned long v = std::strtoul(env, &end, 10);
        if (end != env && end && *end == '\0' && v >= 1)
            return static_cast<std::size_t>(std::min(v, 256ul));
        return 1;
    }
    const unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : hc;
}

/// Runs body(i) for i in [0, n), split into contiguous blocks across at most
/// thread_budget() workers. Callers guarantee the iterations are independent
/// and non-throwing, so results never depend on the worker count.
template <typename Body>
void parallel_rows(std::size_t n, Body&& body) {
    const std::size_t workers = std::min(thread_budget(), std::max<std::size_t>(n, 1));
    if (workers <= 1 || n < 2 * workers) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    const std::size_t chunk = (n + workers - 1) / workers;
    std::vector<std::thread> pool;
    pool.reserve(workers - 1);
    for (std::size_t w = 1; w < workers; ++w) {
        const std::size_t lo = w * chunk;
        const std::size_t hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([&body, lo, hi] {
            for (std::size_t i = lo; i < hi; ++i) body(i);
        });
    }
    for (std::size_t i = 0; i < std::min(chunk, n); ++i) body(i);
    for (auto& t : pool) t.join();
}

}  // namespace fillin::detail
