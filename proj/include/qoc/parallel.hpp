// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>

namespace qoc {

/// Number of worker threads. Reads QOC_THREADS, falls back to the hardware
/// concurrency. Always >= 1.
unsigned worker_count();

/// Runs fn(i) for every i in [0, n). Work items are claimed dynamically, so
/// callers must write results into per-index slots and reduce afterwards in
/// index order. The first exception thrown by any item is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

/// Derives an independent 64-bit seed for stream `index` of `base`
/// (splitmix64 finalizer over both words).
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index);

}  // namespace qoc
