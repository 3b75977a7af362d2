// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <functional>

namespace oafmtl {

/// Runs body(i) for i in [0, n) on up to `threads` workers. Each index runs
/// exactly once; callers write results by index so output order is fixed.
/// The first exception thrown by any body is rethrown after all workers join.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& body);

}  // namespace oafmtl
