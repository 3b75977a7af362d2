// SPDX-License-Identifier: Apache-2.0
//
// Seeded random problem instances for the validation suites and benchmarks.

#pragma once

#include <cstdint>

#include "oafmtl/config.hpp"
#include "oafmtl/objective.hpp"
#include "oafmtl/optimizer.hpp"
#include "oafmtl/rng.hpp"

namespace oafmtl {

enum class RhoKind { Uniform, Random };

struct InstanceOptions {
  RhoKind rho = RhoKind::Random;
  /// Placements and path loss from cfg; otherwise every device has unit gain.
  bool path_loss = false;
  /// Samples per device; <= 0 draws integers uniformly from [1, 10].
  double Q = 0.0;
};

/// Normalized Wishart draw: symmetric, PSD, unit diagonal.
RMat random_correlation(int M, RngStream& rng);

/// Topology, antennas, P0, sigma2 and (for uniform rho) epsilon come from cfg.
Problem random_problem(const SystemConfig& cfg, std::uint64_t seed, const InstanceOptions& opt = {});

/// Random feasible u (inside the ball) and random unit f rotated so that
/// a_k >= 0; y at its optimum.
BeamformingState random_state(const Problem& p, const Selection& sel, RngStream& rng);

}  // namespace oafmtl
