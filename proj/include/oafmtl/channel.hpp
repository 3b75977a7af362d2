// SPDX-License-Identifier: Apache-2.0
//
// Device geometry, large-scale path gain and block-fading MIMO channels.
// Placements are static for an experiment; fading is redrawn every round.

#pragma once

#include <ostream>
#include <vector>

#include "oafmtl/config.hpp"
#include "oafmtl/rng.hpp"
#include "oafmtl/types.hpp"

namespace oafmtl {

struct DevicePlacement {
  int task = 0;
  int index = 0;
  double radial = 0.0;    // m, in [0, Delta]
  double azimuth = 0.0;   // rad, in [0, 2 pi)
  double distance = 0.0;  // m, sqrt(radial^2 + ps_height^2)
};

struct ChannelSet {
  int round = 0;
  std::vector<CMat> H;       // flat device order, each N_R x N_T
  std::vector<double> gain;  // large-scale gain per device
};

/// One placement per device in flat order.
std::vector<DevicePlacement> place_devices(const SystemConfig& cfg, RngStream& rng);

/// G_S * G_D * kappa * distance^-alpha. Throws std::domain_error below the
/// 1 m reference distance.
double path_gain(double distance, const PathLossConfig& pl);
double path_gain(const DevicePlacement& p, const PathLossConfig& pl);

/// H = sqrt(g/2) * (X + jY), X and Y standard normal, entries row-major in
/// draw order.
ChannelSet draw_channels(const std::vector<DevicePlacement>& placements, int round,
                         const SystemConfig& cfg, RngStream& rng);

/// Same fading rule for explicit gains (tests, synthetic instances).
ChannelSet draw_channels_with_gains(const std::vector<double>& gains, int round, int N_R,
                                    int N_T, RngStream& rng);

/// CSV columns: k,i,radial,azimuth,distance,gain
void write_placements_csv(std::ostream& os, const std::vector<DevicePlacement>& placements,
                          const PathLossConfig& pl);

}  // namespace oafmtl
