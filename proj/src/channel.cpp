// SPDX-License-Identifier: Apache-2.0

#include "oafmtl/channel.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "oafmtl/report.hpp"

namespace oafmtl {

std::vector<DevicePlacement> place_devices(const SystemConfig& cfg, RngStream& rng) {
  const Topology topo = cfg.topology();
  const auto& pl = cfg.pathloss;
  std::vector<DevicePlacement> out;
  out.reserve(static_cast<std::size_t>(topo.total()));
  for (int k = 0; k < topo.tasks(); ++k) {
    for (int i = 0; i < topo.devices(k); ++i) {
      DevicePlacement p;
      p.task = k;
      p.index = i;
      p.azimuth = 2.0 * std::numbers::pi * rng.uniform();
      const double u = rng.uniform();
      if (pl.placement == PlacementLaw::DiskUniform) {
        p.radial = pl.Delta * std::sqrt(u);  // radial^2 ~ U[0, Delta^2]
      } else {
        p.radial = std::sqrt(u * pl.Delta);  // radial^2 ~ U[0, Delta]
      }
      p.distance = std::hypot(p.radial, pl.ps_height);
      out.push_back(p);
    }
  }
  return out;
}

double path_gain(double distance, const PathLossConfig& pl) {
  if (!(distance >= 1.0)) {
    throw std::domain_error("path_gain: distance below the 1 m reference distance");
  }
  return pl.G_S * pl.G_D * pl.kappa * std::pow(distance, -pl.alpha);
}

double path_gain(const DevicePlacement& p, const PathLossConfig& pl) {
  return path_gain(p.distance, pl);
}

ChannelSet draw_channels_with_gains(const std::vector<double>& gains, int round, int N_R,
                                    int N_T, RngStream& rng) {
  ChannelSet cs;
  cs.round = round;
  cs.gain = gains;
  cs.H.reserve(gains.size());
  for (double g : gains) {
    const double s = std::sqrt(g / 2.0);
    CMat H(N_R, N_T);
    for (int r = 0; r < N_R; ++r) {
      for (int c = 0; c < N_T; ++c) {
        const double x = rng.normal();
        const double y = rng.normal();
        H(r, c) = cd(s * x, s * y);
      }
    }
    cs.H.push_back(std::move(H));
  }
  return cs;
}

ChannelSet draw_channels(const std::vector<DevicePlacement>& placements, int round,
                         const SystemConfig& cfg, RngStream& rng) {
  std::vector<double> gains;
  gains.reserve(placements.size());
  for (const auto& p : placements) gains.push_back(path_gain(p, cfg.pathloss));
  return draw_channels_with_gains(gains, round, cfg.N_R, cfg.N_T, rng);
}

void write_placements_csv(std::ostream& os, const std::vector<DevicePlacement>& placements,
                          const PathLossConfig& pl) {
  os << "k,i,radial,azimuth,distance,gain\n";
  for (const auto& p : placements) {
    os << p.task << ',' << p.index << ',' << fmt_num(p.radial) << ',' << fmt_num(p.azimuth) << ','
       << fmt_num(p.distance) << ',' << fmt_num(path_gain(p, pl)) << '\n';
  }
}

}  // namespace oafmtl
