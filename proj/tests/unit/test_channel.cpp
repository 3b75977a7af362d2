// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "oafmtl/channel.hpp"

using namespace oafmtl;

namespace {

SystemConfig many_devices(int n) {
  return parse_config("K = 1\nM = [" + std::to_string(n) + "]\n");
}

}  // namespace

TEST_CASE("placements stay inside the cell and above the server height") {
  const SystemConfig cfg = parse_config("K = 2\nM = [500, 500]\n");
  RngStream r = substream(1, "placement");
  const auto pl = place_devices(cfg, r);
  REQUIRE(pl.size() == 1000);
  for (const auto& p : pl) {
    CHECK(p.radial <= 100.0);
    CHECK(p.radial >= 0.0);
    CHECK(p.azimuth >= 0.0);
    CHECK(p.azimuth < 2.0 * std::numbers::pi);
    CHECK(p.distance == doctest::Approx(std::hypot(p.radial, 10.0)));
  }
  CHECK(pl[500].task == 1);
  CHECK(pl[500].index == 0);
}

TEST_CASE("a device at the centre is ps_height away") {
  DevicePlacement p;
  p.radial = 0.0;
  p.distance = std::hypot(p.radial, 10.0);
  CHECK(p.distance == 10.0);
}

TEST_CASE("azimuth mean is pi within 3 standard errors") {
  const int n = 10000;
  const SystemConfig cfg = many_devices(n);
  RngStream r = substream(2, "placement");
  const auto pl = place_devices(cfg, r);
  double s = 0.0;
  for (const auto& p : pl) s += p.azimuth;
  const double se = 2.0 * std::numbers::pi / std::sqrt(12.0 * n);
  CHECK(std::abs(s / n - std::numbers::pi) < 3.0 * se);
}

TEST_CASE("disk-uniform placement has E[radial^2] = Delta^2 / 2") {
  const int n = 20000;
  const SystemConfig cfg = many_devices(n);
  RngStream r = substream(3, "placement");
  double s = 0.0;
  for (const auto& p : place_devices(cfg, r)) s += p.radial * p.radial;
  // radial^2 ~ U[0, 1e4]: mean 5e3, sd 1e4 / sqrt(12)
  CHECK(std::abs(s / n - 5000.0) < 3.0 * (1e4 / std::sqrt(12.0)) / std::sqrt(n));
}

TEST_CASE("path gain with the table constants at 10 m") {
  PathLossConfig pl;
  CHECK(path_gain(10.0, pl) == doctest::Approx(5.0119e-10).epsilon(1e-4));
  CHECK(path_gain(20.0, pl) / path_gain(10.0, pl) == doctest::Approx(std::pow(2.0, -3.8)));
  PathLossConfig flat;
  flat.alpha = 0.0;
  flat.G_S = flat.G_D = flat.kappa = 1.0;
  CHECK(path_gain(1.0, flat) == 1.0);
  CHECK(path_gain(1234.5, flat) == 1.0);
  CHECK_THROWS_AS(path_gain(0.5, pl), std::domain_error);
}

TEST_CASE("unit-gain fading entries have unit variance") {
  RngStream r = substream(4, "channel/1");
  const auto cs = draw_channels_with_gains(std::vector<double>(100, 1.0), 1, 25, 20, r);
  double s = 0.0, n = 0.0;
  for (const auto& H : cs.H) {
    s += H.cwiseAbs2().sum();
    n += static_cast<double>(H.size());
  }
  CHECK(n == 50000.0);
  CHECK(s / n >= 0.99);
  CHECK(s / n <= 1.01);
}

TEST_CASE("tiny gains scale the entries") {
  RngStream r = substream(5, "channel/1");
  const auto cs = draw_channels_with_gains({1e-30}, 1, 8, 2, r);
  const double m = cs.H[0].cwiseAbs().maxCoeff();
  CHECK(m < 1e-14);
  CHECK(m > 1e-17);
}

TEST_CASE("same seed and round reproduce the channels") {
  const SystemConfig cfg = parse_config("");
  RngStream p = substream(cfg, "placement");
  const auto pl = place_devices(cfg, p);
  RngStream a = substream(cfg, "channel/3"), b = substream(cfg, "channel/3");
  const auto ca = draw_channels(pl, 3, cfg, a), cb = draw_channels(pl, 3, cfg, b);
  REQUIRE(ca.H.size() == 20);
  for (std::size_t d = 0; d < ca.H.size(); ++d) {
    CHECK(ca.H[d] == cb.H[d]);
    CHECK(ca.H[d].rows() == 8);
    CHECK(ca.H[d].cols() == 2);
  }
}

TEST_CASE("placement CSV header") {
  const SystemConfig cfg = parse_config("K = 1\nM = [2]\n");
  RngStream r = substream(cfg, "placement");
  std::ostringstream os;
  write_placements_csv(os, place_devices(cfg, r), cfg.pathloss);
  CHECK(os.str().rfind("k,i,radial,azimuth,distance,gain\n", 0) == 0);
}
