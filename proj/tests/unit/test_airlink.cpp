// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>

#include "oafmtl/airlink.hpp"
#include "oafmtl/objective.hpp"
#include "oracles.hpp"

using namespace oafmtl;

namespace {

GradientBatch batch_of(const RMat& g) { return normalize(g); }

ChannelSet random_channels(int n, int NR, int NT, std::uint64_t seed) {
  RngStream r = substream(seed, "channel/1");
  return draw_channels_with_gains(std::vector<double>(static_cast<std::size_t>(n), 1.0), 1, NR, NT, r);
}

CVec random_cvec(int n, RngStream& r) {
  CVec v(n);
  for (int i = 0; i < n; ++i) v(i) = r.cnormal();
  return v;
}

}  // namespace

TEST_CASE("modulation packs halves into real and imaginary parts") {
  RVec g(4);
  g << 1, 2, 3, 4;
  const CVec r = modulate(g);
  REQUIRE(r.size() == 2);
  CHECK(r(0) == cd(1, 3));
  CHECK(r(1) == cd(2, 4));
  CHECK(modulate(RVec::Zero(6)).isZero(0.0));
  CHECK_THROWS_AS(modulate(RVec::Zero(3)), std::invalid_argument);
  RngStream rng = substream(1, "mod");
  RVec x(10);
  for (int i = 0; i < 10; ++i) x(i) = rng.normal();
  CHECK(demodulate(modulate(x)) == x);
}

TEST_CASE("single device without noise puts H u r^T on the air") {
  const Topology topo{{1}};
  const ChannelSet ch = random_channels(1, 4, 2, 2);
  RngStream r = substream(2, "u");
  TransmitPlan plan{{random_cvec(2, r)}};
  GradientBatch b;
  b.normalized = RMat::Zero(6, 1);
  b.normalized.topRows(3).setOnes();  // r[c] = 1 for every c
  const CRowMat Y = transmit(ch, plan, {b}, topo, {1}, 0.0, nullptr);
  const CVec x = oracle::Hu(ch.H[0], plan.u[0]);
  for (int c = 0; c < 3; ++c) CHECK((Y.col(c) - x).norm() < 1e-14);
}

TEST_CASE("superposition is linear in the devices") {
  const Topology topo{{2}};
  const ChannelSet ch = random_channels(2, 4, 2, 3);
  RngStream r = substream(3, "u");
  TransmitPlan plan{{random_cvec(2, r), random_cvec(2, r)}};
  RMat g(8, 2);
  for (Eigen::Index i = 0; i < g.size(); ++i) g.data()[i] = r.normal();
  const GradientBatch b = batch_of(g);
  const CRowMat both = transmit(ch, plan, {b}, topo, {1, 1}, 0.0, nullptr);
  const CRowMat first = transmit(ch, plan, {b}, topo, {1, 0}, 0.0, nullptr);
  const CRowMat second = transmit(ch, plan, {b}, topo, {0, 1}, 0.0, nullptr);
  CHECK((both - first - second).norm() < 1e-13);
}

TEST_CASE("silent devices leave only noise of power sigma2") {
  const Topology topo{{1}};
  const ChannelSet ch = random_channels(1, 8, 2, 4);
  TransmitPlan plan{{CVec::Zero(2)}};
  GradientBatch b;
  b.normalized = RMat::Ones(20000, 1);
  RngStream noise = substream(4, "noise/1");
  const CRowMat Y = transmit(ch, plan, {b}, topo, {1}, 0.25, &noise);
  const double n = static_cast<double>(Y.size());
  const double p = Y.cwiseAbs2().sum() / n;
  // |N|^2 is exponential with mean and sd sigma2.
  CHECK(std::abs(p - 0.25) < 4.0 * 0.25 / std::sqrt(n));
}

TEST_CASE("combining") {
  CRowMat Y(3, 1);
  Y << cd(1, 2), cd(3, 4), cd(5, 6);
  const CVec e1 = CVec::Unit(3, 0);
  CHECK(combine(Y, e1, 0.0).isZero(0.0));
  CHECK(combine(Y, e1, 2.5)(0) == cd(2.5, 5.0));
  RngStream r = substream(5, "comb");
  CRowMat Z(4, 9);
  for (Eigen::Index i = 0; i < Z.size(); ++i) Z.data()[i] = r.cnormal();
  CVec f = random_cvec(4, r);
  f.normalize();
  CHECK(combine(Z, f, 1.0).norm() <= Z.norm() + 1e-12);
}

TEST_CASE("reconstruct of zero returns the weighted mean") {
  RMat g(4, 2);
  g << 1, 10, 2, 10, 3, 10, 4, 10;
  const GradientBatch b = batch_of(g);
  RVec Q(2);
  Q << 1, 3;
  const RVec out = reconstruct(CVec::Zero(2), b, Q, {1, 1});
  CHECK((out.array() - (2.5 + 30.0) / 4.0).abs().maxCoeff() < 1e-14);
  CHECK_THROWS_AS(reconstruct(CVec::Zero(2), b, Q, {0, 0}), std::invalid_argument);
}

TEST_CASE("perfectly aligned noiseless single device recovers g exactly") {
  const Topology topo{{1}};
  const ChannelSet ch = random_channels(1, 8, 2, 6);
  RngStream r = substream(6, "g");
  RMat g(10, 1);
  for (int d = 0; d < 10; ++d) g(d, 0) = 0.3 + r.normal();
  const GradientBatch b = batch_of(g);
  RVec Q(1);
  Q << 7.0;
  CVec f = random_cvec(8, r);
  f.normalize();
  TransmitPlan plan{{CVec::Zero(2)}};
  const double zeta = zero_forcing(0, topo, ch.H, f, Q, {1}, b.v_task, 1.0, plan);
  const CRowMat Y = transmit(ch, plan, {b}, topo, {1}, 0.0, nullptr);
  const RVec ghat = reconstruct(combine(Y, f, zeta), b, Q, {1});
  CHECK((ghat - g.col(0)).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("aligned gain recovers the weighted average of normalized gradients") {
  const Topology topo{{3}};
  const ChannelSet ch = random_channels(3, 8, 2, 7);
  RngStream r = substream(7, "g");
  RMat g(12, 3);
  for (Eigen::Index i = 0; i < g.size(); ++i) g.data()[i] = r.normal();
  GradientBatch b = batch_of(g);
  b.mean.setZero();  // zero means isolate the over-the-air part
  RVec Q(3);
  Q << 1, 2, 3;
  CVec f = random_cvec(8, r);
  f.normalize();
  TransmitPlan plan{{CVec::Zero(2), CVec::Zero(2), CVec::Zero(2)}};
  const double v = 1.0;
  const double zeta = zero_forcing(0, topo, ch.H, f, Q, {1, 1, 1}, v, 1.0, plan);
  const CRowMat Y = transmit(ch, plan, {b}, topo, {1, 1, 1}, 0.0, nullptr);
  const RVec ghat = reconstruct(combine(Y, f, zeta), b, Q, {1, 1, 1});
  const RVec want = b.normalized * Q / Q.sum();
  CHECK((ghat - want).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("optimal zeta closed forms") {
  MseCoefficients c;
  c.a = 2.0;
  c.b = 1.0;
  c.c0 = 1.0;
  c.sumQ = 1.0;
  CHECK(optimal_zeta(c, 1.0) == 1.0);
  CHECK(comm_mse(1.0, c, 1.0, 1) == 0.0);
  c.b = 2.0;  // sigma2 = 2 with a unit combiner adds 1
  CHECK(optimal_zeta(c, 1.0) == 0.5);
  c.b = 0.0;
  CHECK_THROWS_AS(optimal_zeta(c, 1.0), NumericalError);
}

TEST_CASE("zero-forcing scale keeps the weakest device at full power") {
  // One device, Q = 1, v = 1, |f^H H|^2 = 1, P0 = 2. Forcing zeta f^H H u = 1
  // needs |u| = 1 / zeta, and the budget 2|u|^2 <= P0 gives zeta^2 = 1.
  const Topology topo{{1}};
  CMat H = CMat::Zero(2, 1);
  H(0, 0) = 1.0;
  const CVec f = CVec::Unit(2, 0);
  RVec Q(1);
  Q << 1.0;
  TransmitPlan plan{{CVec::Zero(1)}};
  const double zeta = zero_forcing(0, topo, {H}, f, Q, {1}, 1.0, 2.0, plan);
  CHECK(zeta * zeta == doctest::Approx(1.0));
  CHECK(2.0 * plan.u[0].squaredNorm() == doctest::Approx(2.0));
  CHECK(max_power_fraction(plan, 2.0) == doctest::Approx(1.0));
}

TEST_CASE("zero forcing is set by the straggler and cancels misalignment") {
  const Topology topo{{2}};
  CMat H1 = CMat::Zero(2, 1), H2 = CMat::Zero(2, 1);
  H1(0, 0) = 1.0;
  H2(0, 0) = 2.0;
  const CVec f = CVec::Unit(2, 0);
  RVec Q(2);
  Q << 1.0, 1.0;
  TransmitPlan plan{{CVec::Zero(1), CVec::Zero(1)}};
  const double zeta = zero_forcing(0, topo, {H1, H2}, f, Q, {1, 1}, 1.0, 2.0, plan);
  CHECK(zeta == doctest::Approx(1.0));  // from the norm-1 device
  CHECK(2.0 * plan.u[0].squaredNorm() == doctest::Approx(2.0));
  CHECK(2.0 * plan.u[1].squaredNorm() == doctest::Approx(0.5));

  // Random multi-antenna case: every zeta f^H H_i u_i equals Q_i sqrt(v), so
  // the misalignment part sum rho_ij (zeta h_i - Q_i sqrt v)(...)^* vanishes.
  RngStream r = substream(8, "zf");
  const Topology t5{{5}};
  const ChannelSet ch = random_channels(5, 8, 2, 8);
  CVec g = random_cvec(8, r);
  g.normalize();
  RVec Q5(5);
  Q5 << 1, 2, 3, 4, 5;
  TransmitPlan p5{std::vector<CVec>(5, CVec::Zero(2))};
  const double v = 0.3;
  const double z5 = zero_forcing(0, t5, ch.H, g, Q5, Selection(5, 1), v, 1.0, p5);
  double worst = 0.0;
  for (int i = 0; i < 5; ++i) {
    const cd e = z5 * oracle::fHu(g, ch.H[i], p5.u[i]) - Q5(i) * std::sqrt(v);
    worst = std::max(worst, std::abs(e) / (Q5(i) * std::sqrt(v)));
    CHECK(2.0 * p5.u[i].squaredNorm() <= 1.0 * (1.0 + 1e-12));
  }
  CHECK(worst < 1e-12);
  CHECK(max_power_fraction(p5, 1.0) == doctest::Approx(1.0));
  CHECK(zero_forcing_zeta(0, t5, ch.H, g, Q5, Selection(5, 1), v, 1.0) == z5);
}
