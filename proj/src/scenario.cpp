// SPDX-License-Identifier: Apache-2.0

#include "oafmtl/scenario.hpp"

#include <cmath>

#include "oafmtl/channel.hpp"
#include "oafmtl/gradstats.hpp"

namespace oafmtl {

RMat random_correlation(int M, RngStream& rng) {
  RMat A(M, M + 2);
  for (int i = 0; i < M; ++i) {
    for (int j = 0; j < M + 2; ++j) A(i, j) = rng.normal();
  }
  RMat S = A * A.transpose();
  RVec s = S.diagonal().cwiseSqrt().cwiseInverse();
  RMat rho = s.asDiagonal() * S * s.asDiagonal();
  rho = 0.5 * (rho + rho.transpose()).eval();
  rho.diagonal().setOnes();
  return rho;
}

Problem random_problem(const SystemConfig& cfg, std::uint64_t seed, const InstanceOptions& opt) {
  Problem p;
  p.topo = cfg.topology();
  p.sigma2 = cfg.sigma2;
  p.P0 = cfg.P0;
  p.N_R = cfg.N_R;
  p.N_T = cfg.N_T;
  const int N = p.topo.total();

  RngStream rng = substream(seed, "instance");
  std::vector<double> gains(static_cast<std::size_t>(N), 1.0);
  if (opt.path_loss) {
    RngStream prng = substream(seed, "placement");
    const auto pl = place_devices(cfg, prng);
    for (int d = 0; d < N; ++d) gains[d] = path_gain(pl[d], cfg.pathloss);
  }
  RngStream crng = substream(seed, "channel/0");
  p.H = draw_channels_with_gains(gains, 0, p.N_R, p.N_T, crng).H;

  p.Q = RVec(N);
  for (int d = 0; d < N; ++d) {
    p.Q(d) = opt.Q > 0.0 ? opt.Q : static_cast<double>(1 + rng.below(10));
  }
  for (int k = 0; k < p.topo.tasks(); ++k) {
    p.Q_full.push_back(p.Q.segment(p.topo.offset(k), p.topo.devices(k)).sum());
    if (opt.rho == RhoKind::Uniform) {
      p.rho.push_back(uniform_correlation(cfg.correlation.epsilon, p.topo.devices(k), k).rho);
    } else {
      p.rho.push_back(random_correlation(p.topo.devices(k), rng));
    }
  }
  return p;
}

BeamformingState random_state(const Problem& p, const Selection& sel, RngStream& rng) {
  BeamformingState s;
  const int K = p.topo.tasks();
  s.f.resize(static_cast<std::size_t>(K));
  s.y.assign(static_cast<std::size_t>(K), 0.0);
  s.zeta.assign(static_cast<std::size_t>(K), 0.0);
  for (int k = 0; k < K; ++k) {
    CVec f(p.N_R);
    for (int r = 0; r < p.N_R; ++r) f(r) = rng.cnormal();
    s.f[k] = f / f.norm();
  }
  const double radius = std::sqrt(p.P0 / 2.0);
  for (int d = 0; d < p.topo.total(); ++d) {
    CVec u = CVec::Zero(p.H[d].cols());
    if (sel[d]) {
      for (Eigen::Index t = 0; t < u.size(); ++t) u(t) = rng.cnormal();
      u *= radius * std::sqrt(rng.uniform()) / u.norm();
    }
    s.u.push_back(std::move(u));
  }
  // Rotate each f_k so that sum_ij rho_ij Q_j f_k^H H_i u_i is real positive,
  // the orientation every receiver design in this library produces.
  const EffectiveChannels e = effective_channels(p.H, s.u, s.f);
  for (int k = 0; k < K; ++k) {
    const int off = p.topo.offset(k);
    cd S(0.0, 0.0);
    for (int i = 0; i < p.topo.devices(k); ++i) {
      if (!sel[off + i]) continue;
      for (int j = 0; j < p.topo.devices(k); ++j) {
        if (sel[off + j]) S += p.rho[k](i, j) * p.Q(off + j) * e.h(k, off + i);
      }
    }
    if (std::abs(S) > 0.0) s.f[k] *= S / std::abs(S);
  }
  const auto c = state_coefficients(p, sel, s);
  for (int k = 0; k < K; ++k) s.y[k] = update_y(c[k]);
  return s;
}

}  // namespace oafmtl
