// SPDX-License-Identifier: Apache-2.0

#include "oafmtl/airlink.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "oafmtl/objective.hpp"
#include "oafmtl/simd/kernels.hpp"

namespace oafmtl {

EffectiveChannels effective_channels(const std::vector<CMat>& H, const std::vector<CVec>& u,
                                     const std::vector<CVec>& f) {
  if (H.size() != u.size()) throw std::invalid_argument("effective_channels: H/u size mismatch");
  EffectiveChannels e;
  e.h = CMat::Zero(static_cast<Eigen::Index>(f.size()), static_cast<Eigen::Index>(H.size()));
  for (std::size_t d = 0; d < H.size(); ++d) {
    if (u[d].size() == 0) continue;
    const CVec x = H[d] * u[d];
    for (std::size_t k = 0; k < f.size(); ++k) {
      e.h(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(d)) = f[k].dot(x);
    }
  }
  return e;
}

CVec modulate(const RVec& g) {
  if (g.size() % 2 != 0) throw std::invalid_argument("modulate: odd model dimension");
  const Eigen::Index C = g.size() / 2;
  CVec r(C);
  for (Eigen::Index c = 0; c < C; ++c) r(c) = cd(g(c), g(c + C));
  return r;
}

RVec demodulate(const CVec& r) {
  const Eigen::Index C = r.size();
  RVec g(2 * C);
  g.head(C) = r.real();
  g.tail(C) = r.imag();
  return g;
}

CRowMat transmit(const ChannelSet& channels, const TransmitPlan& plan,
                 const std::vector<GradientBatch>& batches, const Topology& topo,
                 const Selection& sel, double sigma2, RngStream* noise) {
  if (static_cast<int>(batches.size()) != topo.tasks()) {
    throw std::invalid_argument("transmit: one batch per task required");
  }
  if (static_cast<int>(channels.H.size()) != topo.total() ||
      static_cast<int>(plan.u.size()) != topo.total() ||
      static_cast<int>(sel.size()) != topo.total()) {
    throw std::invalid_argument("transmit: device count mismatch");
  }
  const Eigen::Index D = batches.front().normalized.rows();
  if (D % 2 != 0) throw std::invalid_argument("transmit: odd model dimension");
  const Eigen::Index C = D / 2;
  const Eigen::Index NR = channels.H.front().rows();
  const auto& kt = simd::kernels();

  CRowMat Y = CRowMat::Zero(NR, C);
  for (int k = 0; k < topo.tasks(); ++k) {
    if (batches[k].normalized.rows() != D) throw std::invalid_argument("transmit: D differs across tasks");
    for (int i = 0; i < topo.devices(k); ++i) {
      const int dev = topo.flat(k, i);
      if (!sel[dev]) continue;
      const CVec& u = plan.u[dev];
      if (u.size() != channels.H[dev].cols()) throw std::invalid_argument("transmit: u has wrong length");
      const CVec x = channels.H[dev] * u;
      const CVec r = modulate(batches[k].normalized.col(i));
      for (Eigen::Index row = 0; row < NR; ++row) {
        kt.caxpy(x(row), r.data(), Y.row(row).data(), static_cast<std::size_t>(C));
      }
    }
  }
  if (noise && sigma2 > 0.0) {
    const double s = std::sqrt(sigma2);
    for (Eigen::Index row = 0; row < NR; ++row) {
      for (Eigen::Index c = 0; c < C; ++c) Y(row, c) += s * noise->cnormal();
    }
  }
  return Y;
}

CVec combine(const CRowMat& Y, const CVec& f, double zeta) {
  if (f.size() != Y.rows()) throw std::invalid_argument("combine: f has wrong length");
  const auto& kt = simd::kernels();
  CVec out = CVec::Zero(Y.cols());
  for (Eigen::Index row = 0; row < Y.rows(); ++row) {
    kt.caxpy(zeta * std::conj(f(row)), Y.row(row).data(), out.data(), static_cast<std::size_t>(Y.cols()));
  }
  return out;
}

RVec reconstruct(const CVec& rhat, const GradientBatch& batch, const RVec& Q,
                 const Selection& sel) {
  const Eigen::Index M = batch.mean.size();
  if (Q.size() != M || static_cast<Eigen::Index>(sel.size()) != M) {
    throw std::invalid_argument("reconstruct: Q/selection length mismatch");
  }
  double sumQ = 0.0;
  double gbar = 0.0;
  for (Eigen::Index i = 0; i < M; ++i) {
    if (!sel[static_cast<std::size_t>(i)]) continue;
    sumQ += Q(i);
    gbar += Q(i) * batch.mean(i);
  }
  if (!(sumQ > 0.0)) throw std::invalid_argument("reconstruct: empty selection");
  gbar /= sumQ;
  RVec g = demodulate(rhat) / sumQ;
  g.array() += gbar;
  return g;
}

double optimal_zeta(const MseCoefficients& coeffs, double v) {
  if (!(coeffs.b > 0.0) || !std::isfinite(coeffs.b)) {
    throw NumericalError("degenerate receive statistics");
  }
  return std::sqrt(v) * coeffs.a / (2.0 * coeffs.b);
}

namespace {

double zf_zeta_impl(int k, const Topology& topo, const std::vector<CMat>& H, const CVec& f,
                    const RVec& Q, const Selection& sel, double v, double P0,
                    std::vector<double>* norms) {
  double zeta2 = 0.0;
  for (int i = 0; i < topo.devices(k); ++i) {
    const int dev = topo.flat(k, i);
    double n = 0.0;
    if (sel[dev]) {
      n = (H[dev].adjoint() * f).norm();
      if (!(n > 0.0)) throw NumericalError("zero_forcing: selected device has f^H H = 0");
      zeta2 = std::max(zeta2, 2.0 * Q(dev) * Q(dev) * v / (P0 * n * n));
    }
    if (norms) norms->push_back(n);
  }
  return std::sqrt(zeta2);
}

}  // namespace

double zero_forcing_zeta(int k, const Topology& topo, const std::vector<CMat>& H, const CVec& f,
                         const RVec& Q, const Selection& sel, double v, double P0) {
  return zf_zeta_impl(k, topo, H, f, Q, sel, v, P0, nullptr);
}

double zero_forcing(int k, const Topology& topo, const std::vector<CMat>& H, const CVec& f,
                    const RVec& Q, const Selection& sel, double v, double P0, TransmitPlan& plan) {
  std::vector<double> norms;
  const double zeta = zf_zeta_impl(k, topo, H, f, Q, sel, v, P0, &norms);
  const double radius = std::sqrt(P0 / 2.0);
  for (int i = 0; i < topo.devices(k); ++i) {
    const int dev = topo.flat(k, i);
    const Eigen::Index NT = H[dev].cols();
    if (!sel[dev] || zeta == 0.0) {
      plan.u[dev] = CVec::Zero(NT);
      continue;
    }
    const CVec dir = H[dev].adjoint() * f / norms[i];
    double c = Q(dev) * std::sqrt(v) / (zeta * norms[i]);
    c = std::min(c, radius);  // the straggler lands on the boundary up to rounding
    plan.u[dev] = c * dir;
  }
  return zeta;
}

double max_power_fraction(const TransmitPlan& plan, double P0) {
  double m = 0.0;
  for (const auto& u : plan.u) m = std::max(m, 2.0 * u.squaredNorm() / P0);
  return m;
}

}  // namespace oafmtl
