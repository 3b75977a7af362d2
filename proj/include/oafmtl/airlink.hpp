// SPDX-License-Identifier: Apache-2.0
//
// Over-the-air aggregation: modulation, the MIMO MAC superposition with
// AWGN, per-task combining and gradient reconstruction, plus the weighting
// factors of the optimal and the zero-forcing receiver.
//
// Wire format: the first half of a normalized gradient rides on the real
// part, the second half on the imaginary part.

#pragma once

#include <vector>

#include "oafmtl/channel.hpp"
#include "oafmtl/gradstats.hpp"
#include "oafmtl/rng.hpp"
#include "oafmtl/types.hpp"

namespace oafmtl {

struct MseCoefficients;

/// Flat device order; unselected devices carry a zero vector.
struct TransmitPlan {
  std::vector<CVec> u;
};

struct ReceivePlan {
  std::vector<CVec> f;       // unit norm
  std::vector<double> zeta;  // real
};

/// h(k, dev) = f_k^H H_dev u_dev, K x (total devices).
struct EffectiveChannels {
  CMat h;
};

EffectiveChannels effective_channels(const std::vector<CMat>& H, const std::vector<CVec>& u,
                                     const std::vector<CVec>& f);

/// Throws std::invalid_argument for odd length.
CVec modulate(const RVec& g);
RVec demodulate(const CVec& r);

/// Y = sum over selected devices of (H u) r^T plus CN(0, sigma2) noise when
/// `noise` is non-null. `batches[k]` holds task k's normalized gradients.
CRowMat transmit(const ChannelSet& channels, const TransmitPlan& plan,
                 const std::vector<GradientBatch>& batches, const Topology& topo,
                 const Selection& sel, double sigma2, RngStream* noise);

/// zeta * (f^H Y)^T
CVec combine(const CRowMat& Y, const CVec& f, double zeta);

/// [Re r; Im r] / sum(Q_sel) + Q-weighted mean of the device means.
/// `Q` and `sel` are task-local (length M_k). Throws std::invalid_argument
/// when nothing is selected.
RVec reconstruct(const CVec& rhat, const GradientBatch& batch, const RVec& Q,
                 const Selection& sel);

/// sqrt(v) * a / (2 b). Throws NumericalError("degenerate receive
/// statistics") when b is not positive.
double optimal_zeta(const MseCoefficients& coeffs, double v);

/// Zeta and per-device scalings that force zeta * f^H H_i u_i = Q_i sqrt(v)
/// for every selected device of task k. zeta^2 = max_i 2 Q_i^2 v /
/// (P0 |f^H H_i|^2), which puts the weakest device exactly at 2|u|^2 = P0.
/// Writes u for task k's devices into `plan`. Throws NumericalError when a
/// selected device has f^H H_i = 0.
double zero_forcing(int k, const Topology& topo, const std::vector<CMat>& H, const CVec& f,
                    const RVec& Q, const Selection& sel, double v, double P0, TransmitPlan& plan);

/// The zeta of zero_forcing() without building a plan.
double zero_forcing_zeta(int k, const Topology& topo, const std::vector<CMat>& H, const CVec& f,
                         const RVec& Q, const Selection& sel, double v, double P0);

/// Largest 2|u|^2 / P0 over the plan.
double max_power_fraction(const TransmitPlan& plan, double P0);

}  // namespace oafmtl
