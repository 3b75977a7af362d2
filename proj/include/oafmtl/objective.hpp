// SPDX-License-Identifier: Apache-2.0
//
// Closed-form communication MSE and the per-task surrogate d_k.
//
// comm_mse keeps the factor C = D/2; d_k does not (it cancels there), so the
// two are not on the same scale.

#pragma once

#include <vector>

#include "oafmtl/airlink.hpp"
#include "oafmtl/types.hpp"

namespace oafmtl {

/// Everything the transceiver design reads for one round. Devices are in
/// flat order throughout.
struct Problem {
  Topology topo;
  std::vector<CMat> H;         // N_R x N_T per device
  std::vector<RMat> rho;       // per task, M_k x M_k
  RVec Q;                      // samples per device
  std::vector<double> Q_full;  // per task, Q_k over all devices
  double sigma2 = 0.0;
  double P0 = 1.0;
  int N_R = 1;
  int N_T = 1;
};

/// Sum of Q over the selected devices of task k.
double selected_Q(const Problem& p, const Selection& sel, int k);

struct MseCoefficients {
  int task = 0;
  double a = 0.0;       // sum_ij rho_ij (Q_i conj(h_j) + Q_j h_i), real part
  double a_imag = 0.0;  // residual imaginary part before truncation
  double b = 0.0;       // sum_l sum_ij rho^l_ij conj(h_li) h_lj + sigma2 |f|^2 / 2
  double c0 = 0.0;      // Q^T rho Q over the selected devices
  double sumQ = 0.0;
};

/// `h` is K x N with h(k, dev) = f_k^H H_dev u_dev. Throws NumericalError
/// when the imaginary residual of a or b exceeds 1e-9 relative.
MseCoefficients mse_coefficients(const std::vector<RMat>& rho, const CMat& h, const Topology& topo,
                                 const RVec& Q, const Selection& sel, double sigma2, int k,
                                 double f_norm2);
MseCoefficients mse_coefficients(const Problem& p, const Selection& sel, const CMat& h, int k,
                                 double f_norm2);

/// C / (sumQ)^2 * (2 v c0 - 2 zeta sqrt(v) a + 2 zeta^2 b)
double comm_mse(double zeta, const MseCoefficients& c, double v, int C);
/// 2 C v (c0 - a^2 / (4b)) / (sumQ)^2, clamped at 0.
double comm_mse_min(const MseCoefficients& c, double v, int C);

/// a^2 / (4b); zero when a == 0 and b == 0.
double ratio_term(const MseCoefficients& c);

/// (4 / Q_k^2)(Q_k - sumQ)^2 + (c0 - a^2/(4b)) / sumQ^2. Throws
/// std::invalid_argument on an empty selection.
double d_k(const MseCoefficients& c, double Q_full);

double objective_E(const std::vector<double>& d);

/// All-task d values for a (u, f) pair.
std::vector<double> task_objectives(const Problem& p, const Selection& sel,
                                    const std::vector<CVec>& u, const std::vector<CVec>& f);

/// Floor for exact recovery.
inline constexpr double kNmseFloorDb = -300.0;

/// 10 log10(|ghat - g|^2 / |g|^2), floored at kNmseFloorDb. Throws
/// std::invalid_argument when g == 0.
double nmse_db(const RVec& ghat, const RVec& g);

/// comm_mse(zeta) relative to the no-transmission level 2 C v c0 / sumQ^2, in
/// dB. At zeta* this is 10 log10(1 - a^2 / (4 b c0)).
double analytic_nmse_db(const MseCoefficients& c, double zeta, double v);

struct AnalysisConstants {
  double omega = 1.0;
  double mu = 1.0;
  double beta1 = 0.0;
  double beta2 = 0.0;
};

/// gap (1 - mu/omega) + (2 mu beta2 gap / omega + beta1 / omega) E.
/// Diagnostic only. Throws std::invalid_argument on invalid constants.
double convergence_bound(double prev_gap, double E, const AnalysisConstants& c);

}  // namespace oafmtl
