// SPDX-License-Identifier: Apache-2.0
//
// Alternating optimization of (u, f, y) under the quadratic transform
//   G = sum_k [ -y_k a_k / sumQ_k + y_k^2 b_k ],
// whose minimum over y is -sum_k a_k^2 / (4 sumQ_k^2 b_k), i.e. E minus
// constants. A sweep visits tasks in index order: every selected device's u
// (ball-constrained QCQP), then f_k (regularized least squares, then unit
// normalization), then all of y. Refreshing all of y, not only y_k, is what
// keeps E nonincreasing from sweep to sweep.

#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "oafmtl/config.hpp"
#include "oafmtl/objective.hpp"
#include "oafmtl/rng.hpp"
#include "oafmtl/types.hpp"

namespace oafmtl {

struct TraceRow {
  int sweep = 0;
  int task = -1;     // -1 for the initial row
  std::string step;  // init | sweep
  double E = 0.0;
  double d_k = 0.0;
  double G = 0.0;    // transformed objective after the step
};

struct BeamformingState {
  std::vector<CVec> u;       // flat device order
  std::vector<CVec> f;       // per task, unit norm
  std::vector<double> y;     // per task
  std::vector<double> zeta;  // per task, filled by assign_optimal_zeta or zero forcing
  std::vector<TraceRow> trace;
  int sweeps = 0;
};

struct QcqpProblem {
  CMat A;  // Hermitian PSD
  CVec b;
  double radius2 = 0.0;
};

struct QcqpSolution {
  CVec u;
  double lambda = 0.0;
  double stationarity = 0.0;  // |(A + lambda I) u - b|
  double slackness = 0.0;     // |lambda (|u|^2 - radius2)|
  int iterations = 0;
  bool interior = false;
};

/// Per-run audit of the monotonicity and certificate properties.
struct AoAudit {
  double max_u_increase = 0.0;  // largest rise of G across a u-step
  double max_f_increase = 0.0;  // across an f-step, measured before normalization
  double max_y_increase = 0.0;
  double max_E_increase = 0.0;  // across full sweeps
  double max_stationarity = 0.0;  // residual / (|b| + 1)
  double max_slackness = 0.0;
  double max_power_excess = 0.0;  // max(0, 2|u|^2 - P0)
  long qcqp_solves = 0;
  std::vector<double> E_trace;  // E after init and after every sweep
};

/// y_k = a_k / (2 sumQ_k b_k); 0 when a_k = 0.
double update_y(const MseCoefficients& c);

/// -y a / sumQ + y^2 b, the task's share of G.
double transformed_term(const MseCoefficients& c, double y);
/// -a^2 / (4 sumQ^2 b), the task's share of G at the optimal y.
double ratio_objective(const MseCoefficients& c);

double transformed_objective(const Problem& p, const Selection& sel, const BeamformingState& s);

QcqpProblem build_device_qcqp(const Problem& p, const Selection& sel, const BeamformingState& s,
                              int dev);

/// Minimizes u^H A u - 2 Re(b^H u) over |u|^2 <= radius2. Throws
/// NumericalError when no certificate within tolerance is reached.
QcqpSolution solve_ball_qcqp(const QcqpProblem& prob);

struct PsQuadratic {
  CMat A;
  CVec b;
};

PsQuadratic build_ps_quadratic(const Problem& p, const Selection& sel, const BeamformingState& s,
                               int k);

/// normalize(A^{-1} b); `previous` is returned (normalized) when b = 0.
/// `unnormalized` receives A^{-1} b when non-null.
CVec solve_receive(const PsQuadratic& q, const CVec& previous, CVec* unnormalized = nullptr);

/// Principal eigenvector of sum_i H_i H_i^H over the selected devices of
/// task k, phase-fixed so its largest entry is real positive.
CVec principal_receive(const Problem& p, const Selection& sel, int k);

/// f_k principal, u matched filter at full power, y by update_y.
BeamformingState initial_state(const Problem& p, const Selection& sel, RngStream& rng);

BeamformingState ao_optimize(const Problem& p, const Selection& sel, const OptimizerConfig& cfg,
                             BeamformingState init, AoAudit* audit = nullptr);

/// Sets s.zeta[k] = sqrt(v_k) a_k / (2 b_k).
void assign_optimal_zeta(const Problem& p, const Selection& sel, const std::vector<double>& v,
                         BeamformingState& s);

/// Straggler-limited baseline: principal f_k, zero-forcing zeta and u.
BeamformingState zero_forcing_state(const Problem& p, const Selection& sel,
                                    const std::vector<double>& v);

/// Per-task MSE coefficients at a state.
std::vector<MseCoefficients> state_coefficients(const Problem& p, const Selection& sel,
                                                const BeamformingState& s);

/// CSV rows: round,strategy,sweep,task,step,E,d_k,G
void write_trace_rows(std::ostream& os, int round, const std::string& strategy,
                      const BeamformingState& s);

}  // namespace oafmtl
