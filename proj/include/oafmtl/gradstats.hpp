// SPDX-License-Identifier: Apache-2.0
//
// Per-device gradient normalization, spatial correlation matrices and a
// sampler for correlated gradient ensembles.

#pragma once

#include <ostream>
#include <string>

#include "oafmtl/config.hpp"
#include "oafmtl/rng.hpp"
#include "oafmtl/types.hpp"

namespace oafmtl {

/// Columns are devices. `normalized` has zero mean and unit population
/// variance per column, or is all-zero where var == 0.
struct GradientBatch {
  int task = 0;
  RMat raw;         // D x M
  RMat normalized;  // D x M
  RVec mean;        // M
  RVec var;         // M, population variance (1/D)
  double v_task = 0.0;  // mean of var; the shared variance used by the MSE formulas
};

struct CorrelationModel {
  int task = 0;
  RMat rho;  // M x M, symmetric, unit diagonal, PSD
  CorrelationMode mode = CorrelationMode::Uniform;
  double epsilon = 0.0;
};

/// Throws std::invalid_argument when D < 2.
GradientBatch normalize(const RMat& gradients, int task = 0);

/// Raw estimate (1/D) G~^T G~ before any repair.
RMat raw_correlation(const GradientBatch& batch);

/// Raw estimate, diagonal forced to 1, eigenvalues clipped when the smallest
/// is below -1e-10.
CorrelationModel estimate_correlation(const GradientBatch& batch);

/// eps * 11^T + (1 - eps) * I. Throws std::invalid_argument outside [0, 1].
CorrelationModel uniform_correlation(double epsilon, int M, int task = 0);

/// Clip negative eigenvalues, re-symmetrize, rescale to unit diagonal.
RMat project_correlation(const RMat& rho);

/// D rows drawn i.i.d. from N(0, rho). The result is already in normalized
/// coordinates: mean 0 and var 1 are recorded per column, and v_task = 1.
/// Throws NumericalError when rho has an eigenvalue below -1e-10.
GradientBatch sample_correlated_gradients(const CorrelationModel& rho, int D, RngStream& rng);

/// Factor L with L L^T = rho, reused across many draws.
RMat correlation_factor(const RMat& rho);

/// CSV rows: round,strategy,k,i,j,value,mode
void write_rho_rows(std::ostream& os, int round, const std::string& strategy,
                    const CorrelationModel& model);

}  // namespace oafmtl
