// SPDX-License-Identifier: Apache-2.0

#include "oafmtl/gradstats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "oafmtl/report.hpp"
#include "oafmtl/simd/kernels.hpp"

namespace oafmtl {

GradientBatch normalize(const RMat& gradients, int task) {
  const Eigen::Index D = gradients.rows();
  const Eigen::Index M = gradients.cols();
  if (D < 2) throw std::invalid_argument("normalize: D >= 2 required");
  const auto& kt = simd::kernels();
  GradientBatch b;
  b.task = task;
  b.raw = gradients;
  b.normalized = RMat::Zero(D, M);
  b.mean = RVec::Zero(M);
  b.var = RVec::Zero(M);
  for (Eigen::Index i = 0; i < M; ++i) {
    const double* col = gradients.col(i).data();
    const double mean = kt.sum(col, static_cast<std::size_t>(D)) / static_cast<double>(D);
    const double var = kt.centered_sumsq(col, static_cast<std::size_t>(D), mean) / static_cast<double>(D);
    b.mean(i) = mean;
    b.var(i) = var;
    if (var > 0.0) {
      const double inv = 1.0 / std::sqrt(var);
      b.normalized.col(i) = (gradients.col(i).array() - mean) * inv;
    }
  }
  b.v_task = M > 0 ? b.var.mean() : 0.0;
  return b;
}

RMat raw_correlation(const GradientBatch& batch) {
  const Eigen::Index D = batch.normalized.rows();
  const Eigen::Index M = batch.normalized.cols();
  const auto& kt = simd::kernels();
  RMat rho(M, M);
  for (Eigen::Index i = 0; i < M; ++i) {
    for (Eigen::Index j = i; j < M; ++j) {
      const double s = kt.dot(batch.normalized.col(i).data(), batch.normalized.col(j).data(),
                              static_cast<std::size_t>(D));
      rho(i, j) = rho(j, i) = s / static_cast<double>(D);
    }
  }
  return rho;
}

RMat project_correlation(const RMat& rho) {
  Eigen::SelfAdjointEigenSolver<RMat> es(rho);
  if (es.info() != Eigen::Success) throw NumericalError("project_correlation: eigendecomposition failed");
  RVec lam = es.eigenvalues().cwiseMax(0.0);
  RMat out = es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().transpose();
  out = 0.5 * (out + out.transpose()).eval();
  const Eigen::Index M = out.rows();
  RVec d = out.diagonal();
  for (Eigen::Index i = 0; i < M; ++i) {
    for (Eigen::Index j = 0; j < M; ++j) {
      const double s = std::sqrt(d(i) * d(j));
      out(i, j) = s > 0.0 ? out(i, j) / s : (i == j ? 1.0 : 0.0);
    }
  }
  out.diagonal().setOnes();
  return out;
}

CorrelationModel estimate_correlation(const GradientBatch& batch) {
  CorrelationModel m;
  m.task = batch.task;
  m.mode = CorrelationMode::Empirical;
  m.rho = raw_correlation(batch);
  const Eigen::Index M = m.rho.rows();
  for (Eigen::Index i = 0; i < M; ++i) {
    m.rho(i, i) = 1.0;
    for (Eigen::Index j = 0; j < M; ++j) {
      m.rho(i, j) = std::clamp(m.rho(i, j), -1.0, 1.0);
    }
  }
  if (M > 0) {
    Eigen::SelfAdjointEigenSolver<RMat> es(m.rho, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -1e-10) m.rho = project_correlation(m.rho);
  }
  return m;
}

CorrelationModel uniform_correlation(double epsilon, int M, int task) {
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) {
    throw std::invalid_argument("uniform_correlation: epsilon must lie in [0, 1]");
  }
  if (M < 1) throw std::invalid_argument("uniform_correlation: M >= 1 required");
  CorrelationModel m;
  m.task = task;
  m.mode = CorrelationMode::Uniform;
  m.epsilon = epsilon;
  m.rho = RMat::Constant(M, M, epsilon);
  m.rho.diagonal().setOnes();
  return m;
}

RMat correlation_factor(const RMat& rho) {
  Eigen::SelfAdjointEigenSolver<RMat> es(rho);
  if (es.info() != Eigen::Success) throw NumericalError("correlation_factor: eigendecomposition failed");
  if (es.eigenvalues().size() > 0 && es.eigenvalues().minCoeff() < -1e-10) {
    throw NumericalError("correlation_factor: rho is not positive semidefinite");
  }
  // Rounding-level eigenvalues are zero; their square roots would not be.
  const double floor = es.eigenvalues().size() > 0 ? 1e-12 * std::max(1.0, es.eigenvalues().maxCoeff()) : 0.0;
  RVec s = es.eigenvalues().unaryExpr([floor](double x) { return x > floor ? std::sqrt(x) : 0.0; });
  return es.eigenvectors() * s.asDiagonal();
}

GradientBatch sample_correlated_gradients(const CorrelationModel& rho, int D, RngStream& rng) {
  const RMat L = correlation_factor(rho.rho);
  const Eigen::Index M = rho.rho.rows();
  RMat N(D, M);
  for (int d = 0; d < D; ++d) {
    for (Eigen::Index i = 0; i < M; ++i) N(d, i) = rng.normal();
  }
  GradientBatch b;
  b.task = rho.task;
  b.raw = N * L.transpose();
  b.normalized = b.raw;
  b.mean = RVec::Zero(M);
  b.var = RVec::Ones(M);
  b.v_task = 1.0;
  return b;
}

void write_rho_rows(std::ostream& os, int round, const std::string& strategy,
                    const CorrelationModel& model) {
  const std::string mode =
      model.mode == CorrelationMode::Empirical ? "empirical_oracle" : "uniform";
  for (Eigen::Index i = 0; i < model.rho.rows(); ++i) {
    for (Eigen::Index j = 0; j < model.rho.cols(); ++j) {
      os << round << ',' << strategy << ',' << model.task << ',' << i << ',' << j << ','
         << fmt_num(model.rho(i, j)) << ',' << mode << '\n';
    }
  }
}

}  // namespace oafmtl
