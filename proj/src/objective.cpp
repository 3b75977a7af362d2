// SPDX-License-Identifier: Apache-2.0

#include "oafmtl/objective.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace oafmtl {

double selected_Q(const Problem& p, const Selection& sel, int k) {
  double s = 0.0;
  for (int i = 0; i < p.topo.devices(k); ++i) {
    const int dev = p.topo.flat(k, i);
    if (sel[dev]) s += p.Q(dev);
  }
  return s;
}

MseCoefficients mse_coefficients(const std::vector<RMat>& rho, const CMat& h, const Topology& topo,
                                 const RVec& Q, const Selection& sel, double sigma2, int k,
                                 double f_norm2) {
  MseCoefficients c;
  c.task = k;
  const int off = topo.offset(k);
  const int Mk = topo.devices(k);
  const RMat& rk = rho.at(k);

  // Imaginary residuals are judged against the magnitude of the summands,
  // since the sums themselves may cancel to near zero.
  cd a_sum(0.0, 0.0);
  double a_scale = 0.0;
  for (int i = 0; i < Mk; ++i) {
    if (!sel[off + i]) continue;
    c.sumQ += Q(off + i);
    for (int j = 0; j < Mk; ++j) {
      if (!sel[off + j]) continue;
      const double r = rk(i, j);
      const cd term = r * (Q(off + i) * std::conj(h(k, off + j)) + Q(off + j) * h(k, off + i));
      a_sum += term;
      a_scale += std::abs(term.real()) + std::abs(term.imag());
      c.c0 += r * Q(off + i) * Q(off + j);
    }
  }

  cd b_sum(0.0, 0.0);
  double b_scale = 0.0;
  for (int l = 0; l < topo.tasks(); ++l) {
    const int lo = topo.offset(l);
    const RMat& rl = rho.at(l);
    for (int i = 0; i < topo.devices(l); ++i) {
      if (!sel[lo + i]) continue;
      const cd hi = std::conj(h(k, lo + i));
      for (int j = 0; j < topo.devices(l); ++j) {
        if (!sel[lo + j]) continue;
        const cd term = rl(i, j) * hi * h(k, lo + j);
        b_sum += term;
        b_scale += std::abs(term.real()) + std::abs(term.imag());
      }
    }
  }

  if (std::abs(a_sum.imag()) > 1e-9 * a_scale + 1e-300) {
    throw NumericalError("mse_coefficients: a has a non-negligible imaginary part");
  }
  if (std::abs(b_sum.imag()) > 1e-9 * b_scale + 1e-300) {
    throw NumericalError("mse_coefficients: b has a non-negligible imaginary part");
  }
  c.a = a_sum.real();
  c.a_imag = a_sum.imag();
  c.b = b_sum.real() + sigma2 * f_norm2 / 2.0;
  return c;
}

MseCoefficients mse_coefficients(const Problem& p, const Selection& sel, const CMat& h, int k,
                                 double f_norm2) {
  return mse_coefficients(p.rho, h, p.topo, p.Q, sel, p.sigma2, k, f_norm2);
}

double comm_mse(double zeta, const MseCoefficients& c, double v, int C) {
  if (!(c.sumQ > 0.0)) throw std::invalid_argument("comm_mse: empty selection");
  const double q = 2.0 * v * c.c0 - 2.0 * zeta * std::sqrt(v) * c.a + 2.0 * zeta * zeta * c.b;
  return static_cast<double>(C) * q / (c.sumQ * c.sumQ);
}

double ratio_term(const MseCoefficients& c) {
  if (c.b > 0.0) return c.a * c.a / (4.0 * c.b);
  if (c.a == 0.0) return 0.0;
  throw NumericalError("ratio_term: b <= 0 with a != 0");
}

double comm_mse_min(const MseCoefficients& c, double v, int C) {
  if (!(c.sumQ > 0.0)) throw std::invalid_argument("comm_mse_min: empty selection");
  const double resid = std::max(0.0, c.c0 - ratio_term(c));
  return 2.0 * static_cast<double>(C) * v * resid / (c.sumQ * c.sumQ);
}

double d_k(const MseCoefficients& c, double Q_full) {
  if (!(c.sumQ > 0.0)) throw std::invalid_argument("d_k: empty selection");
  const double gap = Q_full - c.sumQ;
  const double first = 4.0 / (Q_full * Q_full) * gap * gap;
  const double second = (c.c0 - ratio_term(c)) / (c.sumQ * c.sumQ);
  return first + second;
}

double objective_E(const std::vector<double>& d) {
  double s = 0.0;
  for (double x : d) s += x;
  return s;
}

std::vector<double> task_objectives(const Problem& p, const Selection& sel,
                                    const std::vector<CVec>& u, const std::vector<CVec>& f) {
  const EffectiveChannels e = effective_channels(p.H, u, f);
  std::vector<double> d;
  d.reserve(f.size());
  for (int k = 0; k < p.topo.tasks(); ++k) {
    const auto c = mse_coefficients(p, sel, e.h, k, f[k].squaredNorm());
    d.push_back(d_k(c, p.Q_full[k]));
  }
  return d;
}

double nmse_db(const RVec& ghat, const RVec& g) {
  const double den = g.squaredNorm();
  if (!(den > 0.0)) throw std::invalid_argument("nmse_db: reference gradient is zero");
  const double num = (ghat - g).squaredNorm();
  if (num <= 0.0) return kNmseFloorDb;
  return std::max(kNmseFloorDb, 10.0 * std::log10(num / den));
}

double analytic_nmse_db(const MseCoefficients& c, double zeta, double v) {
  const double ref = 2.0 * v * c.c0;
  if (!(ref > 0.0)) throw std::invalid_argument("analytic_nmse_db: zero reference level");
  const double q = 2.0 * v * c.c0 - 2.0 * zeta * std::sqrt(v) * c.a + 2.0 * zeta * zeta * c.b;
  if (q <= 0.0) return kNmseFloorDb;
  return std::max(kNmseFloorDb, 10.0 * std::log10(q / ref));
}

double convergence_bound(double prev_gap, double E, const AnalysisConstants& c) {
  if (!(c.mu > 0.0) || !(c.omega >= c.mu) || c.beta1 < 0.0 || c.beta2 < 0.0) {
    throw std::invalid_argument("convergence_bound: require omega >= mu > 0 and beta1, beta2 >= 0");
  }
  return prev_gap * (1.0 - c.mu / c.omega) +
         (2.0 * c.mu * c.beta2 / c.omega * prev_gap + c.beta1 / c.omega) * E;
}

}  // namespace oafmtl
