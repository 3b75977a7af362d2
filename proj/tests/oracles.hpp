// SPDX-License-Identifier: Apache-2.0
//
// Independent reference computations for the tests. Everything here is a
// literal loop over the defining sums, written without the library's
// workspaces or Eigen expression products, so a shared mistake would have to
// be made twice in different shapes.

#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

#include "oafmtl/objective.hpp"
#include "oafmtl/optimizer.hpp"
#include "oafmtl/types.hpp"

namespace oracle {

using oafmtl::cd;
using oafmtl::CMat;
using oafmtl::CVec;
using oafmtl::Problem;
using oafmtl::RMat;
using oafmtl::RVec;
using oafmtl::Selection;

/// f^H H u by explicit loops.
inline cd fHu(const CVec& f, const CMat& H, const CVec& u) {
  cd acc(0.0, 0.0);
  for (Eigen::Index r = 0; r < H.rows(); ++r) {
    cd row(0.0, 0.0);
    for (Eigen::Index c = 0; c < H.cols(); ++c) row += H(r, c) * u(c);
    acc += std::conj(f(r)) * row;
  }
  return acc;
}

/// H u by explicit loops.
inline CVec Hu(const CMat& H, const CVec& u) {
  CVec out(H.rows());
  for (Eigen::Index r = 0; r < H.rows(); ++r) {
    cd row(0.0, 0.0);
    for (Eigen::Index c = 0; c < H.cols(); ++c) row += H(r, c) * u(c);
    out(r) = row;
  }
  return out;
}

/// H^H f by explicit loops.
inline CVec HHf(const CMat& H, const CVec& f) {
  CVec out(H.cols());
  for (Eigen::Index c = 0; c < H.cols(); ++c) {
    cd acc(0.0, 0.0);
    for (Eigen::Index r = 0; r < H.rows(); ++r) acc += std::conj(H(r, c)) * f(r);
    out(c) = acc;
  }
  return out;
}

struct Coeffs {
  cd a{0.0, 0.0};
  cd b{0.0, 0.0};
  double c0 = 0.0;
  double sumQ = 0.0;
};

/// a, b, c0 for task k straight from their definitions.
inline Coeffs coefficients(const Problem& p, const Selection& sel, const std::vector<CVec>& u,
                           const std::vector<CVec>& f, int k) {
  Coeffs c;
  const int off = p.topo.offset(k);
  for (int i = 0; i < p.topo.devices(k); ++i) {
    if (!sel[off + i]) continue;
    c.sumQ += p.Q(off + i);
    for (int j = 0; j < p.topo.devices(k); ++j) {
      if (!sel[off + j]) continue;
      const double r = p.rho[k](i, j);
      const cd hi = fHu(f[k], p.H[off + i], u[off + i]);
      const cd hj = fHu(f[k], p.H[off + j], u[off + j]);
      c.a += r * (p.Q(off + i) * std::conj(hj) + p.Q(off + j) * hi);
      c.c0 += r * p.Q(off + i) * p.Q(off + j);
    }
  }
  for (int l = 0; l < p.topo.tasks(); ++l) {
    const int lo = p.topo.offset(l);
    for (int i = 0; i < p.topo.devices(l); ++i) {
      if (!sel[lo + i]) continue;
      for (int j = 0; j < p.topo.devices(l); ++j) {
        if (!sel[lo + j]) continue;
        const cd hi = fHu(f[k], p.H[lo + i], u[lo + i]);
        const cd hj = fHu(f[k], p.H[lo + j], u[lo + j]);
        c.b += p.rho[l](i, j) * std::conj(hi) * hj;
      }
    }
  }
  double fn2 = 0.0;
  for (Eigen::Index r = 0; r < f[k].size(); ++r) fn2 += std::norm(f[k](r));
  c.b += p.sigma2 * fn2 / 2.0;
  return c;
}

/// C / sumQ^2 (2 v c0 - 2 zeta sqrt(v) a + 2 zeta^2 b)
inline double comm_mse(const Coeffs& c, double zeta, double v, int C) {
  return C / (c.sumQ * c.sumQ) *
         (2.0 * v * c.c0 - 2.0 * zeta * std::sqrt(v) * c.a.real() + 2.0 * zeta * zeta * c.b.real());
}

/// (4 / Q_k^2)(Q_k - sumQ)^2 + (c0 - a^2 / 4b) / sumQ^2
inline double d_k(const Coeffs& c, double Q_full) {
  const double sel = 4.0 / (Q_full * Q_full) * (Q_full - c.sumQ) * (Q_full - c.sumQ);
  const double a = c.a.real(), b = c.b.real();
  const double ratio = (a == 0.0 && b == 0.0) ? 0.0 : a * a / (4.0 * b);
  return sel + (c.c0 - ratio) / (c.sumQ * c.sumQ);
}

/// G = sum_k [-y_k a_k / sumQ_k + y_k^2 b_k]
inline double transformed(const Problem& p, const Selection& sel, const std::vector<CVec>& u,
                          const std::vector<CVec>& f, const std::vector<double>& y) {
  double G = 0.0;
  for (int k = 0; k < p.topo.tasks(); ++k) {
    const Coeffs c = coefficients(p, sel, u, f, k);
    G += -y[k] * c.a.real() / c.sumQ + y[k] * y[k] * c.b.real();
  }
  return G;
}

/// Per-device quadratic in u_dev, literal sums over tasks and partners.
inline oafmtl::QcqpProblem device_qcqp(const Problem& p, const Selection& sel,
                                       const oafmtl::BeamformingState& s, int dev) {
  const int k = p.topo.task_of(dev);
  const int off = p.topo.offset(k);
  const int i = dev - off;
  const int NT = static_cast<int>(p.H[dev].cols());
  oafmtl::QcqpProblem q;
  q.A = CMat::Zero(NT, NT);
  q.b = CVec::Zero(NT);
  q.radius2 = p.P0 / 2.0;
  double sumQ = 0.0, rhoQ = 0.0;
  for (int j = 0; j < p.topo.devices(k); ++j) {
    if (!sel[off + j]) continue;
    sumQ += p.Q(off + j);
    rhoQ += p.rho[k](i, j) * p.Q(off + j);
  }
  const CVec gk = HHf(p.H[dev], s.f[k]);
  for (int t = 0; t < NT; ++t) q.b(t) += s.y[k] * rhoQ / sumQ * gk(t);
  for (int l = 0; l < p.topo.tasks(); ++l) {
    const CVec gl = HHf(p.H[dev], s.f[l]);
    const double y2 = s.y[l] * s.y[l];
    for (int r = 0; r < NT; ++r) {
      for (int c = 0; c < NT; ++c) q.A(r, c) += y2 * p.rho[k](i, i) * gl(r) * std::conj(gl(c));
    }
    cd cross(0.0, 0.0);
    for (int j = 0; j < p.topo.devices(k); ++j) {
      if (j == i || !sel[off + j]) continue;
      cross += p.rho[k](i, j) * fHu(s.f[l], p.H[off + j], s.u[off + j]);
    }
    for (int t = 0; t < NT; ++t) q.b(t) -= y2 * cross * gl(t);
  }
  return q;
}

/// Receive quadratic for task k, literal double sums.
inline oafmtl::PsQuadratic ps_quadratic(const Problem& p, const Selection& sel,
                                        const oafmtl::BeamformingState& s, int k) {
  const int NR = p.N_R;
  oafmtl::PsQuadratic q;
  q.A = CMat::Zero(NR, NR);
  q.b = CVec::Zero(NR);
  const double yk = s.y[k];
  for (int l = 0; l < p.topo.tasks(); ++l) {
    const int lo = p.topo.offset(l);
    for (int i = 0; i < p.topo.devices(l); ++i) {
      if (!sel[lo + i]) continue;
      const CVec xi = Hu(p.H[lo + i], s.u[lo + i]);
      for (int j = 0; j < p.topo.devices(l); ++j) {
        if (!sel[lo + j]) continue;
        const CVec xj = Hu(p.H[lo + j], s.u[lo + j]);
        for (int r = 0; r < NR; ++r) {
          for (int c = 0; c < NR; ++c) q.A(r, c) += yk * yk * p.rho[l](i, j) * xi(r) * std::conj(xj(c));
        }
      }
    }
  }
  for (int r = 0; r < NR; ++r) q.A(r, r) += yk * yk * p.sigma2 / 2.0;
  const int off = p.topo.offset(k);
  double sumQ = 0.0;
  for (int i = 0; i < p.topo.devices(k); ++i) {
    if (sel[off + i]) sumQ += p.Q(off + i);
  }
  for (int i = 0; i < p.topo.devices(k); ++i) {
    if (!sel[off + i]) continue;
    const CVec xi = Hu(p.H[off + i], s.u[off + i]);
    for (int j = 0; j < p.topo.devices(k); ++j) {
      if (!sel[off + j]) continue;
      for (int r = 0; r < NR; ++r) q.b(r) += yk / sumQ * p.rho[k](i, j) * p.Q(off + j) * xi(r);
    }
  }
  return q;
}

/// u^H A u - 2 Re(b^H u)
inline double quad_value(const CMat& A, const CVec& b, const CVec& u) {
  cd q(0.0, 0.0), l(0.0, 0.0);
  for (Eigen::Index r = 0; r < A.rows(); ++r) {
    for (Eigen::Index c = 0; c < A.cols(); ++c) q += std::conj(u(r)) * A(r, c) * u(c);
    l += std::conj(b(r)) * u(r);
  }
  return q.real() - 2.0 * l.real();
}

inline long double dot(const double* x, const double* y, std::size_t n) {
  long double s = 0.0L;
  for (std::size_t i = 0; i < n; ++i) s += static_cast<long double>(x[i]) * y[i];
  return s;
}

inline long double sum(const double* x, std::size_t n) {
  long double s = 0.0L;
  for (std::size_t i = 0; i < n; ++i) s += x[i];
  return s;
}

/// Mean and population variance by two passes in long double.
inline void mean_var(const double* x, std::size_t n, long double& mean, long double& var) {
  mean = sum(x, n) / static_cast<long double>(n);
  long double s = 0.0L;
  for (std::size_t i = 0; i < n; ++i) s += (x[i] - mean) * (x[i] - mean);
  var = s / static_cast<long double>(n);
}

}  // namespace oracle
