// SPDX-License-Identifier: Apache-2.0

#include "oafmtl/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "oafmtl/report.hpp"

namespace oafmtl {

double update_y(const MseCoefficients& c) {
  if (c.a == 0.0) return 0.0;
  if (!(c.b > 0.0) || !(c.sumQ > 0.0)) throw NumericalError("update_y: b must be positive");
  return c.a / (2.0 * c.sumQ * c.b);
}

double transformed_term(const MseCoefficients& c, double y) {
  return -y * c.a / c.sumQ + y * y * c.b;
}

double ratio_objective(const MseCoefficients& c) {
  return -ratio_term(c) / (c.sumQ * c.sumQ);
}

namespace {

// Cached products for the sweep: g[l][d] = H_d^H f_l and h(l, d) = g[l][d]^H u_d.
struct Workspace {
  std::vector<std::vector<CVec>> g;
  CMat h;
};

Workspace make_workspace(const Problem& p, const BeamformingState& s) {
  const int K = p.topo.tasks();
  const int N = p.topo.total();
  Workspace w;
  w.g.assign(static_cast<std::size_t>(K), std::vector<CVec>(static_cast<std::size_t>(N)));
  w.h = CMat::Zero(K, N);
  for (int l = 0; l < K; ++l) {
    for (int d = 0; d < N; ++d) {
      w.g[l][d] = p.H[d].adjoint() * s.f[l];
      w.h(l, d) = w.g[l][d].dot(s.u[d]);
    }
  }
  return w;
}

void refresh_device(const Problem& p, const BeamformingState& s, Workspace& w, int dev) {
  for (int l = 0; l < p.topo.tasks(); ++l) w.h(l, dev) = w.g[l][dev].dot(s.u[dev]);
}

void refresh_task(const Problem& p, const BeamformingState& s, Workspace& w, int k) {
  for (int d = 0; d < p.topo.total(); ++d) {
    w.g[k][d] = p.H[d].adjoint() * s.f[k];
    w.h(k, d) = w.g[k][d].dot(s.u[d]);
  }
}

std::vector<MseCoefficients> coefficients(const Problem& p, const Selection& sel,
                                          const BeamformingState& s, const Workspace& w) {
  std::vector<MseCoefficients> c;
  c.reserve(s.f.size());
  for (int k = 0; k < p.topo.tasks(); ++k) {
    c.push_back(mse_coefficients(p, sel, w.h, k, s.f[k].squaredNorm()));
  }
  return c;
}

double G_of(const std::vector<MseCoefficients>& c, const std::vector<double>& y) {
  double g = 0.0;
  for (std::size_t k = 0; k < c.size(); ++k) g += transformed_term(c[k], y[k]);
  return g;
}

double E_of(const Problem& p, const std::vector<MseCoefficients>& c, std::vector<double>* d) {
  double e = 0.0;
  if (d) d->clear();
  for (std::size_t k = 0; k < c.size(); ++k) {
    const double dk = d_k(c[k], p.Q_full[k]);
    if (d) d->push_back(dk);
    e += dk;
  }
  return e;
}

void refresh_y(const std::vector<MseCoefficients>& c, BeamformingState& s) {
  for (std::size_t k = 0; k < c.size(); ++k) s.y[k] = update_y(c[k]);
}

QcqpProblem device_qcqp(const Problem& p, const Selection& sel, const BeamformingState& s,
                        const Workspace& w, int dev) {
  const int k = p.topo.task_of(dev);
  const int off = p.topo.offset(k);
  const int i = dev - off;
  const RMat& rk = p.rho[k];
  const int NT = static_cast<int>(p.H[dev].cols());

  QcqpProblem q;
  q.A = CMat::Zero(NT, NT);
  q.b = CVec::Zero(NT);
  q.radius2 = p.P0 / 2.0;

  double sumQ = 0.0;
  double rhoQ = 0.0;
  for (int j = 0; j < p.topo.devices(k); ++j) {
    if (!sel[off + j]) continue;
    sumQ += p.Q(off + j);
    rhoQ += rk(i, j) * p.Q(off + j);
  }
  q.b += (s.y[k] * rhoQ / sumQ) * w.g[k][dev];

  for (int l = 0; l < p.topo.tasks(); ++l) {
    const double y2 = s.y[l] * s.y[l];
    const CVec& gl = w.g[l][dev];
    q.A.noalias() += (y2 * rk(i, i)) * gl * gl.adjoint();
    cd cross(0.0, 0.0);
    for (int j = 0; j < p.topo.devices(k); ++j) {
      if (j == i || !sel[off + j]) continue;
      cross += rk(i, j) * w.h(l, off + j);
    }
    q.b -= (y2 * cross) * gl;
  }
  q.A = 0.5 * (q.A + q.A.adjoint()).eval();
  return q;
}

PsQuadratic ps_quadratic(const Problem& p, const Selection& sel, const BeamformingState& s,
                         int k) {
  const int NR = p.N_R;
  PsQuadratic q;
  CMat R = CMat::Zero(NR, NR);
  for (int l = 0; l < p.topo.tasks(); ++l) {
    const int lo = p.topo.offset(l);
    const int Ml = p.topo.devices(l);
    CMat X = CMat::Zero(NR, Ml);
    for (int i = 0; i < Ml; ++i) {
      if (sel[lo + i]) X.col(i) = p.H[lo + i] * s.u[lo + i];
    }
    R.noalias() += X * p.rho[l].cast<cd>() * X.adjoint();
  }
  const double yk = s.y[k];
  q.A = (yk * yk) * R;
  q.A.diagonal().array() += yk * yk * p.sigma2 / 2.0;
  q.A = 0.5 * (q.A + q.A.adjoint()).eval();

  const int off = p.topo.offset(k);
  const int Mk = p.topo.devices(k);
  double sumQ = 0.0;
  RVec Qsel = RVec::Zero(Mk);
  CMat Xk = CMat::Zero(NR, Mk);
  for (int i = 0; i < Mk; ++i) {
    if (!sel[off + i]) continue;
    sumQ += p.Q(off + i);
    Qsel(i) = p.Q(off + i);
    Xk.col(i) = p.H[off + i] * s.u[off + i];
  }
  const RVec w = p.rho[k] * Qsel;
  q.b = (yk / sumQ) * (Xk * w.cast<cd>());
  if (p.sigma2 == 0.0) {
    // Without noise the Gram part may be singular; a tiny ridge scaled to the
    // matrix keeps the solve well posed.
    const double tr = q.A.trace().real();
    if (tr > 0.0) q.A.diagonal().array() += 1e-15 * tr / static_cast<double>(NR);
  }
  return q;
}

CVec fix_phase(CVec v) {
  Eigen::Index idx = 0;
  v.cwiseAbs().maxCoeff(&idx);
  const double m = std::abs(v(idx));
  if (m > 0.0) v *= std::conj(v(idx)) / m;
  return v;
}

}  // namespace

QcqpProblem build_device_qcqp(const Problem& p, const Selection& sel, const BeamformingState& s,
                              int dev) {
  if (!sel.at(static_cast<std::size_t>(dev))) {
    throw std::invalid_argument("build_device_qcqp: device is not selected");
  }
  return device_qcqp(p, sel, s, make_workspace(p, s), dev);
}

PsQuadratic build_ps_quadratic(const Problem& p, const Selection& sel, const BeamformingState& s,
                               int k) {
  return ps_quadratic(p, sel, s, k);
}

QcqpSolution solve_ball_qcqp(const QcqpProblem& prob) {
  const Eigen::Index n = prob.b.size();
  if (prob.A.rows() != n || prob.A.cols() != n) throw std::invalid_argument("solve_ball_qcqp: shape mismatch");
  if (!(prob.radius2 > 0.0)) throw std::invalid_argument("solve_ball_qcqp: radius2 must be positive");
  if ((prob.A - prob.A.adjoint()).norm() > 1e-12 * (prob.A.norm() + 1e-300) + 1e-300) {
    throw std::invalid_argument("solve_ball_qcqp: A is not Hermitian");
  }

  QcqpSolution sol;
  const double bnorm = prob.b.norm();
  if (bnorm == 0.0) {
    sol.u = CVec::Zero(n);
    sol.interior = true;
    return sol;
  }

  const CMat A = 0.5 * (prob.A + prob.A.adjoint());
  Eigen::SelfAdjointEigenSolver<CMat> es(A);
  if (es.info() != Eigen::Success) throw NumericalError("solve_ball_qcqp: eigendecomposition failed");
  RVec lam = es.eigenvalues();
  const CMat& V = es.eigenvectors();
  const double lmax = std::max(std::abs(lam.maxCoeff()), std::abs(lam.minCoeff()));
  if (lam.minCoeff() < -1e-10 * std::max(lmax, 1.0)) {
    throw NumericalError("solve_ball_qcqp: A is not positive semidefinite");
  }
  lam = lam.cwiseMax(0.0);
  const double zero_tol = 1e-12 * lmax;
  const CVec beta = V.adjoint() * prob.b;
  const RVec beta2 = beta.cwiseAbs2();
  const double r2 = prob.radius2;

  // Minimum-norm unconstrained minimizer, valid when b has no null-space part.
  bool in_range = true;
  double norm2 = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (lam(i) <= zero_tol) {
      if (std::sqrt(beta2(i)) > 1e-12 * bnorm) in_range = false;
    } else {
      norm2 += beta2(i) / (lam(i) * lam(i));
    }
  }

  auto solution_norm2 = [&](double l) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double d = lam(i) + l;
      if (d > 0.0) s += beta2(i) / (d * d);
    }
    return s;
  };
  auto build = [&](double l) {
    CVec c(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double d = lam(i) + l;
      c(i) = (d > zero_tol || l > 0.0) && d > 0.0 ? beta(i) / d : cd(0.0, 0.0);
    }
    return CVec(V * c);
  };

  double l_final = 0.0;
  if (in_range && norm2 <= r2) {
    sol.u = build(0.0);
    sol.interior = true;
  } else {
    // Secular equation |x(l)|^2 = r2 is monotone decreasing in l > 0.
    // Newton on 1/|x(l)| - 1/r, safeguarded by bisection on [lo, hi].
    double lo = 0.0;
    double hi = bnorm / std::sqrt(r2);
    double l = 0.5 * hi;
    const double inv_r = 1.0 / std::sqrt(r2);
    int it = 0;
    for (; it < 200; ++it) {
      const double s = solution_norm2(l);
      const double gap = s - r2;
      if (std::abs(gap) <= 1e-13 * r2) break;
      if (gap > 0.0) lo = l; else hi = l;
      double ds = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        const double d = lam(i) + l;
        if (d > 0.0) ds -= 2.0 * beta2(i) / (d * d * d);
      }
      double next = 0.5 * (lo + hi);
      if (s > 0.0 && ds < 0.0) {
        const double psi = 1.0 / std::sqrt(s) - inv_r;
        const double dpsi = -0.5 * std::pow(s, -1.5) * ds;
        const double cand = l - psi / dpsi;
        if (cand > lo && cand < hi) next = cand;
      }
      if (hi - lo <= 1e-15 * std::max(hi, 1e-300)) {
        l = hi;
        break;
      }
      l = next;
    }
    sol.iterations = it;
    l_final = l;
    sol.u = build(l);
    const double un = sol.u.norm();
    if (un > 0.0) sol.u *= std::sqrt(r2) / un;  // land exactly on the sphere
  }

  sol.lambda = l_final;
  sol.stationarity = ((A * sol.u) + l_final * sol.u - prob.b).norm();
  sol.slackness = std::abs(l_final * (sol.u.squaredNorm() - r2));
  if (!sol.interior && sol.u.squaredNorm() > r2 * (1.0 + 1e-12)) {
    throw NumericalError("solve_ball_qcqp: infeasible iterate");
  }
  if (sol.stationarity > 1e-8 * (bnorm + 1.0) || sol.slackness > 1e-8) {
    std::ostringstream os;
    os << "solve_ball_qcqp: no KKT certificate (stationarity=" << sol.stationarity
       << ", slackness=" << sol.slackness << ", lambda=" << l_final << ", iterations="
       << sol.iterations << ")";
    throw NumericalError(os.str());
  }
  return sol;
}

CVec solve_receive(const PsQuadratic& q, const CVec& previous, CVec* unnormalized) {
  if (q.b.norm() == 0.0) {
    const double n = previous.norm();
    CVec f = n > 0.0 ? CVec(previous / n) : previous;
    if (unnormalized) *unnormalized = f;
    return f;
  }
  CVec x;
  Eigen::LLT<CMat> llt(q.A);
  if (llt.info() == Eigen::Success) {
    x = llt.solve(q.b);
  } else {
    // Singular A: least-squares solution on the range.
    Eigen::SelfAdjointEigenSolver<CMat> es(q.A);
    const RVec& lam = es.eigenvalues();
    const double tol = 1e-12 * std::max(std::abs(lam.maxCoeff()), 1e-300);
    CVec c = es.eigenvectors().adjoint() * q.b;
    for (Eigen::Index i = 0; i < c.size(); ++i) c(i) = lam(i) > tol ? c(i) / lam(i) : cd(0.0, 0.0);
    x = es.eigenvectors() * c;
  }
  if (unnormalized) *unnormalized = x;
  const double n = x.norm();
  if (!(n > 0.0) || !std::isfinite(n)) {
    const double pn = previous.norm();
    return pn > 0.0 ? CVec(previous / pn) : previous;
  }
  return x / n;
}

CVec principal_receive(const Problem& p, const Selection& sel, int k) {
  CMat S = CMat::Zero(p.N_R, p.N_R);
  for (int i = 0; i < p.topo.devices(k); ++i) {
    const int dev = p.topo.flat(k, i);
    if (sel[dev]) S.noalias() += p.H[dev] * p.H[dev].adjoint();
  }
  if (S.norm() == 0.0) return CVec::Unit(p.N_R, 0);
  Eigen::SelfAdjointEigenSolver<CMat> es(S);
  if (es.info() != Eigen::Success) throw NumericalError("principal_receive: eigendecomposition failed");
  CVec f = es.eigenvectors().col(p.N_R - 1);
  return fix_phase(f / f.norm());
}

std::vector<MseCoefficients> state_coefficients(const Problem& p, const Selection& sel,
                                                const BeamformingState& s) {
  return coefficients(p, sel, s, make_workspace(p, s));
}

double transformed_objective(const Problem& p, const Selection& sel, const BeamformingState& s) {
  return G_of(state_coefficients(p, sel, s), s.y);
}

BeamformingState initial_state(const Problem& p, const Selection& sel, RngStream& rng) {
  const int K = p.topo.tasks();
  BeamformingState s;
  s.f.resize(static_cast<std::size_t>(K));
  s.y.assign(static_cast<std::size_t>(K), 0.0);
  s.zeta.assign(static_cast<std::size_t>(K), 0.0);
  s.u.resize(static_cast<std::size_t>(p.topo.total()));
  const double amp = std::sqrt(p.P0 / 2.0);
  for (int k = 0; k < K; ++k) s.f[k] = principal_receive(p, sel, k);
  for (int d = 0; d < p.topo.total(); ++d) {
    const int NT = static_cast<int>(p.H[d].cols());
    if (!sel[d]) {
      s.u[d] = CVec::Zero(NT);
      continue;
    }
    CVec dir = p.H[d].adjoint() * s.f[p.topo.task_of(d)];
    double n = dir.norm();
    if (!(n > 0.0)) {
      for (int t = 0; t < NT; ++t) dir(t) = rng.cnormal();
      n = dir.norm();
    }
    s.u[d] = amp * dir / n;
  }
  refresh_y(state_coefficients(p, sel, s), s);
  return s;
}

BeamformingState ao_optimize(const Problem& p, const Selection& sel, const OptimizerConfig& cfg,
                             BeamformingState s, AoAudit* audit) {
  const int K = p.topo.tasks();
  for (int k = 0; k < K; ++k) {
    if (selected_Q(p, sel, k) <= 0.0) throw std::invalid_argument("ao_optimize: task with no selected device");
  }
  for (int d = 0; d < p.topo.total(); ++d) {
    if (!sel[d]) s.u[d].setZero();
  }
  s.trace.clear();
  s.sweeps = 0;
  if (s.zeta.size() != static_cast<std::size_t>(K)) s.zeta.assign(static_cast<std::size_t>(K), 0.0);

  Workspace w = make_workspace(p, s);
  std::vector<MseCoefficients> c = coefficients(p, sel, s, w);
  std::vector<double> d;
  double E = E_of(p, c, &d);
  s.trace.push_back({0, -1, "init", E, 0.0, G_of(c, s.y)});
  if (audit) audit->E_trace.push_back(E);

  auto power_check = [&](const CVec& u) {
    if (audit) audit->max_power_excess = std::max(audit->max_power_excess, 2.0 * u.squaredNorm() - p.P0);
  };

  for (int sweep = 1; sweep <= cfg.I_max; ++sweep) {
    const double E_prev = E;
    for (int k = 0; k < K; ++k) {
      for (int i = 0; i < p.topo.devices(k); ++i) {
        const int dev = p.topo.flat(k, i);
        if (!sel[dev]) continue;
        const double G0 = audit ? G_of(c, s.y) : 0.0;
        const QcqpProblem q = device_qcqp(p, sel, s, w, dev);
        const QcqpSolution sol = solve_ball_qcqp(q);
        s.u[dev] = sol.u;
        refresh_device(p, s, w, dev);
        if (audit || cfg.refresh_y_per_device) c = coefficients(p, sel, s, w);
        if (audit) {
          audit->qcqp_solves++;
          audit->max_stationarity = std::max(audit->max_stationarity, sol.stationarity / (q.b.norm() + 1.0));
          audit->max_slackness = std::max(audit->max_slackness, sol.slackness);
          audit->max_u_increase = std::max(audit->max_u_increase, G_of(c, s.y) - G0);
          power_check(s.u[dev]);
        }
        if (cfg.refresh_y_per_device) refresh_y(c, s);
      }

      const double G0 = audit ? G_of(c, s.y) : 0.0;
      const PsQuadratic q = ps_quadratic(p, sel, s, k);
      CVec raw;
      const CVec fk = solve_receive(q, s.f[k], &raw);
      if (audit) {
        s.f[k] = raw;
        refresh_task(p, s, w, k);
        audit->max_f_increase = std::max(audit->max_f_increase, G_of(coefficients(p, sel, s, w), s.y) - G0);
      }
      s.f[k] = fk;
      refresh_task(p, s, w, k);
      c = coefficients(p, sel, s, w);

      const double G1 = G_of(c, s.y);
      refresh_y(c, s);
      const double G2 = G_of(c, s.y);
      if (audit) audit->max_y_increase = std::max(audit->max_y_increase, G2 - G1);

      E = E_of(p, c, &d);
      s.trace.push_back({sweep, k, "sweep", E, d[k], G2});
    }
    s.sweeps = sweep;
    if (audit) {
      audit->E_trace.push_back(E);
      audit->max_E_increase = std::max(audit->max_E_increase, E - E_prev);
    }
    const double scale = std::max(std::abs(E_prev), std::numeric_limits<double>::min());
    if ((E_prev - E) < cfg.rel_tol * scale) break;
  }
  return s;
}

void assign_optimal_zeta(const Problem& p, const Selection& sel, const std::vector<double>& v,
                         BeamformingState& s) {
  const auto c = state_coefficients(p, sel, s);
  s.zeta.resize(c.size());
  for (std::size_t k = 0; k < c.size(); ++k) {
    s.zeta[k] = (c[k].a == 0.0) ? 0.0 : optimal_zeta(c[k], v[k]);
  }
}

BeamformingState zero_forcing_state(const Problem& p, const Selection& sel,
                                    const std::vector<double>& v) {
  const int K = p.topo.tasks();
  BeamformingState s;
  s.f.resize(static_cast<std::size_t>(K));
  s.y.assign(static_cast<std::size_t>(K), 0.0);
  s.zeta.assign(static_cast<std::size_t>(K), 0.0);
  TransmitPlan plan;
  plan.u.resize(static_cast<std::size_t>(p.topo.total()));
  for (int d = 0; d < p.topo.total(); ++d) plan.u[d] = CVec::Zero(p.H[d].cols());
  for (int k = 0; k < K; ++k) {
    s.f[k] = principal_receive(p, sel, k);
    s.zeta[k] = zero_forcing(k, p.topo, p.H, s.f[k], p.Q, sel, v[k], p.P0, plan);
  }
  s.u = std::move(plan.u);
  return s;
}

void write_trace_rows(std::ostream& os, int round, const std::string& strategy,
                      const BeamformingState& s) {
  for (const auto& r : s.trace) {
    os << round << ',' << strategy << ',' << r.sweep << ',' << r.task << ',' << r.step << ','
       << fmt_num(r.E) << ',' << fmt_num(r.d_k) << ',' << fmt_num(r.G) << '\n';
  }
}

}  // namespace oafmtl
