// SPDX-License-Identifier: Apache-2.0

#include "oafmtl/fltrain.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "oafmtl/airlink.hpp"
#include "oafmtl/objective.hpp"
#include "oafmtl/parallel.hpp"
#include "oafmtl/selection.hpp"
#include "oafmtl/simd/kernels.hpp"

namespace oafmtl {

LogisticModel logistic_model(const SystemConfig& cfg) {
  LogisticModel m;
  m.classes = cfg.learning.classes;
  m.features = cfg.learning.feature_dim + 1;
  m.D = cfg.model_dim();
  m.lambda = cfg.learning.lambda;
  return m;
}

namespace {

void fill_sample(RowMat& X, int row, const RMat& centroids, int label, RngStream& rng) {
  const int p = static_cast<int>(centroids.cols());
  for (int j = 0; j < p; ++j) X(row, j) = centroids(label, j) + rng.normal();
  X(row, p) = 1.0;
}

LocalDataset make_dataset(const RMat& centroids, const std::vector<int>& labels, RngStream& rng) {
  LocalDataset ds;
  ds.labels = labels;
  ds.X.resize(static_cast<Eigen::Index>(labels.size()), centroids.cols() + 1);
  for (std::size_t n = 0; n < labels.size(); ++n) {
    fill_sample(ds.X, static_cast<int>(n), centroids, labels[n], rng);
  }
  return ds;
}

void shuffle(std::vector<int>& v, RngStream& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    const std::size_t j = rng.below(i);
    std::swap(v[i - 1], v[j]);
  }
}

// Softmax probabilities of one sample into `prob`; returns the log-partition.
double softmax_row(const RVec& w, const double* x, const LogisticModel& m, double* prob) {
  const auto& kt = simd::kernels();
  double zmax = -std::numeric_limits<double>::infinity();
  for (int c = 0; c < m.classes; ++c) {
    prob[c] = kt.dot(w.data() + static_cast<std::ptrdiff_t>(c) * m.features, x,
                     static_cast<std::size_t>(m.features));
    zmax = std::max(zmax, prob[c]);
  }
  double z = 0.0;
  for (int c = 0; c < m.classes; ++c) {
    prob[c] = std::exp(prob[c] - zmax);
    z += prob[c];
  }
  for (int c = 0; c < m.classes; ++c) prob[c] /= z;
  return zmax + std::log(z);
}

}  // namespace

std::vector<TaskData> synth_tasks(const SystemConfig& cfg, RngStream& rng) {
  const auto& L = cfg.learning;
  std::vector<TaskData> tasks;
  tasks.reserve(static_cast<std::size_t>(cfg.K));
  for (int k = 0; k < cfg.K; ++k) {
    RMat centroids(L.classes, L.feature_dim);
    for (int c = 0; c < L.classes; ++c) {
      for (int j = 0; j < L.feature_dim; ++j) centroids(c, j) = L.class_sep * rng.normal();
    }
    TaskData td;
    const int Mk = cfg.M[k];
    const int q = L.samples_per_device;
    if (L.partition == Partition::Iid) {
      std::vector<int> pool(static_cast<std::size_t>(Mk) * q);
      for (std::size_t n = 0; n < pool.size(); ++n) pool[n] = static_cast<int>(n % L.classes);
      shuffle(pool, rng);
      for (int i = 0; i < Mk; ++i) {
        std::vector<int> labels(pool.begin() + static_cast<std::ptrdiff_t>(i) * q,
                                pool.begin() + static_cast<std::ptrdiff_t>(i + 1) * q);
        td.devices.push_back(make_dataset(centroids, labels, rng));
      }
    } else {
      for (int i = 0; i < Mk; ++i) {
        std::vector<int> classes(static_cast<std::size_t>(L.classes));
        std::iota(classes.begin(), classes.end(), 0);
        shuffle(classes, rng);
        classes.resize(static_cast<std::size_t>(L.classes_per_device));
        std::vector<int> labels(static_cast<std::size_t>(q));
        for (int n = 0; n < q; ++n) labels[n] = classes[static_cast<std::size_t>(n) % classes.size()];
        shuffle(labels, rng);
        td.devices.push_back(make_dataset(centroids, labels, rng));
      }
    }
    std::vector<int> test(static_cast<std::size_t>(L.test_samples));
    for (std::size_t n = 0; n < test.size(); ++n) test[n] = static_cast<int>(n % L.classes);
    td.test = make_dataset(centroids, test, rng);
    tasks.push_back(std::move(td));
  }
  return tasks;
}

double local_loss(const RVec& w, const LocalDataset& ds, const LogisticModel& m) {
  std::vector<double> prob(static_cast<std::size_t>(m.classes));
  double s = 0.0;
  for (int n = 0; n < ds.size(); ++n) {
    const double* x = ds.X.row(n).data();
    const double lse = softmax_row(w, x, m, prob.data());
    const double zy = simd::kernels().dot(w.data() + static_cast<std::ptrdiff_t>(ds.labels[n]) * m.features, x,
                                          static_cast<std::size_t>(m.features));
    s += lse - zy;
  }
  const double n = std::max(ds.size(), 1);
  return s / n + 0.5 * m.lambda * w.squaredNorm();
}

RVec local_gradient(const RVec& w, const LocalDataset& ds, const LogisticModel& m) {
  if (w.size() != m.D) throw std::invalid_argument("local_gradient: model has wrong length");
  const auto& kt = simd::kernels();
  RVec g = RVec::Zero(m.D);
  std::vector<double> prob(static_cast<std::size_t>(m.classes));
  for (int n = 0; n < ds.size(); ++n) {
    const double* x = ds.X.row(n).data();
    softmax_row(w, x, m, prob.data());
    prob[static_cast<std::size_t>(ds.labels[n])] -= 1.0;
    for (int c = 0; c < m.classes; ++c) {
      kt.axpy(prob[c], x, g.data() + static_cast<std::ptrdiff_t>(c) * m.features,
              static_cast<std::size_t>(m.features));
    }
  }
  if (ds.size() > 0) g /= static_cast<double>(ds.size());
  g += m.lambda * w;
  return g;
}

double accuracy(const RVec& w, const LocalDataset& ds, const LogisticModel& m) {
  if (ds.size() == 0) return 0.0;
  const auto& kt = simd::kernels();
  int hit = 0;
  for (int n = 0; n < ds.size(); ++n) {
    const double* x = ds.X.row(n).data();
    int best = 0;
    double bz = -std::numeric_limits<double>::infinity();
    for (int c = 0; c < m.classes; ++c) {
      const double z = kt.dot(w.data() + static_cast<std::ptrdiff_t>(c) * m.features, x,
                              static_cast<std::size_t>(m.features));
      if (z > bz) {
        bz = z;
        best = c;
      }
    }
    hit += best == ds.labels[n];
  }
  return static_cast<double>(hit) / ds.size();
}

RVec ideal_aggregate(const RMat& grads, const RVec& Q, const Selection& sel) {
  if (grads.cols() != Q.size() || static_cast<Eigen::Index>(sel.size()) != Q.size()) {
    throw std::invalid_argument("ideal_aggregate: size mismatch");
  }
  RVec g = RVec::Zero(grads.rows());
  double s = 0.0;
  for (Eigen::Index i = 0; i < grads.cols(); ++i) {
    if (!sel[static_cast<std::size_t>(i)]) continue;
    g += Q(i) * grads.col(i);
    s += Q(i);
  }
  if (!(s > 0.0)) throw std::invalid_argument("ideal_aggregate: empty selection");
  return g / s;
}

double smoothness_constant(const TaskData& task, const LogisticModel& m) {
  RMat G = RMat::Zero(m.features, m.features);
  double n = 0.0;
  for (const auto& ds : task.devices) {
    G.noalias() += ds.X.transpose() * ds.X;
    n += ds.size();
  }
  G /= n;
  Eigen::SelfAdjointEigenSolver<RMat> es(G, Eigen::EigenvaluesOnly);
  return 0.5 * es.eigenvalues().maxCoeff() + m.lambda;
}

Environment make_environment(const SystemConfig& cfg) {
  validate(cfg);
  Environment env;
  env.cfg = cfg;
  env.model = logistic_model(cfg);
  RngStream data_rng = substream(cfg, "data");
  env.data = synth_tasks(cfg, data_rng);
  RngStream place_rng = substream(cfg, "placement");
  env.placements = place_devices(cfg, place_rng);
  const Topology topo = cfg.topology();
  env.Q = RVec::Zero(topo.total());
  for (int k = 0; k < cfg.K; ++k) {
    double s = 0.0;
    for (int i = 0; i < cfg.M[k]; ++i) {
      env.Q(topo.flat(k, i)) = env.data[k].devices[i].size();
      s += env.data[k].devices[i].size();
    }
    env.Q_full.push_back(s);
    env.omega.push_back(smoothness_constant(env.data[k], env.model));
    env.eta.push_back(cfg.learning.eta.empty() ? cfg.learning.eta_scale / env.omega.back()
                                               : cfg.learning.eta[k]);
  }
  return env;
}

std::vector<TaskState> initial_states(const Environment& env) {
  std::vector<TaskState> st;
  for (int k = 0; k < env.cfg.K; ++k) {
    TaskState s;
    s.task = k;
    s.w = RVec::Zero(env.model.D);
    s.eta = env.eta[k];
    st.push_back(std::move(s));
  }
  return st;
}

namespace {

double task_loss(const RVec& w, const TaskData& td, const LogisticModel& m) {
  double s = 0.0;
  double n = 0.0;
  for (const auto& ds : td.devices) {
    s += ds.size() * local_loss(w, ds, m);
    n += ds.size();
  }
  return s / n;
}

LocalDataset subset(const LocalDataset& ds, const std::vector<int>& rows) {
  LocalDataset out;
  out.X.resize(static_cast<Eigen::Index>(rows.size()), ds.X.cols());
  out.labels.reserve(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    out.X.row(static_cast<Eigen::Index>(r)) = ds.X.row(rows[r]);
    out.labels.push_back(ds.labels[static_cast<std::size_t>(rows[r])]);
  }
  return out;
}

// One full-batch gradient, or the pseudo-gradient of several local SGD steps.
RVec device_update(const RVec& w, const LocalDataset& ds, const Environment& env, double eta,
                   int round, int dev) {
  const auto& L = env.cfg.learning;
  if (L.local_steps <= 1) return local_gradient(w, ds, env.model);
  RngStream rng = substream(env.cfg, "sgd/" + std::to_string(round) + "/" + std::to_string(dev));
  const int batch = std::max(1, static_cast<int>(std::lround(L.batch_fraction * ds.size())));
  std::vector<int> idx(static_cast<std::size_t>(ds.size()));
  RVec wl = w;
  for (int s = 0; s < L.local_steps; ++s) {
    std::iota(idx.begin(), idx.end(), 0);
    shuffle(idx, rng);
    std::vector<int> rows(idx.begin(), idx.begin() + batch);
    wl -= eta * local_gradient(wl, subset(ds, rows), env.model);
  }
  return (w - wl) / (eta * L.local_steps);
}

}  // namespace

std::vector<RoundMetrics> run_round(std::vector<TaskState>& states, const Environment& env,
                                    const ChannelSet& channels, int round, Strategy strategy,
                                    const TrainingHooks& hooks) {
  const SystemConfig& cfg = env.cfg;
  const Topology topo = cfg.topology();
  const int K = cfg.K;
  const int D = env.model.D;

  // Local gradients, in parallel over devices.
  std::vector<RMat> grads(static_cast<std::size_t>(K));
  for (int k = 0; k < K; ++k) grads[k] = RMat::Zero(D, cfg.M[k]);
  parallel_for(static_cast<std::size_t>(topo.total()), hooks.threads, [&](std::size_t dev) {
    const int d = static_cast<int>(dev);
    const int k = topo.task_of(d);
    const int i = d - topo.offset(k);
    grads[k].col(i) = device_update(states[k].w, env.data[k].devices[i], env, states[k].eta, round, d);
  });

  std::vector<GradientBatch> batches;
  std::vector<RVec> ideal;
  std::vector<RVec> Qk;
  std::vector<double> v;
  for (int k = 0; k < K; ++k) {
    batches.push_back(normalize(grads[k], k));
    Qk.push_back(env.Q.segment(topo.offset(k), cfg.M[k]));
    ideal.push_back(ideal_aggregate(grads[k], Qk.back(), Selection(cfg.M[k], 1)));
    v.push_back(batches.back().v_task);
  }

  std::vector<RoundMetrics> out(static_cast<std::size_t>(K));
  std::vector<RVec> ghat(static_cast<std::size_t>(K));
  const std::string sname = to_string(strategy);

  if (strategy == Strategy::ErrorFree) {
    for (int k = 0; k < K; ++k) {
      ghat[k] = ideal[k];
      out[k].nmse_db = kNmseFloorDb;
      out[k].analytic_nmse_db = kNmseFloorDb;
      out[k].selected = cfg.M[k];
    }
  } else {
    Problem p;
    p.topo = topo;
    p.H = channels.H;
    p.Q = env.Q;
    p.Q_full = env.Q_full;
    p.sigma2 = cfg.sigma2;
    p.P0 = cfg.P0;
    p.N_R = cfg.N_R;
    p.N_T = cfg.N_T;
    for (int k = 0; k < K; ++k) {
      CorrelationModel cm = cfg.correlation.mode == CorrelationMode::Uniform
                                ? uniform_correlation(cfg.correlation.epsilon, cfg.M[k], k)
                                : estimate_correlation(batches[k]);
      if (hooks.rho) write_rho_rows(*hooks.rho, round, sname, cm);
      p.rho.push_back(std::move(cm.rho));
    }

    Selection sel = all_selected(topo);
    BeamformingState st;
    const std::uint64_t init_seed = substream_seed(cfg.seed, "init/" + std::to_string(round));
    if (strategy == Strategy::AO) {
      if (cfg.gibbs.enabled) {
        RngStream grng = substream(cfg, "gibbs/" + std::to_string(round));
        SelectionResult r = gibbs_optimize(p, cfg.optimizer, cfg.gibbs, init_seed, grng, hooks.threads);
        if (hooks.gibbs) write_gibbs_rows(*hooks.gibbs, round, r);
        sel = r.selection;
        st = std::move(r.state);
      } else {
        RngStream irng = substream(init_seed, "init");
        st = ao_optimize(p, sel, cfg.optimizer, initial_state(p, sel, irng));
      }
      assign_optimal_zeta(p, sel, v, st);
      if (hooks.trace) write_trace_rows(*hooks.trace, round, sname, st);
    } else {
      st = zero_forcing_state(p, sel, v);
    }

    TransmitPlan plan{st.u};
    RngStream nrng = substream(cfg, "noise/" + std::to_string(round));
    const CRowMat Y = transmit(channels, plan, batches, topo, sel, cfg.sigma2, &nrng);
    const auto coeffs = state_coefficients(p, sel, st);
    double E = 0.0;
    std::vector<double> d(static_cast<std::size_t>(K));
    for (int k = 0; k < K; ++k) {
      d[k] = d_k(coeffs[k], p.Q_full[k]);
      E += d[k];
    }
    for (int k = 0; k < K; ++k) {
      const int off = topo.offset(k);
      Selection sk(sel.begin() + off, sel.begin() + off + cfg.M[k]);
      const CVec rhat = combine(Y, st.f[k], st.zeta[k]);
      ghat[k] = reconstruct(rhat, batches[k], Qk[k], sk);
      out[k].nmse_db = nmse_db(ghat[k], ideal[k]);
      out[k].analytic_nmse_db = (coeffs[k].c0 > 0.0 && v[k] > 0.0)
                                    ? analytic_nmse_db(coeffs[k], st.zeta[k], v[k])
                                    : kNmseFloorDb;
      out[k].d_k = d[k];
      out[k].E = E;
      out[k].zeta = st.zeta[k];
      double pf = 0.0;
      int n = 0;
      for (int i = 0; i < cfg.M[k]; ++i) {
        if (!sel[off + i]) continue;
        pf += 2.0 * st.u[off + i].squaredNorm() / cfg.P0;
        ++n;
      }
      out[k].power_fraction_mean = n ? pf / n : 0.0;
      out[k].selected = n;
    }
  }

  for (int k = 0; k < K; ++k) {
    states[k].w -= states[k].eta * ghat[k];
    RoundMetrics& m = out[k];
    m.round = round;
    m.task = k;
    m.strategy = strategy;
    m.loss = task_loss(states[k].w, env.data[k], env.model);
    m.accuracy = accuracy(states[k].w, env.data[k].test, env.model);
    states[k].loss_history.push_back(m.loss);
  }
  return out;
}

MetricsTable run_training(const SystemConfig& cfg, const TrainingHooks& hooks) {
  const Environment env = make_environment(cfg);
  MetricsTable table;
  table.omega = env.omega;
  table.eta = env.eta;
  for (Strategy s : cfg.strategies) {
    StrategyRun run;
    run.strategy = s;
    std::vector<TaskState> states = initial_states(env);
    for (int k = 0; k < cfg.K; ++k) {
      run.initial_loss.push_back(task_loss(states[k].w, env.data[k], env.model));
      run.initial_accuracy.push_back(accuracy(states[k].w, env.data[k].test, env.model));
    }
    for (int t = 1; t <= cfg.rounds; ++t) {
      RngStream crng = substream(cfg, "channel/" + std::to_string(t));
      const ChannelSet ch = draw_channels(env.placements, t, cfg, crng);
      auto rows = run_round(states, env, ch, t, s, hooks);
      run.rows.insert(run.rows.end(), rows.begin(), rows.end());
    }
    for (const auto& st : states) run.final_w.push_back(st.w);
    table.runs.push_back(std::move(run));
  }
  return table;
}

}  // namespace oafmtl
