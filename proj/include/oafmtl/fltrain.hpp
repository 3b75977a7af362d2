// SPDX-License-Identifier: Apache-2.0
//
// Multi-task federated training on synthetic Gaussian-mixture classification
// tasks with L2-regularized multinomial logistic regression. The model of a
// task is a (classes x (feature_dim + 1)) weight matrix flattened row-major,
// zero-padded to even length D.

#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "oafmtl/channel.hpp"
#include "oafmtl/config.hpp"
#include "oafmtl/gradstats.hpp"
#include "oafmtl/optimizer.hpp"
#include "oafmtl/rng.hpp"
#include "oafmtl/types.hpp"

namespace oafmtl {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Rows are samples; the last column is the constant 1 bias feature.
struct LocalDataset {
  RowMat X;
  std::vector<int> labels;
  int size() const { return static_cast<int>(labels.size()); }
};

struct TaskData {
  std::vector<LocalDataset> devices;
  LocalDataset test;
};

struct LogisticModel {
  int classes = 10;
  int features = 25;  // feature_dim + 1
  int D = 250;        // classes * features, padded to even
  double lambda = 1e-3;
};

LogisticModel logistic_model(const SystemConfig& cfg);

std::vector<TaskData> synth_tasks(const SystemConfig& cfg, RngStream& rng);

/// Mean cross-entropy plus (lambda / 2) |w|^2.
double local_loss(const RVec& w, const LocalDataset& ds, const LogisticModel& m);
/// Gradient of local_loss.
RVec local_gradient(const RVec& w, const LocalDataset& ds, const LogisticModel& m);
double accuracy(const RVec& w, const LocalDataset& ds, const LogisticModel& m);

/// Q-weighted mean over the selected columns.
RVec ideal_aggregate(const RMat& grads, const RVec& Q, const Selection& sel);

/// 0.5 * lambda_max(X^T X / Q_k) + lambda over the task's full training set,
/// an upper bound on the smoothness of the task loss.
double smoothness_constant(const TaskData& task, const LogisticModel& m);

struct TaskState {
  int task = 0;
  RVec w;
  double eta = 0.0;
  std::vector<double> loss_history;
};

struct RoundMetrics {
  int round = 0;
  int task = 0;
  Strategy strategy = Strategy::AO;
  double loss = 0.0;
  double accuracy = 0.0;
  double nmse_db = 0.0;
  double d_k = 0.0;
  double E = 0.0;
  double zeta = 0.0;
  double power_fraction_mean = 0.0;
  double analytic_nmse_db = 0.0;
  int selected = 0;
};

/// Everything fixed for the whole experiment.
struct Environment {
  SystemConfig cfg;
  LogisticModel model;
  std::vector<TaskData> data;
  std::vector<DevicePlacement> placements;
  std::vector<double> omega;  // per task
  std::vector<double> eta;    // per task
  RVec Q;                     // per device
  std::vector<double> Q_full;
};

Environment make_environment(const SystemConfig& cfg);

struct TrainingHooks {
  std::ostream* rho = nullptr;
  std::ostream* trace = nullptr;
  std::ostream* gibbs = nullptr;
  int threads = 1;
};

std::vector<TaskState> initial_states(const Environment& env);

/// One round of Algorithm 1 for one strategy; updates `states` in place.
std::vector<RoundMetrics> run_round(std::vector<TaskState>& states, const Environment& env,
                                    const ChannelSet& channels, int round, Strategy strategy,
                                    const TrainingHooks& hooks = {});

struct StrategyRun {
  Strategy strategy = Strategy::AO;
  std::vector<double> initial_loss;      // per task
  std::vector<double> initial_accuracy;  // per task
  std::vector<RoundMetrics> rows;        // rounds 1..T, tasks in order
  std::vector<RVec> final_w;
};

struct MetricsTable {
  std::vector<StrategyRun> runs;
  std::vector<double> omega;
  std::vector<double> eta;
};

/// All configured strategies on identical channel and noise substreams.
MetricsTable run_training(const SystemConfig& cfg, const TrainingHooks& hooks = {});

}  // namespace oafmtl
