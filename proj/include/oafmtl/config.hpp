// SPDX-License-Identifier: Apache-2.0
//
// Experiment configuration: a flat `key = value` text format, dB to linear
// conversion at load time, validation, and canonical serialization.

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "oafmtl/types.hpp"

namespace oafmtl {

/// Malformed config text or a violated invariant. The message names the key
/// or the invariant.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class CorrelationMode { Uniform, Empirical };
enum class PlacementLaw { DiskUniform, SqrtScaled };
enum class Partition { Iid, NonIid };
enum class Strategy { AO, ZeroForcing, ErrorFree };

std::string to_string(CorrelationMode m);
std::string to_string(PlacementLaw p);
std::string to_string(Partition p);
std::string to_string(Strategy s);
Strategy parse_strategy(const std::string& s);

struct PathLossConfig {
  double alpha = 3.8;
  double kappa = 1e-6;          // linear, reference loss at 1 m
  double G_S = 3.1622776601683795;  // linear (5 dBi)
  double G_D = 1.0;             // linear (0 dBi)
  double Delta = 100.0;         // cell radius, m
  double ps_height = 10.0;      // m
  PlacementLaw placement = PlacementLaw::DiskUniform;
};

struct LearningConfig {
  std::vector<double> eta;      // per task; empty means 1/omega_k scaled by eta_scale
  double eta_scale = 0.9;
  int local_steps = 1;
  double batch_fraction = 1.0;
  double lambda = 1e-3;
  int feature_dim = 24;
  int classes = 10;
  int samples_per_device = 200;
  int test_samples = 2000;
  double class_sep = 1.0;
  Partition partition = Partition::Iid;
  int classes_per_device = 5;
};

struct CorrelationConfig {
  CorrelationMode mode = CorrelationMode::Uniform;
  double epsilon = 1.0;
};

struct OptimizerConfig {
  int I_max = 50;
  double rel_tol = 1e-6;
  bool refresh_y_per_device = false;
};

struct GibbsConfig {
  bool enabled = false;
  int J_max = 50;
  double beta0 = 1.0;
  double gamma = 0.9;
};

struct SystemConfig {
  int K = 2;
  std::vector<int> M{10, 10};
  int N_T = 2;
  int N_R = 8;
  double P0 = 1.0;      // W
  double sigma2 = 1e-11;  // W
  PathLossConfig pathloss;
  LearningConfig learning;
  CorrelationConfig correlation;
  OptimizerConfig optimizer;
  GibbsConfig gibbs;
  int rounds = 100;
  std::uint64_t seed = 1;
  std::vector<Strategy> strategies{Strategy::AO, Strategy::ZeroForcing, Strategy::ErrorFree};

  Topology topology() const { return Topology{M}; }
  /// Model dimension: classes * (feature_dim + 1), padded up to even.
  int model_dim() const;
  int channel_uses() const { return model_dim() / 2; }
};

/// Throws ConfigError naming the first violated invariant.
void validate(const SystemConfig& cfg);

/// Parses config text, applies `overrides` (each "key=value") and validates.
SystemConfig parse_config(const std::string& text,
                          const std::vector<std::string>& overrides = {});
SystemConfig load_config(const std::filesystem::path& path,
                         const std::vector<std::string>& overrides = {});

/// One `key = value` line per field, fixed order, linear units, %.17g.
/// parse_config(serialize(c)) reproduces c exactly.
std::string serialize(const SystemConfig& cfg);
std::uint64_t config_hash(const SystemConfig& cfg);

/// Every key accepted by the loader with its unit and default, for --help.
std::string config_schema();

double db_to_linear(double db);
double linear_to_db(double lin);
double dbm_to_watt(double dbm);
double watt_to_dbm(double w);

std::uint64_t fnv1a64(const std::string& s);

}  // namespace oafmtl
