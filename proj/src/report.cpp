// SPDX-License-Identifier: Apache-2.0

#include "oafmtl/report.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <unistd.h>

#include "json.hpp"
#include "oafmtl/config.hpp"
#include "oafmtl/fltrain.hpp"
#include "oafmtl/simd/kernels.hpp"

namespace oafmtl {

std::string fmt_num(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", x);
  return buf;
}

void write_metrics_csv(std::ostream& os, const MetricsTable& t, bool header,
                       const std::string& prefix) {
  if (header) os << kMetricsHeader << '\n';
  for (const auto& run : t.runs) {
    for (const auto& r : run.rows) {
      os << prefix << r.round << ',' << r.task << ',' << to_string(r.strategy) << ','
         << fmt_num(r.loss) << ',' << fmt_num(r.accuracy) << ',' << fmt_num(r.nmse_db) << ','
         << fmt_num(r.d_k) << ',' << fmt_num(r.E) << ',' << fmt_num(r.zeta) << ','
         << fmt_num(r.power_fraction_mean) << '\n';
    }
  }
}

std::string summary_json(const SystemConfig& cfg, const MetricsTable& t) {
  using nlohmann::ordered_json;
  ordered_json j;
  char hash[32];
  std::snprintf(hash, sizeof(hash), "%016llx", static_cast<unsigned long long>(config_hash(cfg)));
  j["config_hash"] = hash;
  j["seed"] = cfg.seed;
  j["rounds"] = cfg.rounds;
  j["model_dim"] = cfg.model_dim();
  j["correlation"] = cfg.correlation.mode == CorrelationMode::Empirical ? "empirical (oracle)"
                                                                      : "uniform";
  j["epsilon"] = cfg.correlation.epsilon;
  j["gibbs"] = cfg.gibbs.enabled;
  j["omega"] = t.omega;
  j["eta"] = t.eta;
  ordered_json runs = ordered_json::array();
  for (const auto& run : t.runs) {
    ordered_json r;
    r["strategy"] = to_string(run.strategy);
    ordered_json tasks = ordered_json::array();
    for (int k = 0; k < cfg.K; ++k) {
      ordered_json tk;
      tk["task"] = k;
      tk["initial_loss"] = run.initial_loss[k];
      tk["initial_accuracy"] = run.initial_accuracy[k];
      double nmse = 0.0;
      int n = 0;
      const RoundMetrics* last = nullptr;
      for (const auto& row : run.rows) {
        if (row.task != k) continue;
        nmse += row.nmse_db;
        ++n;
        last = &row;
      }
      tk["final_loss"] = last ? last->loss : run.initial_loss[k];
      tk["final_accuracy"] = last ? last->accuracy : run.initial_accuracy[k];
      tk["mean_nmse_db"] = n ? nmse / n : 0.0;
      tasks.push_back(tk);
    }
    r["tasks"] = tasks;
    runs.push_back(r);
  }
  j["runs"] = runs;
  return j.dump(2) + "\n";
}

std::string manifest_json(const SystemConfig& cfg, const std::string& command,
                          const std::vector<std::string>& argv, int threads) {
  using nlohmann::ordered_json;
  ordered_json j;
  j["tool"] = "oafmtl";
  j["command"] = command;
  j["argv"] = argv;
  char hash[32];
  std::snprintf(hash, sizeof(hash), "%016llx", static_cast<unsigned long long>(config_hash(cfg)));
  j["config_hash"] = hash;
  j["config"] = serialize(cfg);
  j["threads"] = threads;
  j["kernels"] = simd::kernels().name;
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char ts[64];
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::strftime(ts, sizeof(ts), "%Y-%m-%dT%H:%M:%SZ", &tm);
  j["timestamp_utc"] = ts;
  char host[256] = {0};
  if (gethostname(host, sizeof(host) - 1) == 0) j["hostname"] = host;
  return j.dump(2) + "\n";
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot write '" + path.string() + "'");
  f << text;
  if (!f) throw std::runtime_error("write failed for '" + path.string() + "'");
}

}  // namespace oafmtl
