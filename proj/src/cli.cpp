// SPDX-License-Identifier: Apache-2.0

#include "oafmtl/cli.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "oafmtl/channel.hpp"
#include "oafmtl/config.hpp"
#include "oafmtl/fltrain.hpp"
#include "oafmtl/report.hpp"
#include "oafmtl/simd/kernels.hpp"
#include "oafmtl/validation.hpp"

namespace oafmtl {
namespace {

namespace fs = std::filesystem;

struct Options {
  std::string config;
  std::vector<std::string> sets;
  std::string out = ".";
  int threads = 1;
  std::string kernels;
  std::string dump_channels, dump_rho, dump_trace, dump_gibbs;
  bool gibbs = false;
  std::string param;
  std::vector<std::string> values;
  int instances = 0;
  long trials = 0;
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

SystemConfig resolve_config(const Options& o, bool required, const std::vector<std::string>& extra = {}) {
  std::vector<std::string> overrides = o.sets;
  if (o.gibbs) overrides.push_back("gibbs=true");
  overrides.insert(overrides.end(), extra.begin(), extra.end());
  if (o.config.empty()) {
    if (required) throw UsageError("--config is required");
    return parse_config("", overrides);
  }
  if (!fs::exists(o.config)) throw ConfigError("config file not found: " + o.config);
  return load_config(o.config, overrides);
}

std::unique_ptr<std::ofstream> open_dump(const std::string& path, const char* header) {
  if (path.empty()) return nullptr;
  auto f = std::make_unique<std::ofstream>(path, std::ios::binary | std::ios::trunc);
  if (!*f) throw std::runtime_error("cannot open " + path + " for writing");
  *f << header << '\n';
  return f;
}

void ensure_out_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (!fs::is_directory(dir)) throw std::runtime_error("output directory not writable: " + dir);
}

void print_summary(std::ostream& out, const MetricsTable& t) {
  char line[160];
  std::snprintf(line, sizeof line, "%-10s %4s %12s %10s %12s\n", "strategy", "task", "final_loss",
                "accuracy", "mean_nmse_db");
  out << line;
  for (const auto& run : t.runs) {
    const int K = static_cast<int>(run.initial_loss.size());
    for (int k = 0; k < K; ++k) {
      double loss = run.initial_loss[k], acc = run.initial_accuracy[k], nmse = 0.0;
      int n = 0;
      for (const auto& r : run.rows) {
        if (r.task != k) continue;
        loss = r.loss;
        acc = r.accuracy;
        nmse += r.nmse_db;
        ++n;
      }
      std::snprintf(line, sizeof line, "%-10s %4d %12.6g %10.4f %12.4g\n", to_string(run.strategy).c_str(), k,
                    loss, acc, n > 0 ? nmse / n : 0.0);
      out << line;
    }
  }
}

int cmd_run(const Options& o, const std::vector<std::string>& argv, std::ostream& out) {
  const SystemConfig cfg = resolve_config(o, true);
  ensure_out_dir(o.out);
  if (!o.dump_channels.empty()) {
    const Environment env = make_environment(cfg);
    std::ofstream f(o.dump_channels, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open " + o.dump_channels + " for writing");
    write_placements_csv(f, env.placements, cfg.pathloss);
  }
  auto rho = open_dump(o.dump_rho, kRhoHeader);
  auto trace = open_dump(o.dump_trace, kTraceHeader);
  auto gibbs = open_dump(o.dump_gibbs, kGibbsHeader);
  TrainingHooks hooks;
  hooks.rho = rho.get();
  hooks.trace = trace.get();
  hooks.gibbs = gibbs.get();
  hooks.threads = o.threads;
  const MetricsTable table = run_training(cfg, hooks);

  std::ostringstream metrics;
  write_metrics_csv(metrics, table);
  write_text_file(fs::path(o.out) / "metrics.csv", metrics.str());
  write_text_file(fs::path(o.out) / "summary.json", summary_json(cfg, table));
  write_text_file(fs::path(o.out) / "manifest.json", manifest_json(cfg, "run", argv, o.threads));
  print_summary(out, table);
  return kExitOk;
}

int cmd_sweep(const Options& o, const std::vector<std::string>& argv, std::ostream& out) {
  if (o.param.empty()) throw UsageError("--param is required");
  if (o.values.empty()) throw UsageError("--values must list at least one value");
  std::vector<SystemConfig> cfgs;
  for (const auto& v : o.values) cfgs.push_back(resolve_config(o, true, {o.param + "=" + v}));
  ensure_out_dir(o.out);
  std::ostringstream csv;
  csv << "value," << kMetricsHeader << '\n';
  for (std::size_t i = 0; i < cfgs.size(); ++i) {
    TrainingHooks hooks;
    hooks.threads = o.threads;
    const MetricsTable table = run_training(cfgs[i], hooks);
    write_metrics_csv(csv, table, false, o.values[i] + ",");
    out << o.param << " = " << o.values[i] << '\n';
    print_summary(out, table);
  }
  write_text_file(fs::path(o.out) / "sweep.csv", csv.str());
  write_text_file(fs::path(o.out) / "manifest.json", manifest_json(cfgs.front(), "sweep", argv, o.threads));
  return kExitOk;
}

int cmd_validate(const std::string& suite, const Options& o, std::ostream& out) {
  const SystemConfig cfg = resolve_config(o, false);
  ValidationOptions vo;
  vo.instances = o.instances;
  vo.trials = o.trials;
  vo.threads = o.threads;
  std::vector<CheckResult> checks;
  if (suite == "validate-zeta") checks = validate_zeta(cfg, vo);
  else if (suite == "validate-mse") checks = validate_mse(cfg, vo);
  else if (suite == "validate-qcqp") checks = validate_qcqp(cfg, vo);
  else checks = gibbs_bench(cfg, vo);
  const bool ok = print_checks(out, checks);
  if (!o.out.empty() && o.out != ".") {
    ensure_out_dir(o.out);
    std::ostringstream csv;
    write_checks_csv(csv, checks);
    write_text_file(fs::path(o.out) / (suite + ".csv"), csv.str());
  }
  std::size_t passed = 0;
  for (const auto& c : checks) passed += c.pass;
  out << suite << ": " << passed << "/" << checks.size() << " checks passed\n";
  return ok ? kExitOk : kExitFailure;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Over-the-air federated multi-task learning simulator"};
  app.require_subcommand(1);
  app.footer("Config keys (--set key=value):\n" + config_schema());

  auto add_common = [&o](CLI::App* c, bool config_required) {
    c->add_option("--config", o.config, config_required ? "config file (required)" : "config file (optional)");
    c->add_option("--set", o.sets, "override key=value, applied before validation (repeatable)")->allow_extra_args(false);
    c->add_option("--out", o.out, "output directory");
    c->add_option("--threads", o.threads, "worker threads (default 1)")->check(CLI::PositiveNumber);
    c->add_option("--kernels", o.kernels, "kernel variant: auto | scalar | avx2");
  };

  CLI::App* run = app.add_subcommand("run", "train all configured strategies; writes metrics.csv, summary.json, manifest.json");
  add_common(run, true);
  run->add_option("--dump-channels", o.dump_channels, "CSV of device placements and path gains");
  run->add_option("--dump-rho", o.dump_rho, "CSV of the correlation model per task and round");
  run->add_option("--dump-trace", o.dump_trace, "CSV of alternating-optimization traces");
  run->add_option("--dump-gibbs", o.dump_gibbs, "CSV of Gibbs candidates per sampling round");
  run->add_flag("--gibbs", o.gibbs, "enable Gibbs-sampling device selection");

  CLI::App* sweep = app.add_subcommand("sweep", "run once per value of one config key; writes sweep.csv");
  add_common(sweep, true);
  sweep->add_option("--param", o.param, "config key to sweep");
  sweep->add_option("--values", o.values, "values, comma separated")->delimiter(',');
  sweep->add_flag("--gibbs", o.gibbs, "enable Gibbs-sampling device selection");

  std::vector<CLI::App*> suites;
  for (const char* name : {"validate-mse", "validate-zeta", "validate-qcqp", "gibbs-bench"}) {
    CLI::App* c = app.add_subcommand(name, std::string("self-check suite ") + name);
    add_common(c, false);
    c->add_option("--instances", o.instances, "random instances (0 selects the suite default)");
    c->add_option("--trials", o.trials, "Monte Carlo trials per instance (validate-mse)");
    suites.push_back(c);
  }

  std::vector<std::string> args(argv, argv + argc);
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    err << app.help();
    return kExitUsage;
  }

  try {
    if (!o.kernels.empty()) simd::select_kernels(o.kernels);
    if (run->parsed()) return cmd_run(o, args, out);
    if (sweep->parsed()) return cmd_sweep(o, args, out);
    for (CLI::App* c : suites) {
      if (c->parsed()) return cmd_validate(c->get_name(), o, out);
    }
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n' << app.help();
    return kExitUsage;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace oafmtl
