// SPDX-License-Identifier: Apache-2.0
//
// Self-checks driven from the command line. Each returns one row per check
// with the measured quantity and the tolerance it was held to.

#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "oafmtl/config.hpp"

namespace oafmtl {

struct CheckResult {
  std::string name;
  double measured = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::string detail;
};

struct ValidationOptions {
  int instances = 0;  // 0 selects the suite default
  long trials = 0;    // Monte Carlo trials per instance; 0 selects the default
  int D = 8;          // model dimension for Monte Carlo instances
  int threads = 1;
};

/// zeta* against a 1000-point grid and a golden-section refinement.
std::vector<CheckResult> validate_zeta(const SystemConfig& cfg, const ValidationOptions& opt);
/// Closed-form comm_mse against the Monte Carlo mean of the airlink pipeline.
std::vector<CheckResult> validate_mse(const SystemConfig& cfg, const ValidationOptions& opt);
/// KKT certificates of random ball QCQPs and of every solve inside AO runs.
std::vector<CheckResult> validate_qcqp(const SystemConfig& cfg, const ValidationOptions& opt);
/// Gibbs best-visited E against exhaustive search on 6-device instances.
std::vector<CheckResult> gibbs_bench(const SystemConfig& cfg, const ValidationOptions& opt);

/// Prints PASS/FAIL lines; returns true when every check passed.
bool print_checks(std::ostream& os, const std::vector<CheckResult>& checks);
/// CSV: check,measured,tolerance,pass,detail
void write_checks_csv(std::ostream& os, const std::vector<CheckResult>& checks);

}  // namespace oafmtl
