// SPDX-License-Identifier: Apache-2.0
//
// Output formats. Data files carry no timestamps or host names; those live
// in the run manifest only.

#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

namespace oafmtl {

struct MetricsTable;
struct SystemConfig;

/// %.12g, with nan/inf spelled nan, inf, -inf.
std::string fmt_num(double x);

inline constexpr const char* kMetricsHeader =
    "round,task,strategy,loss,accuracy,nmse_db,d_k,E,zeta,power_fraction_mean";
inline constexpr const char* kRhoHeader = "round,strategy,k,i,j,value,mode";
inline constexpr const char* kTraceHeader = "round,strategy,sweep,task,step,E,d_k,G";
inline constexpr const char* kGibbsHeader = "round,j,candidate,phi,sampled";

/// `prefix` is prepended to each data row (used by sweeps).
void write_metrics_csv(std::ostream& os, const MetricsTable& t, bool header = true,
                       const std::string& prefix = "");
std::string summary_json(const SystemConfig& cfg, const MetricsTable& t);
std::string manifest_json(const SystemConfig& cfg, const std::string& command,
                          const std::vector<std::string>& argv, int threads);

/// Throws std::runtime_error when the file cannot be written.
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace oafmtl
