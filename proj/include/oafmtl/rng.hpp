// SPDX-License-Identifier: Apache-2.0
//
// Labeled random substreams. A stream is keyed by (seed, label); the engine
// seed is SplitMix64 applied to seed ^ fnv1a64(label), so toggling one
// feature never shifts the draws of another.

#pragma once

#include <cstdint>
#include <random>
#include <string>

#include "oafmtl/types.hpp"

namespace oafmtl {

struct SystemConfig;

std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t substream_seed(std::uint64_t seed, const std::string& label);

class RngStream {
 public:
  RngStream(std::uint64_t seed, std::string label);

  std::uint64_t seed() const { return seed_; }
  const std::string& label() const { return label_; }

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform on [0, 1).
  double uniform() { return std::generate_canonical<double, 53>(engine_); }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double normal() { return normal_(engine_); }
  /// Circularly symmetric complex Gaussian with E|z|^2 = 1.
  cd cnormal();
  /// Uniform integer on [0, n).
  std::uint64_t below(std::uint64_t n);

  std::mt19937_64& engine() { return engine_; }

 private:
  std::uint64_t seed_;
  std::string label_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_;
};

/// Throws std::invalid_argument on an empty label.
RngStream substream(std::uint64_t seed, const std::string& label);
RngStream substream(const SystemConfig& cfg, const std::string& label);

}  // namespace oafmtl
