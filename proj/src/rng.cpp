// SPDX-License-Identifier: Apache-2.0

#include "oafmtl/rng.hpp"

#include <cmath>
#include <stdexcept>

#include "oafmtl/config.hpp"

namespace oafmtl {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t substream_seed(std::uint64_t seed, const std::string& label) {
  // Two rounds so that seed and label bits are fully mixed before XOR-ing.
  return splitmix64(splitmix64(seed) ^ fnv1a64(label));
}

RngStream::RngStream(std::uint64_t seed, std::string label)
    : seed_(seed), label_(std::move(label)), engine_(substream_seed(seed_, label_)) {}

cd RngStream::cnormal() {
  const double s = std::sqrt(0.5);
  double re = normal();
  double im = normal();
  return {s * re, s * im};
}

std::uint64_t RngStream::below(std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("RngStream::below(0)");
  std::uniform_int_distribution<std::uint64_t> d(0, n - 1);
  return d(engine_);
}

RngStream substream(std::uint64_t seed, const std::string& label) {
  if (label.empty()) throw std::invalid_argument("substream label must be nonempty");
  return RngStream(seed, label);
}

RngStream substream(const SystemConfig& cfg, const std::string& label) {
  return substream(cfg.seed, label);
}

}  // namespace oafmtl
