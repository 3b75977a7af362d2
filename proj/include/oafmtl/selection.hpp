// SPDX-License-Identifier: Apache-2.0
//
// Device selection by annealed Gibbs sampling over single-bit neighborhoods,
// and an exhaustive oracle for small instances. Every candidate is scored by
// ao_optimize from the same deterministic initialization, so phi(s) is a
// pure function of s and is memoized.

#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <ostream>
#include <vector>

#include "oafmtl/config.hpp"
#include "oafmtl/optimizer.hpp"
#include "oafmtl/rng.hpp"

namespace oafmtl {

/// s itself followed by its single-bit flips, in device order.
std::vector<Selection> neighborhood(const Selection& s);

/// False when some task has no selected device.
bool feasible(const Selection& s, const Topology& topo);

/// pi(s) proportional to exp(-phi(s)/beta), max-shifted. Infinite phi gets
/// probability 0. Throws std::invalid_argument when beta <= 0 or no phi is
/// finite.
std::vector<double> gibbs_probabilities(const std::vector<double>& phi, double beta);

/// Index drawn from gibbs_probabilities(phi, beta).
std::size_t gibbs_step(const std::vector<double>& phi, double beta, RngStream& rng);

struct GibbsRecord {
  int round = 0;
  Selection candidate;
  double phi = 0.0;
  bool sampled = false;
};

struct SelectionResult {
  Selection selection;
  BeamformingState state;
  double E = 0.0;
  std::vector<double> best_E;  // best-visited E after init and after each round
  std::vector<double> beta;    // temperature used in each round
  std::vector<GibbsRecord> records;
  std::size_t distinct_evaluated = 0;
};

/// Scores candidates with ao_optimize; threads > 1 scores a neighborhood in
/// parallel. Results do not depend on the thread count.
class SelectionScorer {
 public:
  SelectionScorer(const Problem& p, const OptimizerConfig& opt, std::uint64_t init_seed,
                  int threads = 1);
  /// +inf for infeasible candidates.
  double phi(const Selection& s);
  std::vector<double> phi_all(const std::vector<Selection>& cands);
  BeamformingState state(const Selection& s);
  std::size_t evaluated() const { return cache_.size(); }

 private:
  struct Entry {
    double E;
    BeamformingState state;
  };
  Entry evaluate(const Selection& s) const;

  const Problem& p_;
  OptimizerConfig opt_;
  std::uint64_t init_seed_;
  int threads_;
  std::map<Selection, Entry> cache_;
};

SelectionResult gibbs_optimize(const Problem& p, const OptimizerConfig& opt, const GibbsConfig& g,
                               std::uint64_t init_seed, RngStream& rng, int threads = 1);

/// Throws std::invalid_argument when the device count exceeds 12.
SelectionResult brute_force_selection(const Problem& p, const OptimizerConfig& opt,
                                      std::uint64_t init_seed, int threads = 1);

/// CSV rows: round,j,candidate,phi,sampled
void write_gibbs_rows(std::ostream& os, int round, const SelectionResult& r);

}  // namespace oafmtl
