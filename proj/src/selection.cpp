// SPDX-License-Identifier: Apache-2.0

#include "oafmtl/selection.hpp"

#include <cmath>
#include <stdexcept>

#include "oafmtl/parallel.hpp"
#include "oafmtl/report.hpp"

namespace oafmtl {

std::vector<Selection> neighborhood(const Selection& s) {
  std::vector<Selection> out;
  out.reserve(s.size() + 1);
  out.push_back(s);
  for (std::size_t i = 0; i < s.size(); ++i) {
    Selection t = s;
    t[i] = t[i] ? 0 : 1;
    out.push_back(std::move(t));
  }
  return out;
}

bool feasible(const Selection& s, const Topology& topo) {
  for (int k = 0; k < topo.tasks(); ++k) {
    bool any = false;
    for (int i = 0; i < topo.devices(k) && !any; ++i) any = s[topo.flat(k, i)] != 0;
    if (!any) return false;
  }
  return true;
}

std::vector<double> gibbs_probabilities(const std::vector<double>& phi, double beta) {
  if (!(beta > 0.0)) throw std::invalid_argument("gibbs_probabilities: beta must be positive");
  double lo = std::numeric_limits<double>::infinity();
  for (double x : phi) lo = std::min(lo, x);
  if (!std::isfinite(lo)) throw std::invalid_argument("gibbs_probabilities: no finite candidate");
  std::vector<double> w(phi.size(), 0.0);
  double z = 0.0;
  for (std::size_t i = 0; i < phi.size(); ++i) {
    if (std::isfinite(phi[i])) w[i] = std::exp(-(phi[i] - lo) / beta);
    z += w[i];
  }
  for (double& x : w) x /= z;
  return w;
}

std::size_t gibbs_step(const std::vector<double>& phi, double beta, RngStream& rng) {
  const auto pi = gibbs_probabilities(phi, beta);
  const double u = rng.uniform();
  double acc = 0.0;
  std::size_t last = 0;
  for (std::size_t i = 0; i < pi.size(); ++i) {
    if (pi[i] <= 0.0) continue;
    acc += pi[i];
    last = i;
    if (u < acc) return i;
  }
  return last;  // u landed in the rounding gap above acc
}

SelectionScorer::SelectionScorer(const Problem& p, const OptimizerConfig& opt,
                                 std::uint64_t init_seed, int threads)
    : p_(p), opt_(opt), init_seed_(init_seed), threads_(threads) {}

SelectionScorer::Entry SelectionScorer::evaluate(const Selection& s) const {
  if (!feasible(s, p_.topo)) return {std::numeric_limits<double>::infinity(), {}};
  RngStream rng = substream(init_seed_, "init");
  BeamformingState st = ao_optimize(p_, s, opt_, initial_state(p_, s, rng));
  const double E = st.trace.back().E;
  return {E, std::move(st)};
}

double SelectionScorer::phi(const Selection& s) {
  auto it = cache_.find(s);
  if (it == cache_.end()) it = cache_.emplace(s, evaluate(s)).first;
  return it->second.E;
}

std::vector<double> SelectionScorer::phi_all(const std::vector<Selection>& cands) {
  std::vector<const Selection*> todo;
  for (const auto& c : cands) {
    if (cache_.find(c) == cache_.end()) {
      bool dup = false;
      for (const auto* t : todo) dup = dup || *t == c;
      if (!dup) todo.push_back(&c);
    }
  }
  std::vector<Entry> fresh(todo.size());
  parallel_for(todo.size(), threads_, [&](std::size_t i) { fresh[i] = evaluate(*todo[i]); });
  for (std::size_t i = 0; i < todo.size(); ++i) cache_.emplace(*todo[i], std::move(fresh[i]));
  std::vector<double> out;
  out.reserve(cands.size());
  for (const auto& c : cands) out.push_back(cache_.at(c).E);
  return out;
}

BeamformingState SelectionScorer::state(const Selection& s) {
  phi(s);
  return cache_.at(s).state;
}

SelectionResult gibbs_optimize(const Problem& p, const OptimizerConfig& opt, const GibbsConfig& g,
                               std::uint64_t init_seed, RngStream& rng, int threads) {
  SelectionScorer scorer(p, opt, init_seed, threads);
  SelectionResult r;
  Selection s = all_selected(p.topo);
  Selection best = s;
  double bestE = scorer.phi(s);
  r.best_E.push_back(bestE);
  double beta = g.beta0;
  for (int j = 0; j < g.J_max; ++j) {
    const auto cands = neighborhood(s);
    const auto phi = scorer.phi_all(cands);
    const std::size_t pick = gibbs_step(phi, beta, rng);
    for (std::size_t c = 0; c < cands.size(); ++c) {
      r.records.push_back({j, cands[c], phi[c], c == pick});
      if (phi[c] < bestE) {
        bestE = phi[c];
        best = cands[c];
      }
    }
    r.beta.push_back(beta);
    r.best_E.push_back(bestE);
    s = cands[pick];
    beta *= g.gamma;
  }
  r.selection = best;
  r.E = bestE;
  r.state = scorer.state(best);
  r.distinct_evaluated = scorer.evaluated();
  return r;
}

SelectionResult brute_force_selection(const Problem& p, const OptimizerConfig& opt,
                                      std::uint64_t init_seed, int threads) {
  const int N = p.topo.total();
  if (N > 12) throw std::invalid_argument("brute_force_selection: at most 12 devices");
  std::vector<Selection> all;
  for (std::uint32_t mask = 1; mask < (1u << N); ++mask) {
    Selection s(static_cast<std::size_t>(N), 0);
    for (int d = 0; d < N; ++d) s[d] = (mask >> d) & 1u;
    if (feasible(s, p.topo)) all.push_back(std::move(s));
  }
  SelectionScorer scorer(p, opt, init_seed, threads);
  const auto phi = scorer.phi_all(all);
  std::size_t best = 0;
  for (std::size_t i = 1; i < all.size(); ++i) {
    if (phi[i] < phi[best]) best = i;
  }
  SelectionResult r;
  r.selection = all[best];
  r.E = phi[best];
  r.state = scorer.state(all[best]);
  r.best_E.push_back(r.E);
  r.distinct_evaluated = scorer.evaluated();
  return r;
}

void write_gibbs_rows(std::ostream& os, int round, const SelectionResult& r) {
  for (const auto& rec : r.records) {
    os << round << ',' << rec.round << ',' << to_bitstring(rec.candidate) << ','
       << fmt_num(rec.phi) << ',' << (rec.sampled ? 1 : 0) << '\n';
  }
}

}  // namespace oafmtl
