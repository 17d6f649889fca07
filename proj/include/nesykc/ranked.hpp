#pragma once

// Lawler partitioning: ranked enumeration on top of any solver that returns
// the best state under a partial assignment.

#include <cstdint>
#include <optional>
#include <queue>
#include <vector>

#include "nesykc/core.hpp"

namespace nesykc {

// Per-variable partial assignment: -1 free, 0 or 1 forced.
using Evidence = std::vector<std::int8_t>;

inline Evidence free_evidence(std::size_t num_vars) { return Evidence(num_vars, -1); }

// solve(evidence) -> std::optional<RankedState>, the best state consistent with
// the evidence (ties resolved toward the lexicographically smaller state).
// Emits states in ranks_before order until `limit` states were produced or the
// next best state fails the threshold.
template <class Solve>
std::vector<RankedState> lawler_enumerate(std::size_t num_vars, Solve&& solve, std::optional<std::size_t> limit,
                                          std::optional<double> threshold) {
  struct Subproblem {
    RankedState best;
    Evidence evidence;
  };
  auto worse = [](const Subproblem& a, const Subproblem& b) { return ranks_before(b.best, a.best); };
  std::priority_queue<Subproblem, std::vector<Subproblem>, decltype(worse)> heap(worse);
  auto admissible = [&](const RankedState& r) { return !threshold || meets_threshold(r.log_prob, *threshold); };

  std::vector<RankedState> out;
  if (limit && *limit == 0) return out;
  Evidence root = free_evidence(num_vars);
  if (auto best = solve(root); best && admissible(*best)) heap.push({std::move(*best), std::move(root)});

  while (!heap.empty()) {
    Subproblem top = heap.top();
    heap.pop();
    const State& y = top.best.state;
    // Children: agree with y on the first q-1 free variables, disagree on the q-th.
    Evidence branch = top.evidence;
    for (std::size_t v = 0; v < num_vars; ++v) {
      if (top.evidence[v] >= 0) continue;
      branch[v] = y[v] ? 0 : 1;
      if (auto best = solve(branch); best && admissible(*best)) heap.push({std::move(*best), branch});
      branch[v] = y[v] ? 1 : 0;
    }
    out.push_back(std::move(top.best));
    if (limit && out.size() >= *limit) break;
  }
  return out;
}

}  // namespace nesykc
