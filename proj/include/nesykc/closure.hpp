#pragma once

// MPE and threshold enumeration for hierarchical theories through maximum
// weight closure, solved as a minimum cut.

#include <optional>
#include <vector>

#include "nesykc/queries.hpp"

namespace nesykc {

class FlowNetwork {
 public:
  struct Arc {
    std::size_t from = 0;
    std::size_t to = 0;
    double capacity = 0.0;
  };

  FlowNetwork(std::size_t num_nodes, std::size_t source, std::size_t sink);

  std::size_t num_nodes() const noexcept { return num_nodes_; }
  std::size_t source() const noexcept { return source_; }
  std::size_t sink() const noexcept { return sink_; }
  const std::vector<Arc>& arcs() const noexcept { return arcs_; }

  std::size_t add_arc(std::size_t from, std::size_t to, double capacity);
  void set_capacity(std::size_t arc, double capacity);

 private:
  std::size_t num_nodes_;
  std::size_t source_;
  std::size_t sink_;
  std::vector<Arc> arcs_;
};

struct FlowResult {
  double value = 0.0;
  // Nodes reachable from the source in the final residual network: the
  // smallest source side among all minimum cuts.
  std::vector<bool> source_side;
};

// Dinic's algorithm on real capacities; residuals below a relative 1e-12 count
// as saturated.
FlowResult max_flow(const FlowNetwork& net);

// Capacity of the cut (source_side, complement).
double cut_capacity(const FlowNetwork& net, const std::vector<bool>& source_side);

// Hierarchical theories under closure semantics: hier, tree-hier, and hex
// without exclusions.
bool closure_supported(const Theory& theory);

// Best closure consistent with the forced literals; ties prefer 0-assignments.
// Throws Unsatisfiable when no closure respects the forcing.
MpeResult closure_mpe(const Theory& theory, const ProbabilityVector& p, const Evidence& forced = {});
std::optional<MpeResult> try_closure_mpe(const Theory& theory, const ProbabilityVector& p, const Evidence& forced);

std::vector<RankedState> closure_thresh_enum(const Theory& theory, const ProbabilityVector& p, double threshold);
std::vector<RankedState> closure_top_k(const Theory& theory, const ProbabilityVector& p, std::size_t k);

}  // namespace nesykc
