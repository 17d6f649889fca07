#pragma once

// MPE and threshold enumeration for matching theories through maximum weight
// matching on general graphs (Edmonds' blossom algorithm).

#include <cstdint>
#include <optional>
#include <vector>

#include "nesykc/queries.hpp"

namespace nesykc {

struct WeightedEdge {
  std::size_t u = 0;
  std::size_t v = 0;
  std::int64_t weight = 0;
};

// mate[v] is the vertex matched to v, or -1. Maximizes the total weight (not
// the cardinality); edges of weight <= 0 are never needed.
std::vector<long> max_weight_matching(std::size_t num_vertices, const std::vector<WeightedEdge>& edges);

// Real weights, scaled to integers with 40 fractional bits. Returns the
// selected edge indices in ascending order.
std::vector<std::size_t> max_weight_matching(std::size_t num_vertices, const std::vector<Edge>& edges,
                                             const std::vector<double>& weights);

// Best matching consistent with the forced edges. Among optima (after rounding
// logits to 40 fractional bits) the edge set with the smallest index sum wins,
// so a single-edge optimum is the lowest-index one. Throws InvalidInput when
// forced-1 edges share a vertex.
MpeResult match_mpe(const Theory& theory, const ProbabilityVector& p, const Evidence& forced = {});
std::optional<MpeResult> try_match_mpe(const Theory& theory, const ProbabilityVector& p, const Evidence& forced);

std::vector<RankedState> match_thresh_enum(const Theory& theory, const ProbabilityVector& p, double threshold);
std::vector<RankedState> match_top_k(const Theory& theory, const ProbabilityVector& p, std::size_t k);

}  // namespace nesykc
