#pragma once

// JSON formats for theories and probability vectors.
//
// Theory: {"language": ..., "variables": [...], "payload": {...}}
//   card:   {"n": int, "op": "le"|"ge"|"eq", "l": int}
//   graphs: {"vertices": [...], "edges": [[u, v, varname], ...]} for edge-based
//           languages; vertex-based languages name each vertex after its
//           variable, so edges are [u, v] and "vertices" may be omitted.
//   hex:    adds "exclusions": [[u, v], ...]
// Probabilities: {"probs": {varname: float, ...}}

#include <string>
#include <string_view>

#include "nesykc/core.hpp"

namespace nesykc {

Theory parse_theory_json(std::string_view text);
std::string write_theory_json(const Theory& theory);

ProbabilityVector parse_probs_json(std::string_view text, const VariableSet& vars);
std::string write_probs_json(const VariableSet& vars, const ProbabilityVector& p);

}  // namespace nesykc
