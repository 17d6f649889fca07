#pragma once

// Probabilistic queries on compiled circuits: one bottom-up sweep each for
// PQE, EQE and MPE, plus threshold and top-k enumeration.

#include <optional>
#include <vector>

#include "nesykc/circuit.hpp"
#include "nesykc/ranked.hpp"

namespace nesykc {

struct QueryStats {
  std::size_t wire_visits = 0;  // child links read by the main sweep(s)
  std::size_t passes = 0;       // bottom-up sweeps over the circuit
  bool smoothed = false;        // the input had to be smoothed first
};

struct MpeResult {
  State state;
  double probability = 0.0;
  double log_probability = 0.0;
};

// Requires decomposable and deterministic.
double pqe(const Circuit& c, const ProbabilityVector& p, QueryStats* stats = nullptr);

// Shannon entropy (nats) of P(.|p) conditioned on the circuit. Requires
// decomposable and deterministic; smooths internally when needed.
double eqe(const Circuit& c, const ProbabilityVector& p, QueryStats* stats = nullptr);

// Requires decomposable. Ties go to the lexicographically smallest state.
MpeResult mpe(const Circuit& c, const ProbabilityVector& p, QueryStats* stats = nullptr);
std::optional<MpeResult> mpe(const Circuit& c, const ProbabilityVector& p, const Evidence& evidence,
                             QueryStats* stats = nullptr);

// All models with P(y|p) >= threshold, best first. Requires decomposable and
// deterministic.
std::vector<RankedState> thresh_enum(const Circuit& c, const ProbabilityVector& p, double threshold,
                                     QueryStats* stats = nullptr);

// First min(k, #models) models, best first.
std::vector<RankedState> top_k(const Circuit& c, const ProbabilityVector& p, std::size_t k,
                               QueryStats* stats = nullptr);

}  // namespace nesykc
