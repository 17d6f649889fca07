#pragma once

// Query routing. Theories go to the cheapest exact route: circuit compilation
// for card, aspath, acyclic spath and tree-shaped hierarchies; min-cut for DAG
// hierarchies (and hex without exclusions); maximum weight matching for match.
// Queries without a tractable route throw Intractable.

#include "nesykc/circuit.hpp"

namespace nesykc {

QueryResult circuit_query(const Circuit& c, const ProbabilityVector& p, QueryKind kind, const QueryParam& param);
QueryResult route_query(const Theory& t, const ProbabilityVector& p, QueryKind kind, const QueryParam& param);

}  // namespace nesykc
