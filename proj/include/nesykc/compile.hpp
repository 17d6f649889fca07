#pragma once

// Compilers from the tractable constraint languages to d-DNNF circuits.

#include <string>
#include <vector>

#include "nesykc/circuit.hpp"

namespace nesykc {

struct CompileOptions {
  bool trim = true;
};

// Cardinality constraint sum(Y) op l, as decision nodes over (prefix length,
// count) cells; OBDD ordered by the natural variable order.
Circuit compile_card(const Theory& theory, const CompileOptions& options = {});

// Acyclic simple paths.
// Single source and single sink, by redirecting the edges of the other
// sources/sinks to the first one. Variable labelling is preserved.
Theory normalize_graph(const Theory& theory);
// order[i] = index of the edge placed at position i.
std::vector<std::size_t> topo_edge_order(const Theory& theory);
Circuit compile_aspath(const Theory& theory, const CompileOptions& options = {});

// Tree hierarchies (closure semantics) and tree exclusive hierarchies.
Circuit compile_tree_hier(const Theory& theory, const CompileOptions& options = {});
Circuit compile_te_hier(const Theory& theory, const CompileOptions& options = {});

// 2-Horn CNF of a hierarchy with optional exclusions.
struct Cnf {
  std::size_t num_vars = 0;
  std::vector<std::vector<int>> clauses;  // DIMACS literals, 1-based
};

Cnf hex_2horn(const Theory& theory);
std::string write_dimacs(const Cnf& cnf, const VariableSet* names = nullptr);
Cnf parse_dimacs(std::string_view text);
bool cnf_satisfied(const Cnf& cnf, const State& y);

// Dispatches on the theory language; throws Intractable for languages with no
// circuit compiler.
Circuit compile(const Theory& theory, const CompileOptions& options = {});

}  // namespace nesykc
