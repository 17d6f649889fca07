#pragma once

// Small hand-built theories shared by the unit tests.

#include "nesykc/core.hpp"

namespace nesykc::testing {

// s -Y1-> a, s -Y2-> b, a -Y3-> b, a -Y4-> t, b -Y5-> c, c -Y6-> t
inline Theory example_dag() {
  DirectedGraphPayload g;
  g.vertices = {"s", "a", "b", "c", "t"};
  g.edges = {{0, 1}, {0, 2}, {1, 2}, {1, 4}, {2, 3}, {3, 4}};
  g.labels = {0, 1, 2, 3, 4, 5};
  return Theory::directed(Language::AsPath, VariableSet::numbered(6), std::move(g));
}

inline ProbabilityVector dag_probs() { return ProbabilityVector({0.9, 0.2, 0.6, 0.3, 0.8, 0.7}); }

// Edges e1..e_k along a line of k+1 vertices.
inline Theory path_match(std::size_t k) {
  UndirectedGraphPayload g;
  for (std::size_t v = 0; v <= k; ++v) g.vertices.push_back("x" + std::to_string(v));
  for (std::size_t i = 0; i < k; ++i) {
    g.edges.push_back({i, i + 1});
    g.labels.push_back(i);
  }
  return Theory::match(VariableSet::numbered(k, "e"), std::move(g));
}

inline Theory triangle_match() {
  UndirectedGraphPayload g;
  g.vertices = {"a", "b", "c"};
  g.edges = {{0, 1}, {1, 2}, {0, 2}};
  g.labels = {0, 1, 2};
  return Theory::match(VariableSet::numbered(3, "e"), std::move(g));
}

// Vertex-based theory whose variables are named after the vertices.
inline Theory vertex_theory(Language lang, std::vector<std::string> vertices, std::vector<Edge> edges) {
  DirectedGraphPayload g;
  g.vertices = vertices;
  g.edges = std::move(edges);
  for (std::size_t v = 0; v < vertices.size(); ++v) g.labels.push_back(v);
  return Theory::directed(lang, VariableSet(std::move(vertices)), std::move(g));
}

inline State state_of(std::size_t size, std::initializer_list<std::size_t> ones) { return State::from_indices(size, ones); }

}  // namespace nesykc::testing
