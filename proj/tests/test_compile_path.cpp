#include <algorithm>

#include "doctest.h"
#include "nesykc/compile.hpp"
#include "nesykc/queries.hpp"
#include "support/circuits.hpp"
#include "support/fixtures.hpp"

using namespace nesykc;
using namespace nesykc::testing;

namespace {

Theory path_theory(std::size_t vertices, std::vector<Edge> edges) {
  DirectedGraphPayload g;
  g.vertices = names("n", vertices);
  g.edges = std::move(edges);
  g.labels.resize(g.edges.size());
  std::iota(g.labels.begin(), g.labels.end(), 0);
  auto vars = VariableSet::numbered(g.edges.size());
  return Theory::directed(Language::AsPath, std::move(vars), std::move(g));
}

// reach[u][v]: a directed path (possibly empty) leads from u to v.
std::vector<std::vector<bool>> reachability(const DirectedGraphPayload& g) {
  const auto n = g.vertices.size();
  std::vector<std::vector<bool>> reach(n, std::vector<bool>(n, false));
  for (std::size_t v = 0; v < n; ++v) reach[v][v] = true;
  for (const auto& e : g.edges) reach[e.from][e.to] = true;
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      if (reach[i][k])
        for (std::size_t j = 0; j < n; ++j)
          if (reach[k][j]) reach[i][j] = true;
  return reach;
}

bool is_topological_edge_order(const DirectedGraphPayload& g, const std::vector<std::size_t>& order) {
  if (order.size() != g.edges.size()) return false;
  std::vector<std::size_t> pos(order.size(), order.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (order[i] >= order.size() || pos[order[i]] != order.size()) return false;
    pos[order[i]] = i;
  }
  const auto reach = reachability(g);
  for (std::size_t a = 0; a < g.edges.size(); ++a)
    for (std::size_t b = 0; b < g.edges.size(); ++b)
      if (a != b && reach[g.edges[a].to][g.edges[b].from] && pos[a] > pos[b]) return false;
  return true;
}

std::vector<std::vector<std::size_t>> sources_and_sinks(const DirectedGraphPayload& g) {
  std::vector<std::size_t> in(g.vertices.size(), 0), out(g.vertices.size(), 0);
  for (const auto& e : g.edges) {
    ++out[e.from];
    ++in[e.to];
  }
  std::vector<std::size_t> sources, sinks;
  for (std::size_t v = 0; v < g.vertices.size(); ++v) {
    if (in[v] == 0 && out[v] > 0) sources.push_back(v);
    if (out[v] == 0 && in[v] > 0) sinks.push_back(v);
  }
  return {sources, sinks};
}

Theory grid(std::size_t side) {
  std::vector<Edge> edges;
  auto id = [side](std::size_t r, std::size_t c) { return r * side + c; };
  for (std::size_t r = 0; r < side; ++r)
    for (std::size_t c = 0; c < side; ++c) {
      if (c + 1 < side) edges.push_back({id(r, c), id(r, c + 1)});
      if (r + 1 < side) edges.push_back({id(r, c), id(r + 1, c)});
      if (r + 1 < side && c + 1 < side) edges.push_back({id(r, c), id(r + 1, c + 1)});
    }
  return path_theory(side * side, std::move(edges));
}

}  // namespace

TEST_CASE("example DAG compiles to exactly its three paths") {
  const Circuit c = compile_aspath(example_dag());
  CHECK(circuit_models(c) == std::vector<State>{state_of(6, {1, 4, 5}), state_of(6, {0, 3}), state_of(6, {0, 2, 4, 5})});
  const auto r = check_structure(c);
  CHECK(r.is_decomposable);
  CHECK(r.is_deterministic == Tristate::Yes);
  REQUIRE(r.obdd_order.has_value());
  CHECK(*r.obdd_order == std::vector<std::size_t>{0, 1, 2, 3, 4, 5});
}

TEST_CASE("normalize_graph leaves the example DAG alone") {
  const Theory t = normalize_graph(example_dag());
  const auto& g = t.directed_payload();
  const Theory original = example_dag();
  const auto& before = original.directed_payload();
  CHECK(g.edges.size() == before.edges.size());
  for (std::size_t i = 0; i < g.edges.size(); ++i) {
    CHECK(g.vertices[g.edges[i].from] == before.vertices[before.edges[i].from]);
    CHECK(g.vertices[g.edges[i].to] == before.vertices[before.edges[i].to]);
  }
  CHECK(g.labels == before.labels);
}

TEST_CASE("two sources merge into parallel edges") {
  const Theory t = path_theory(3, {{0, 2}, {1, 2}});
  const Theory n = normalize_graph(t);
  const auto ends = sources_and_sinks(n.directed_payload());
  CHECK(ends[0].size() == 1);
  CHECK(ends[1].size() == 1);
  const auto& g = n.directed_payload();
  CHECK(g.edges[0].from == g.edges[1].from);
  CHECK(g.edges[0].to == g.edges[1].to);
  CHECK(oracle_models(n) == oracle_models(t));
  CHECK(oracle_models(t).size() == 2);
  CHECK(circuit_models(compile_aspath(t)) == oracle_models(t));
}

TEST_CASE("merging preserves the model set on random DAGs") {
  Rng rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const Theory t = random_aspath(rng, 10);
    const Theory n = normalize_graph(t);
    const auto ends = sources_and_sinks(n.directed_payload());
    CHECK(ends[0].size() == 1);
    CHECK(ends[1].size() == 1);
    CHECK(oracle_models(n) == oracle_models(t));
  }
}

TEST_CASE("topological edge orders") {
  CHECK(topo_edge_order(example_dag()) == std::vector<std::size_t>{0, 1, 2, 3, 4, 5});
  // Reverse the edge list: the order must still be topological.
  const Theory original = example_dag();
  DirectedGraphPayload g = original.directed_payload();
  std::reverse(g.edges.begin(), g.edges.end());
  const Theory rev = path_theory(5, g.edges);
  const auto order = topo_edge_order(rev);
  CHECK(is_topological_edge_order(rev.directed_payload(), order));
  CHECK(order != std::vector<std::size_t>{0, 1, 2, 3, 4, 5});

  Rng rng(8);
  for (int trial = 0; trial < 40; ++trial) {
    const Theory t = random_aspath(rng, 8);
    CHECK(is_topological_edge_order(t.directed_payload(), topo_edge_order(t)));
  }
}

TEST_CASE("a single edge compiles to its literal") {
  const Circuit c = compile_aspath(path_theory(2, {{0, 1}}));
  CHECK(circuit_models(c) == std::vector<State>{state_of(1, {0})});
  CHECK(c.size() == 1);
  CHECK(c.kind(c.root()) == NodeKind::Literal);
}

TEST_CASE("random DAGs match the oracle") {
  Rng rng(30);
  for (int trial = 0; trial < 60; ++trial) {
    const Theory t = random_aspath(rng, 10);
    const Circuit c = compile_aspath(t);
    const auto models = circuit_models(c);
    CHECK(models == oracle_models(t));
    CHECK(std::find(models.begin(), models.end(), State(t.vars().size())) == models.end());
    const auto r = check_structure(c);
    CHECK(r.is_decomposable);
    CHECK(r.is_deterministic == Tristate::Yes);
    CHECK(r.obdd_order.has_value());
    CHECK(c.certificate().decomposable);
    CHECK(c.certificate().deterministic);
  }
}

TEST_CASE("every model is a contiguous walk in topological edge order") {
  Rng rng(31);
  for (int trial = 0; trial < 30; ++trial) {
    const Theory t = normalize_graph(random_aspath(rng, 10));
    const auto& g = t.directed_payload();
    const auto order = topo_edge_order(t);
    const auto ends = sources_and_sinks(g);
    for (const auto& y : oracle_models(t)) {
      std::vector<std::size_t> walk;
      for (auto e : order)
        if (y[g.labels[e]]) walk.push_back(e);
      REQUIRE_FALSE(walk.empty());
      CHECK(g.edges[walk.front()].from == ends[0][0]);
      CHECK(g.edges[walk.back()].to == ends[1][0]);
      for (std::size_t i = 1; i < walk.size(); ++i) CHECK(g.edges[walk[i - 1]].to == g.edges[walk[i]].from);
    }
  }
}

TEST_CASE("wire count stays within 6 |V| |E|") {
  Rng rng(100);
  for (int trial = 0; trial < 30; ++trial) {
    const auto n = uniform_int(rng, 4, 30);
    auto edges = random_dag_edges(rng, n, uniform_real(rng, 0.1, 0.6));
    if (edges.size() > 100) edges.resize(100);
    if (edges.empty()) edges.push_back({0, 1});
    const Theory t = path_theory(n, std::move(edges));
    const Circuit c = compile_aspath(t);
    CHECK(c.wire_count() <= 6 * n * t.vars().size());
  }
}

TEST_CASE("12 by 12 grid compiles within the size bound") {
  const Theory t = grid(12);
  const Circuit c = compile_aspath(t);
  CHECK(c.wire_count() <= 6 * 144 * t.vars().size());
  const auto r = check_structure(c);
  CHECK(r.is_decomposable);
  CHECK(r.obdd_order.has_value());
  CHECK(pqe(c, ProbabilityVector::uniform(t.vars().size())) > 0.0);
}

TEST_CASE("untrimmed compilation keeps the models") {
  CompileOptions raw;
  raw.trim = false;
  Rng rng(12);
  for (int trial = 0; trial < 20; ++trial) {
    const Theory t = random_aspath(rng, 9);
    CHECK(circuit_models(compile_aspath(t, raw)) == oracle_models(t));
  }
}

TEST_CASE("cycles are rejected") {
  DirectedGraphPayload g;
  g.vertices = {"a", "b"};
  g.edges = {{0, 1}, {1, 0}};
  g.labels = {0, 1};
  CHECK_THROWS_AS(Theory::directed(Language::AsPath, VariableSet::numbered(2), g), Error);
}
