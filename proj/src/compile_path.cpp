#include <algorithm>
#include <queue>
#include <vector>

#include "nesykc/compile.hpp"

namespace nesykc {

namespace {

void require_aspath(const Theory& t, const char* what) {
  if (t.language() != Language::AsPath) fail(ErrorKind::InvalidInput, std::string(what) + " expects an aspath theory");
}

}  // namespace

Theory normalize_graph(const Theory& theory) {
  require_aspath(theory, "normalize_graph");
  const auto& g = theory.directed_payload();
  if (g.edges.empty()) fail(ErrorKind::Unsatisfiable, "path graph has no edges: source and sink coincide");
  const auto n = g.vertices.size();
  std::vector<std::size_t> in(n, 0), out(n, 0);
  for (const auto& e : g.edges) {
    ++out[e.from];
    ++in[e.to];
  }
  // Isolated vertices carry no edge and disappear.
  std::size_t source = n, sink = n;
  for (std::size_t v = 0; v < n; ++v) {
    if (in[v] == 0 && out[v] > 0 && source == n) source = v;
    if (out[v] == 0 && in[v] > 0 && sink == n) sink = v;
  }
  std::vector<std::size_t> rename(n, n);
  DirectedGraphPayload merged;
  for (std::size_t v = 0; v < n; ++v) {
    if (in[v] == 0 && out[v] == 0) continue;
    const bool extra_source = in[v] == 0 && v != source;
    const bool extra_sink = out[v] == 0 && v != sink;
    if (extra_source || extra_sink) continue;
    rename[v] = merged.vertices.size();
    merged.vertices.push_back(g.vertices[v]);
  }
  for (std::size_t v = 0; v < n; ++v) {
    if (rename[v] != n || (in[v] == 0 && out[v] == 0)) continue;
    rename[v] = in[v] == 0 ? rename[source] : rename[sink];
  }
  merged.labels = g.labels;
  for (const auto& e : g.edges) merged.edges.push_back({rename[e.from], rename[e.to]});
  return Theory::directed(Language::AsPath, theory.vars(), std::move(merged), true);
}

std::vector<std::size_t> topo_edge_order(const Theory& theory) {
  require_aspath(theory, "topo_edge_order");
  const auto& g = theory.directed_payload();
  const auto n = g.vertices.size();
  // An edge becomes available once every edge entering its tail is placed.
  std::vector<std::size_t> waiting(n, 0);
  std::vector<std::vector<std::size_t>> leaving(n);
  for (std::size_t i = 0; i < g.edges.size(); ++i) {
    ++waiting[g.edges[i].to];
    leaving[g.edges[i].from].push_back(i);
  }
  std::priority_queue<std::size_t, std::vector<std::size_t>, std::greater<>> ready;
  for (std::size_t v = 0; v < n; ++v)
    if (waiting[v] == 0)
      for (auto i : leaving[v]) ready.push(i);
  std::vector<std::size_t> order;
  order.reserve(g.edges.size());
  while (!ready.empty()) {
    const auto i = ready.top();
    ready.pop();
    order.push_back(i);
    const auto head = g.edges[i].to;
    if (--waiting[head] == 0)
      for (auto j : leaving[head]) ready.push(j);
  }
  if (order.size() != g.edges.size()) fail(ErrorKind::InvalidInput, "path graph has a cycle");
  return order;
}

// C(v, i) accepts the assignments of the first i edges (in topological order)
// that form a path from the source to v:
//   C(v, 1)   = Y_1 if e_1 = (s, v); not Y_1 if v = s; FALSE otherwise
//   C(v, i+1) = OR(AND(Y_{i+1}, C(u, i)), AND(not Y_{i+1}, C(v, i)))  if e_{i+1} = (u, v)
//             = OR(AND(Y_{i+1}, FALSE), AND(not Y_{i+1}, C(v, i)))    otherwise
// The root is C(t, k).
Circuit compile_aspath(const Theory& theory, const CompileOptions& options) {
  require_aspath(theory, "compile_aspath");
  const Theory normal = normalize_graph(theory);
  const auto order = topo_edge_order(normal);
  const auto& g = normal.directed_payload();
  const auto n = g.vertices.size();
  const auto k = order.size();

  std::vector<std::size_t> in(n, 0), out(n, 0);
  for (const auto& e : g.edges) {
    ++out[e.from];
    ++in[e.to];
  }
  std::size_t s = 0, t = 0;
  for (std::size_t v = 0; v < n; ++v) {
    if (in[v] == 0) s = v;
    if (out[v] == 0) t = v;
  }

  // needed[i][v]: C(v, i+1) is reachable from the root.
  std::vector<std::vector<char>> needed(k, std::vector<char>(n, 0));
  needed[k - 1][t] = 1;
  for (std::size_t i = k - 1; i >= 1; --i) {
    const auto& e = g.edges[order[i]];
    for (std::size_t v = 0; v < n; ++v) {
      if (!needed[i][v]) continue;
      needed[i - 1][v] = 1;
      if (e.to == v) needed[i - 1][e.from] = 1;
    }
  }

  CircuitBuilder b(theory.vars());
  const NodeId bottom = b.constant(false);
  const NodeId top = b.constant(true);
  std::vector<NodeId> prev(n, bottom), cur(n, bottom);
  {
    const auto& e = g.edges[order[0]];
    const auto y = g.labels[order[0]];
    for (std::size_t v = 0; v < n; ++v) {
      if (!needed[0][v]) continue;
      if (v == s)
        cur[v] = b.decision(y, bottom, top);
      else if (e.from == s && e.to == v)
        cur[v] = b.decision(y, top, bottom);
      else
        cur[v] = b.decision(y, bottom, bottom);
    }
  }
  for (std::size_t i = 1; i < k; ++i) {
    std::swap(prev, cur);
    const auto& e = g.edges[order[i]];
    const auto y = g.labels[order[i]];
    for (std::size_t v = 0; v < n; ++v) {
      if (!needed[i][v]) continue;
      cur[v] = b.decision(y, e.to == v ? prev[e.from] : bottom, prev[v]);
    }
  }
  Circuit raw = std::move(b).build(cur[t], {true, true, false});
  return options.trim ? trim(raw) : raw;
}

}  // namespace nesykc
