#include "nesykc/core.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <set>

namespace nesykc {

// ---------------------------------------------------------------- variables

VariableSet::VariableSet(std::vector<std::string> names) : names_(std::move(names)) {
  if (names_.empty()) fail(ErrorKind::InvalidInput, "a variable set needs at least one variable");
  index_.reserve(names_.size());
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (names_[i].empty()) fail(ErrorKind::InvalidInput, "empty variable name");
    if (!index_.emplace(names_[i], i).second)
      fail(ErrorKind::InvalidInput, "duplicate variable name '" + names_[i] + "'");
  }
}

std::optional<std::size_t> VariableSet::find(std::string_view name) const {
  auto it = index_.find(std::string(name));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t VariableSet::index_of(std::string_view name) const {
  auto found = find(name);
  if (!found) fail(ErrorKind::InvalidInput, "unknown variable '" + std::string(name) + "'");
  return *found;
}

VariableSet VariableSet::numbered(std::size_t count, std::string_view prefix) {
  std::vector<std::string> names;
  names.reserve(count);
  for (std::size_t i = 1; i <= count; ++i) names.push_back(std::string(prefix) + std::to_string(i));
  return VariableSet(std::move(names));
}

// ---------------------------------------------------------------- states

State State::from_mask(std::size_t size, std::uint64_t mask) {
  State s(size);
  for (std::size_t i = 0; i < size && i < 64; ++i) s.bits_[i] = (mask >> i) & 1u;
  return s;
}

State State::from_indices(std::size_t size, std::initializer_list<std::size_t> ones) {
  State s(size);
  for (auto i : ones) s.bits_.at(i) = true;
  return s;
}

std::size_t State::count() const { return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), true)); }

std::vector<std::size_t> State::ones() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < bits_.size(); ++i)
    if (bits_[i]) out.push_back(i);
  return out;
}

// ---------------------------------------------------------------- languages

namespace {

constexpr std::pair<Language, std::string_view> kLanguageNames[] = {
    {Language::Card, "card"},     {Language::Hier, "hier"},     {Language::TreeHier, "tree-hier"},
    {Language::TeHier, "te-hier"}, {Language::Hex, "hex"},       {Language::AsPath, "aspath"},
    {Language::SPath, "spath"},   {Language::Match, "match"},
};

}  // namespace

std::string_view language_name(Language lang) {
  for (auto& [l, name] : kLanguageNames)
    if (l == lang) return name;
  return "?";
}

Language parse_language(std::string_view name) {
  for (auto& [l, n] : kLanguageNames)
    if (n == name) return l;
  fail(ErrorKind::InvalidInput, "unknown language '" + std::string(name) + "'");
}

bool is_vertex_based(Language lang) {
  return lang == Language::Hier || lang == Language::TreeHier || lang == Language::TeHier || lang == Language::Hex;
}

bool is_edge_based(Language lang) {
  return lang == Language::AsPath || lang == Language::SPath || lang == Language::Match;
}

// ---------------------------------------------------------------- theories

namespace {

std::vector<std::vector<std::size_t>> successors(std::size_t n, const std::vector<Edge>& edges) {
  std::vector<std::vector<std::size_t>> out(n);
  for (const auto& e : edges) out[e.from].push_back(e.to);
  return out;
}

bool is_acyclic(std::size_t n, const std::vector<Edge>& edges) {
  std::vector<std::size_t> indeg(n, 0);
  for (const auto& e : edges) ++indeg[e.to];
  auto succ = successors(n, edges);
  std::vector<std::size_t> ready;
  for (std::size_t v = 0; v < n; ++v)
    if (indeg[v] == 0) ready.push_back(v);
  std::size_t seen = 0;
  while (!ready.empty()) {
    auto v = ready.back();
    ready.pop_back();
    ++seen;
    for (auto w : succ[v])
      if (--indeg[w] == 0) ready.push_back(w);
  }
  return seen == n;
}

bool is_rooted_tree(std::size_t n, const std::vector<Edge>& edges) {
  if (edges.size() + 1 != n) return false;
  std::vector<std::size_t> indeg(n, 0);
  for (const auto& e : edges) ++indeg[e.to];
  std::size_t root = n;
  for (std::size_t v = 0; v < n; ++v) {
    if (indeg[v] == 0) {
      if (root != n) return false;
      root = v;
    } else if (indeg[v] != 1) {
      return false;
    }
  }
  if (root == n) return false;
  auto succ = successors(n, edges);
  std::vector<bool> seen(n, false);
  std::vector<std::size_t> stack{root};
  seen[root] = true;
  std::size_t count = 1;
  while (!stack.empty()) {
    auto v = stack.back();
    stack.pop_back();
    for (auto w : succ[v]) {
      if (seen[w]) return false;
      seen[w] = true;
      ++count;
      stack.push_back(w);
    }
  }
  return count == n;
}

void check_vertices(const std::vector<std::string>& vertices) {
  if (vertices.empty()) fail(ErrorKind::InvalidInput, "graph has no vertices");
  std::set<std::string> seen;
  for (const auto& v : vertices)
    if (!seen.insert(v).second) fail(ErrorKind::InvalidInput, "duplicate vertex '" + v + "'");
}

void check_edges(std::size_t n, const std::vector<Edge>& edges, bool directed, std::string_view what,
                 bool allow_parallel = false) {
  std::set<std::pair<std::size_t, std::size_t>> seen;
  for (const auto& e : edges) {
    if (e.from >= n || e.to >= n) fail(ErrorKind::InvalidInput, std::string(what) + " endpoint out of range");
    if (e.from == e.to) fail(ErrorKind::InvalidInput, std::string(what) + " self-loop");
    const std::pair<std::size_t, std::size_t> key = directed ? std::pair{e.from, e.to} : std::pair{std::min(e.from, e.to), std::max(e.from, e.to)};
    if (!seen.insert(key).second && !allow_parallel) fail(ErrorKind::InvalidInput, "duplicate " + std::string(what));
  }
}

void check_labels(const std::vector<std::size_t>& labels, std::size_t expected, std::size_t num_vars) {
  if (labels.size() != expected || labels.size() != num_vars)
    fail(ErrorKind::InvalidInput, "labelling is not a bijection onto the variables");
  std::vector<bool> used(num_vars, false);
  for (auto l : labels) {
    if (l >= num_vars || used[l]) fail(ErrorKind::InvalidInput, "labelling is not a bijection onto the variables");
    used[l] = true;
  }
}

}  // namespace

Theory::Theory(Language lang, VariableSet vars, Payload payload)
    : language_(lang), vars_(std::move(vars)), payload_(std::move(payload)) {}

Theory Theory::card(VariableSet vars, CardOp op, std::size_t bound) {
  if (vars.size() == 0) fail(ErrorKind::InvalidInput, "card theory needs variables");
  if (bound > vars.size()) fail(ErrorKind::InvalidInput, "card bound exceeds the number of variables");
  CardPayload payload{vars.size(), op, bound};
  return Theory(Language::Card, std::move(vars), payload);
}

Theory Theory::directed(Language lang, VariableSet vars, DirectedGraphPayload graph, bool allow_parallel_edges) {
  if (lang == Language::Card || lang == Language::Hex || lang == Language::Match)
    fail(ErrorKind::InvalidInput, "not a directed graph language: " + std::string(language_name(lang)));
  if (vars.size() == 0) fail(ErrorKind::InvalidInput, "theory needs variables");
  check_vertices(graph.vertices);
  const auto n = graph.vertices.size();
  check_edges(n, graph.edges, true, "edge", allow_parallel_edges);
  check_labels(graph.labels, is_vertex_based(lang) ? n : graph.edges.size(), vars.size());
  switch (lang) {
    case Language::Hier:
    case Language::AsPath:
      if (!is_acyclic(n, graph.edges))
        fail(ErrorKind::InvalidInput, std::string(language_name(lang)) + " graph must be acyclic");
      break;
    case Language::TreeHier:
    case Language::TeHier:
      if (!is_rooted_tree(n, graph.edges))
        fail(ErrorKind::InvalidInput, std::string(language_name(lang)) + " graph must be a rooted tree");
      break;
    default:
      break;
  }
  Theory t(lang, std::move(vars), std::move(graph));
  t.derive_constraints();
  return t;
}

Theory Theory::hex(VariableSet vars, DirectedGraphPayload hierarchy, std::vector<Edge> exclusions) {
  if (vars.size() == 0) fail(ErrorKind::InvalidInput, "theory needs variables");
  check_vertices(hierarchy.vertices);
  const auto n = hierarchy.vertices.size();
  check_edges(n, hierarchy.edges, true, "hierarchy edge");
  check_edges(n, exclusions, false, "exclusion edge");
  check_labels(hierarchy.labels, n, vars.size());
  if (!is_acyclic(n, hierarchy.edges)) fail(ErrorKind::InvalidInput, "hex hierarchy must be acyclic");
  Theory t(Language::Hex, std::move(vars), HexPayload{std::move(hierarchy), std::move(exclusions)});
  t.derive_constraints();
  return t;
}

Theory Theory::match(VariableSet vars, UndirectedGraphPayload graph) {
  if (vars.size() == 0) fail(ErrorKind::InvalidInput, "theory needs variables");
  check_vertices(graph.vertices);
  check_edges(graph.vertices.size(), graph.edges, false, "edge");
  check_labels(graph.labels, graph.edges.size(), vars.size());
  Theory t(Language::Match, std::move(vars), std::move(graph));
  t.derive_constraints();
  return t;
}

const DirectedGraphPayload& Theory::directed_payload() const {
  if (auto* hex = std::get_if<HexPayload>(&payload_)) return hex->hierarchy;
  return std::get<DirectedGraphPayload>(payload_);
}

bool Theory::hierarchy_is_tree() const {
  if (!is_vertex_based(language_)) return false;
  const auto& g = directed_payload();
  return is_rooted_tree(g.vertices.size(), g.edges);
}

void Theory::derive_constraints() {
  if (is_vertex_based(language_)) {
    const auto& g = directed_payload();
    for (const auto& e : g.edges) implications_.emplace_back(g.labels[e.from], g.labels[e.to]);
    if (language_ == Language::Hex) {
      for (const auto& e : hex_payload().exclusions) exclusions_.emplace_back(g.labels[e.from], g.labels[e.to]);
    } else if (language_ == Language::TeHier) {
      // Exclusive iff no vertex is reachable from both (reachability is reflexive).
      const auto n = g.vertices.size();
      auto succ = successors(n, g.edges);
      std::vector<std::vector<bool>> below(n, std::vector<bool>(n, false));
      for (std::size_t v = 0; v < n; ++v) {
        std::vector<std::size_t> stack{v};
        below[v][v] = true;
        while (!stack.empty()) {
          auto u = stack.back();
          stack.pop_back();
          for (auto w : succ[u])
            if (!below[v][w]) {
              below[v][w] = true;
              stack.push_back(w);
            }
        }
      }
      for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = a + 1; b < n; ++b) {
          bool common = false;
          for (std::size_t w = 0; w < n && !common; ++w) common = below[a][w] && below[b][w];
          if (!common) exclusions_.emplace_back(g.labels[a], g.labels[b]);
        }
    }
  }
}

// ---------------------------------------------------------------- probabilities

ProbabilityVector::ProbabilityVector(std::vector<double> probs) : probs_(std::move(probs)) {
  for (double p : probs_)
    if (!(p > 0.0 && p < 1.0)) fail(ErrorKind::InvalidInput, "probabilities must lie strictly between 0 and 1");
}

ProbabilityVector ProbabilityVector::uniform(std::size_t size, double value) {
  return ProbabilityVector(std::vector<double>(size, value));
}

double ProbabilityVector::logit(std::size_t i) const { return nesykc::logit(probs_.at(i)); }

double ProbabilityVector::log_weight(std::size_t i, bool value) const {
  return value ? std::log(probs_[i]) : std::log1p(-probs_[i]);
}

double logit(double p) { return std::log(p) - std::log1p(-p); }

double sigmoid(double x) { return x >= 0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x)); }

double log_probability(const ProbabilityVector& p, const State& y) {
  double total = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) total += p.log_weight(i, y[i]);
  return total;
}

bool log_tied(double a, double b) {
  if (a == b) return true;
  if (std::isinf(a) || std::isinf(b)) return false;
  return std::abs(a - b) <= kLogTieTolerance * std::max({1.0, std::abs(a), std::abs(b)});
}

bool meets_threshold(double log_prob, double threshold) {
  if (threshold <= 0.0) return true;
  const double lt = std::log(threshold);
  return log_prob >= lt - 1e-9 * std::max(1.0, std::abs(lt));
}

bool ranks_before(const RankedState& a, const RankedState& b) {
  if (a.log_prob != b.log_prob) return a.log_prob > b.log_prob;
  return a.state < b.state;
}

// ---------------------------------------------------------------- semantics

namespace {

// Selected edges form one simple path from a source of the graph to a sink.
template <class Bit>
bool is_total_simple_path(const DirectedGraphPayload& g, const std::vector<std::size_t>& in_degree,
                          const std::vector<std::size_t>& out_degree, const Bit& bit) {
  const auto n = g.vertices.size();
  std::vector<std::size_t> next_edge(n, g.edges.size());
  std::vector<std::size_t> sel_in(n, 0);
  std::size_t selected = 0;
  for (std::size_t i = 0; i < g.edges.size(); ++i) {
    if (!bit(g.labels[i])) continue;
    const auto& e = g.edges[i];
    if (next_edge[e.from] != g.edges.size()) return false;  // branching
    next_edge[e.from] = i;
    if (++sel_in[e.to] > 1) return false;
    ++selected;
  }
  if (selected == 0) return false;
  std::size_t start = n;
  for (std::size_t v = 0; v < n; ++v)
    if (next_edge[v] != g.edges.size() && in_degree[v] == 0) {
      start = v;
      break;
    }
  if (start == n) return false;
  std::vector<bool> visited(n, false);
  std::size_t v = start, walked = 0;
  visited[v] = true;
  while (next_edge[v] != g.edges.size()) {
    v = g.edges[next_edge[v]].to;
    if (visited[v]) return false;
    visited[v] = true;
    ++walked;
  }
  return walked == selected && out_degree[v] == 0;
}

template <class Bit>
bool satisfies_impl(const Theory& t, const std::vector<std::size_t>& in_degree,
                    const std::vector<std::size_t>& out_degree, const Bit& bit) {
  switch (t.language()) {
    case Language::Card: {
      const auto& c = t.card_payload();
      std::size_t ones = 0;
      for (std::size_t i = 0; i < c.n; ++i) ones += bit(i) ? 1 : 0;
      switch (c.op) {
        case CardOp::Le: return ones <= c.bound;
        case CardOp::Ge: return ones >= c.bound;
        case CardOp::Eq: return ones == c.bound;
      }
      return false;
    }
    case Language::Hier:
    case Language::TreeHier:
    case Language::TeHier:
    case Language::Hex:
      for (auto [parent, child] : t.implications())
        if (bit(child) && !bit(parent)) return false;
      for (auto [a, b] : t.exclusions())
        if (bit(a) && bit(b)) return false;
      return true;
    case Language::AsPath:
    case Language::SPath:
      return is_total_simple_path(t.directed_payload(), in_degree, out_degree, bit);
    case Language::Match: {
      const auto& g = t.undirected_payload();
      std::vector<bool> covered(g.vertices.size(), false);
      for (std::size_t i = 0; i < g.edges.size(); ++i) {
        if (!bit(g.labels[i])) continue;
        const auto& e = g.edges[i];
        if (covered[e.from] || covered[e.to]) return false;
        covered[e.from] = covered[e.to] = true;
      }
      return true;
    }
  }
  return false;
}

}  // namespace

static void degrees(const Theory& t, std::vector<std::size_t>& in, std::vector<std::size_t>& out) {
  if (t.language() != Language::AsPath && t.language() != Language::SPath) return;
  const auto& g = t.directed_payload();
  in.assign(g.vertices.size(), 0);
  out.assign(g.vertices.size(), 0);
  for (const auto& e : g.edges) {
    ++out[e.from];
    ++in[e.to];
  }
}

bool satisfies(const Theory& theory, const State& state) {
  if (state.size() != theory.num_vars()) fail(ErrorKind::InvalidInput, "state dimension does not match theory");
  std::vector<std::size_t> in, out;
  degrees(theory, in, out);
  return satisfies_impl(theory, in, out, [&](std::size_t i) { return state[i]; });
}

bool satisfies_mask(const Theory& theory, std::uint64_t mask) {
  if (theory.num_vars() > 64) fail(ErrorKind::InvalidInput, "mask evaluation needs at most 64 variables");
  std::vector<std::size_t> in, out;
  degrees(theory, in, out);
  return satisfies_impl(theory, in, out, [&](std::size_t i) { return ((mask >> i) & 1u) != 0; });
}

// ---------------------------------------------------------------- queries

std::string_view query_name(QueryKind kind) {
  switch (kind) {
    case QueryKind::Pqe: return "pqe";
    case QueryKind::Eqe: return "eqe";
    case QueryKind::Mpe: return "mpe";
    case QueryKind::TopK: return "top-k";
    case QueryKind::Thresh: return "thresh";
  }
  return "?";
}

QueryKind parse_query(std::string_view name) {
  for (auto k : {QueryKind::Pqe, QueryKind::Eqe, QueryKind::Mpe, QueryKind::TopK, QueryKind::Thresh})
    if (query_name(k) == name) return k;
  fail(ErrorKind::InvalidInput, "unknown query '" + std::string(name) + "'");
}

// ---------------------------------------------------------------- oracle

std::vector<State> oracle_models(const Theory& theory, std::size_t cap) {
  const auto k = theory.num_vars();
  if (k > cap || k > 62)
    fail(ErrorKind::CapExceeded,
         "oracle enumeration limited to " + std::to_string(std::min<std::size_t>(cap, 62)) + " variables");
  std::vector<std::size_t> in, out;
  degrees(theory, in, out);
  std::vector<State> models;
  const std::uint64_t total = std::uint64_t{1} << k;
  for (std::uint64_t lex = 0; lex < total; ++lex) {
    // y_1 is the most significant position of the lexicographic counter.
    auto bit = [&](std::size_t i) { return ((lex >> (k - 1 - i)) & 1u) != 0; };
    if (satisfies_impl(theory, in, out, bit)) {
      State s(k);
      for (std::size_t i = 0; i < k; ++i) s.set(i, bit(i));
      models.push_back(std::move(s));
    }
  }
  return models;
}

QueryResult oracle_query(const Theory& theory, const ProbabilityVector& p, QueryKind kind, const QueryParam& param,
                         std::size_t cap) {
  if (p.size() != theory.num_vars()) fail(ErrorKind::InvalidInput, "probability vector dimension mismatch");
  const auto models = oracle_models(theory, cap);
  std::vector<RankedState> ranked;
  ranked.reserve(models.size());
  for (const auto& m : models) ranked.push_back({m, log_probability(p, m)});

  QueryResult result;
  result.kind = kind;
  switch (kind) {
    case QueryKind::Pqe: {
      long double total = 0.0L;
      for (const auto& r : ranked) total += std::exp(static_cast<long double>(r.log_prob));
      result.value = static_cast<double>(total);
      break;
    }
    case QueryKind::Eqe: {
      if (ranked.empty()) fail(ErrorKind::Unsatisfiable, "entropy of an unsatisfiable theory is undefined");
      long double z = 0.0L;
      for (const auto& r : ranked) z += std::exp(static_cast<long double>(r.log_prob));
      const long double log_z = std::log(z);
      long double h = 0.0L;
      for (const auto& r : ranked) {
        const long double log_q = r.log_prob - log_z;
        h -= std::exp(log_q) * log_q;
      }
      result.value = static_cast<double>(h);
      break;
    }
    case QueryKind::Mpe: {
      if (ranked.empty()) fail(ErrorKind::Unsatisfiable, "MPE of an unsatisfiable theory is undefined");
      double best = -std::numeric_limits<double>::infinity();
      for (const auto& r : ranked) best = std::max(best, r.log_prob);
      // Models are in lexicographic order: the first tied one wins.
      for (const auto& r : ranked)
        if (log_tied(r.log_prob, best) || r.log_prob == best) {
          result.state = r.state;
          result.value = std::exp(r.log_prob);
          break;
        }
      break;
    }
    case QueryKind::TopK:
    case QueryKind::Thresh: {
      std::stable_sort(ranked.begin(), ranked.end(), ranks_before);
      if (kind == QueryKind::TopK) {
        if (ranked.size() > param.k) ranked.resize(param.k);
      } else {
        std::erase_if(ranked, [&](const RankedState& r) { return !meets_threshold(r.log_prob, param.threshold); });
      }
      result.states = std::move(ranked);
      break;
    }
  }
  return result;
}

}  // namespace nesykc
