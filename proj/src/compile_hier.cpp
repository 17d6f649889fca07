#include <algorithm>
#include <charconv>
#include <sstream>
#include <vector>

#include "nesykc/compile.hpp"

namespace nesykc {

namespace {

struct Tree {
  std::size_t root = 0;
  std::vector<std::vector<std::size_t>> children;
  std::vector<std::size_t> postorder;
};

Tree rooted_tree(const Theory& theory) {
  if (!theory.hierarchy_is_tree()) fail(ErrorKind::InvalidInput, "hierarchy is not a rooted tree");
  const auto& g = theory.directed_payload();
  Tree tree;
  const auto n = g.vertices.size();
  tree.children.resize(n);
  std::vector<bool> has_parent(n, false);
  for (const auto& e : g.edges) {
    tree.children[e.from].push_back(e.to);
    has_parent[e.to] = true;
  }
  tree.root = static_cast<std::size_t>(std::find(has_parent.begin(), has_parent.end(), false) - has_parent.begin());
  std::vector<std::pair<std::size_t, bool>> stack{{tree.root, false}};
  while (!stack.empty()) {
    auto [v, expanded] = stack.back();
    stack.pop_back();
    if (expanded) {
      tree.postorder.push_back(v);
      continue;
    }
    stack.push_back({v, true});
    for (auto it = tree.children[v].rbegin(); it != tree.children[v].rend(); ++it) stack.push_back({*it, false});
  }
  return tree;
}

// zero[v]: the whole subtree of v unselected.
std::vector<NodeId> zero_nodes(CircuitBuilder& b, const Tree& tree, const std::vector<std::size_t>& labels) {
  std::vector<NodeId> zero(tree.children.size());
  for (auto v : tree.postorder) {
    std::vector<NodeId> parts{b.literal(labels[v], false)};
    for (auto c : tree.children[v]) parts.push_back(zero[c]);
    zero[v] = b.conjunction(parts);
  }
  return zero;
}

}  // namespace

// free[v] accepts the closures of v's subtree:
//   free[v] = OR(AND(v, free[c] for children c), zero[v])
Circuit compile_tree_hier(const Theory& theory, const CompileOptions& options) {
  if (theory.language() != Language::TreeHier && theory.language() != Language::Hier)
    fail(ErrorKind::InvalidInput, "compile_tree_hier expects a tree-shaped hierarchy");
  const Tree tree = rooted_tree(theory);
  const auto& labels = theory.directed_payload().labels;
  CircuitBuilder b(theory.vars());
  const auto zero = zero_nodes(b, tree, labels);
  std::vector<NodeId> free(tree.children.size());
  for (auto v : tree.postorder) {
    std::vector<NodeId> on{b.literal(labels[v], true)};
    for (auto c : tree.children[v]) on.push_back(free[c]);
    free[v] = b.disjunction({b.conjunction(on), zero[v]});
  }
  Circuit raw = std::move(b).build(free[tree.root], {true, true, true});
  return options.trim ? trim(raw) : raw;
}

// Models are the empty state and, for each v, the path from the root to v.
// chain[v] accepts the subtree states that select v plus one downward path
// starting at v. For the children c_1..c_m of v, pick[j] selects at most one
// of c_j..c_m's subtrees:
//   pick[j] = OR(AND(chain[c_j], zero[c_{j+1}..c_m]), AND(zero[c_j], pick[j+1]))
Circuit compile_te_hier(const Theory& theory, const CompileOptions& options) {
  if (theory.language() != Language::TeHier) fail(ErrorKind::InvalidInput, "compile_te_hier expects a te-hier theory");
  const Tree tree = rooted_tree(theory);
  const auto& labels = theory.directed_payload().labels;
  CircuitBuilder b(theory.vars());
  const auto zero = zero_nodes(b, tree, labels);
  // Literals are kept as direct children of each branch so the decision
  // variable of every OR node is visible to the structure checker.
  std::vector<NodeId> pick_of(tree.children.size());
  auto chain_parts = [&](std::size_t c, NodeId rest) {
    std::vector<NodeId> parts{b.literal(labels[c], true)};
    if (pick_of[c] != b.constant(true)) parts.push_back(pick_of[c]);
    if (rest != b.constant(true)) parts.push_back(rest);
    return b.conjunction(parts);
  };
  auto zero_parts = [&](std::size_t c, NodeId rest) {
    std::vector<NodeId> parts{b.literal(labels[c], false)};
    for (auto g : tree.children[c]) parts.push_back(zero[g]);
    if (rest != b.constant(true)) parts.push_back(rest);
    return b.conjunction(parts);
  };
  for (auto v : tree.postorder) {
    const auto& kids = tree.children[v];
    NodeId pick = b.constant(true);
    NodeId suffix_zero = b.constant(true);
    for (std::size_t j = kids.size(); j-- > 0;) {
      const auto c = kids[j];
      pick = b.disjunction({chain_parts(c, suffix_zero), zero_parts(c, pick)});
      suffix_zero = suffix_zero == b.constant(true) ? zero[c] : b.conjunction({zero[c], suffix_zero});
    }
    pick_of[v] = pick;
  }
  const NodeId root = b.disjunction({chain_parts(tree.root, b.constant(true)), zero[tree.root]});
  Circuit raw = std::move(b).build(root, {true, true, true});
  return options.trim ? trim(raw) : raw;
}

// ---------------------------------------------------------------- 2-Horn CNF

Cnf hex_2horn(const Theory& theory) {
  if (theory.language() != Language::Hier && theory.language() != Language::Hex &&
      theory.language() != Language::TreeHier)
    fail(ErrorKind::InvalidInput, "2-Horn emission expects a hierarchy or hex theory");
  Cnf cnf;
  cnf.num_vars = theory.num_vars();
  // parent or not child
  for (auto [parent, child] : theory.implications())
    cnf.clauses.push_back({static_cast<int>(parent) + 1, -(static_cast<int>(child) + 1)});
  for (auto [a, b] : theory.exclusions())
    cnf.clauses.push_back({-(static_cast<int>(a) + 1), -(static_cast<int>(b) + 1)});
  return cnf;
}

std::string write_dimacs(const Cnf& cnf, const VariableSet* names) {
  std::ostringstream out;
  if (names)
    for (std::size_t v = 0; v < names->size(); ++v) out << "c var " << v + 1 << ' ' << names->name(v) << '\n';
  out << "p cnf " << cnf.num_vars << ' ' << cnf.clauses.size() << '\n';
  for (const auto& clause : cnf.clauses) {
    for (int lit : clause) out << lit << ' ';
    out << "0\n";
  }
  return out.str();
}

Cnf parse_dimacs(std::string_view text) {
  Cnf cnf;
  bool header = false;
  std::size_t expected = 0;
  std::vector<int> clause;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream words(line);
    std::string w;
    if (!(words >> w) || w == "c") continue;
    if (w == "p") {
      std::string fmt;
      long long vars = -1, clauses = -1;
      if (!(words >> fmt >> vars >> clauses) || fmt != "cnf" || vars < 0 || clauses < 0)
        fail(ErrorKind::InvalidInput, "malformed DIMACS header");
      cnf.num_vars = static_cast<std::size_t>(vars);
      expected = static_cast<std::size_t>(clauses);
      header = true;
      continue;
    }
    if (!header) fail(ErrorKind::InvalidInput, "DIMACS clause before header");
    do {
      int lit = 0;
      auto [ptr, ec] = std::from_chars(w.data(), w.data() + w.size(), lit);
      if (ec != std::errc() || ptr != w.data() + w.size()) fail(ErrorKind::InvalidInput, "malformed DIMACS literal");
      if (lit == 0) {
        cnf.clauses.push_back(std::move(clause));
        clause.clear();
      } else {
        if (static_cast<std::size_t>(std::abs(lit)) > cnf.num_vars)
          fail(ErrorKind::InvalidInput, "DIMACS literal out of range");
        clause.push_back(lit);
      }
    } while (words >> w);
  }
  if (!header) fail(ErrorKind::InvalidInput, "missing DIMACS header");
  if (!clause.empty() || cnf.clauses.size() != expected)
    fail(ErrorKind::InvalidInput, "DIMACS clause count does not match header");
  return cnf;
}

bool cnf_satisfied(const Cnf& cnf, const State& y) {
  if (y.size() != cnf.num_vars) fail(ErrorKind::InvalidInput, "state dimension does not match CNF");
  for (const auto& clause : cnf.clauses) {
    bool sat = false;
    for (int lit : clause) {
      const auto v = static_cast<std::size_t>(std::abs(lit)) - 1;
      if (y[v] == (lit > 0)) {
        sat = true;
        break;
      }
    }
    if (!sat) return false;
  }
  return true;
}

// ---------------------------------------------------------------- dispatch

Circuit compile(const Theory& theory, const CompileOptions& options) {
  switch (theory.language()) {
    case Language::Card: return compile_card(theory, options);
    case Language::AsPath: return compile_aspath(theory, options);
    case Language::TreeHier: return compile_tree_hier(theory, options);
    case Language::TeHier: return compile_te_hier(theory, options);
    case Language::Hier:
    case Language::Hex:
      fail(ErrorKind::Intractable,
           std::string(language_name(theory.language())) +
               " theories are not compiled to circuits: PQE is #P-hard on DAG hierarchies; emit 2-Horn CNF instead");
    case Language::SPath:
      fail(ErrorKind::Intractable, "spath theories are not compiled: simple-path reasoning on cyclic graphs is intractable");
    case Language::Match:
      fail(ErrorKind::Intractable, "match theories cannot be compiled to DNNF");
  }
  fail(ErrorKind::Intractable, "unsupported language");
}

}  // namespace nesykc
