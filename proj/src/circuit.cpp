#include "nesykc/circuit.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <queue>
#include <sstream>

namespace nesykc {

// ---------------------------------------------------------------- builder

CircuitBuilder::CircuitBuilder(VariableSet vars) : vars_(std::move(vars)), literals_(2 * vars_.size()) {}

NodeId CircuitBuilder::push(Circuit::Node node, std::span<const NodeId> children) {
  const auto id = static_cast<NodeId>(nodes_.size());
  node.first_child = static_cast<std::uint32_t>(children_.size());
  node.child_count = static_cast<std::uint32_t>(children.size());
  for (auto ch : children) {
    if (ch >= id) fail(ErrorKind::InvalidInput, "circuit child must precede its parent");
    children_.push_back(ch);
  }
  nodes_.push_back(node);
  return id;
}

NodeId CircuitBuilder::constant(bool value) {
  auto& slot = constants_[value ? 1 : 0];
  if (!slot) slot = push({value ? NodeKind::True : NodeKind::False}, {});
  return *slot;
}

NodeId CircuitBuilder::literal(std::size_t var, bool positive) {
  if (var >= vars_.size()) fail(ErrorKind::InvalidInput, "literal variable out of range");
  auto& slot = literals_[2 * var + (positive ? 1 : 0)];
  if (!slot) {
    Circuit::Node n{NodeKind::Literal};
    n.var = static_cast<std::uint32_t>(var);
    n.positive = positive;
    slot = push(n, {});
  }
  return *slot;
}

NodeId CircuitBuilder::conjunction(std::span<const NodeId> children) {
  if (children.empty()) return constant(true);
  if (children.size() == 1) return children.front();
  return push({NodeKind::And}, children);
}

NodeId CircuitBuilder::disjunction(std::span<const NodeId> children) {
  if (children.empty()) return constant(false);
  if (children.size() == 1) return children.front();
  return push({NodeKind::Or}, children);
}

NodeId CircuitBuilder::decision(std::size_t var, NodeId if_true, NodeId if_false) {
  const NodeId hi = conjunction({literal(var, true), if_true});
  const NodeId lo = conjunction({literal(var, false), if_false});
  return disjunction({hi, lo});
}

Circuit CircuitBuilder::build(NodeId root, Certificate certificate) && {
  if (nodes_.empty() || root >= nodes_.size()) fail(ErrorKind::InvalidInput, "circuit root out of range");
  std::vector<bool> live(root + 1, false);
  live[root] = true;
  for (std::size_t i = root + 1; i-- > 0;) {
    if (!live[i]) continue;
    const auto& n = nodes_[i];
    for (std::uint32_t j = 0; j < n.child_count; ++j) live[children_[n.first_child + j]] = true;
  }
  Circuit c;
  c.vars_ = std::move(vars_);
  c.certificate_ = certificate;
  std::vector<NodeId> remap(root + 1, 0);
  for (std::size_t i = 0; i <= root; ++i) {
    if (!live[i]) continue;
    auto n = nodes_[i];
    const auto first = n.first_child;
    n.first_child = static_cast<std::uint32_t>(c.children_.size());
    for (std::uint32_t j = 0; j < n.child_count; ++j) c.children_.push_back(remap[children_[first + j]]);
    remap[i] = static_cast<NodeId>(c.nodes_.size());
    c.nodes_.push_back(n);
  }
  return c;
}

// ---------------------------------------------------------------- evaluation

bool evaluate(const Circuit& c, const State& y) {
  if (y.size() != c.num_vars()) fail(ErrorKind::InvalidInput, "state dimension does not match circuit");
  std::vector<char> value(c.size(), 0);
  for (NodeId id = 0; id < c.size(); ++id) {
    switch (c.kind(id)) {
      case NodeKind::True: value[id] = 1; break;
      case NodeKind::False: value[id] = 0; break;
      case NodeKind::Literal: {
        auto lit = c.literal(id);
        value[id] = y[lit.var] == lit.positive;
        break;
      }
      case NodeKind::And: {
        char v = 1;
        for (auto ch : c.children(id)) v &= value[ch];
        value[id] = v;
        break;
      }
      case NodeKind::Or: {
        char v = 0;
        for (auto ch : c.children(id)) v |= value[ch];
        value[id] = v;
        break;
      }
    }
  }
  return value[c.root()] != 0;
}

// ---------------------------------------------------------------- variable sets

namespace {

// One bitset of `words` 64-bit words per node, stored contiguously.
class VarSets {
 public:
  explicit VarSets(const Circuit& c) : words_((c.num_vars() + 63) / 64), bits_(c.size() * words_, 0) {
    for (NodeId id = 0; id < c.size(); ++id) {
      auto* mine = row(id);
      if (c.kind(id) == NodeKind::Literal) {
        const auto v = c.literal(id).var;
        mine[v / 64] |= std::uint64_t{1} << (v % 64);
      }
      for (auto ch : c.children(id)) {
        const auto* theirs = row(ch);
        for (std::size_t w = 0; w < words_; ++w) mine[w] |= theirs[w];
      }
    }
  }

  std::size_t words() const { return words_; }
  std::uint64_t* row(NodeId id) { return bits_.data() + id * words_; }
  const std::uint64_t* row(NodeId id) const { return bits_.data() + id * words_; }

  bool contains(NodeId id, std::size_t var) const { return (row(id)[var / 64] >> (var % 64)) & 1u; }
  bool equal(NodeId a, NodeId b) const { return std::equal(row(a), row(a) + words_, row(b)); }
  std::size_t count(NodeId id) const {
    std::size_t n = 0;
    for (std::size_t w = 0; w < words_; ++w) n += std::popcount(row(id)[w]);
    return n;
  }

 private:
  std::size_t words_;
  std::vector<std::uint64_t> bits_;
};

// Literals that a node entails syntactically: itself, or its literal conjuncts.
void literal_facets(const Circuit& c, NodeId id, std::vector<Literal>& out) {
  out.clear();
  if (c.kind(id) == NodeKind::Literal) {
    out.push_back(c.literal(id));
  } else if (c.kind(id) == NodeKind::And) {
    for (auto ch : c.children(id))
      if (c.kind(ch) == NodeKind::Literal) out.push_back(c.literal(ch));
  }
}

}  // namespace

std::optional<std::size_t> decision_variable(const Circuit& c, NodeId id) {
  if (c.kind(id) != NodeKind::Or) return std::nullopt;
  auto ch = c.children(id);
  if (ch.size() != 2) return std::nullopt;
  std::vector<Literal> a, b;
  literal_facets(c, ch[0], a);
  literal_facets(c, ch[1], b);
  std::optional<std::size_t> best;
  for (const auto& la : a)
    for (const auto& lb : b)
      if (la.var == lb.var && la.positive != lb.positive && (!best || la.var > *best)) best = la.var;
  return best;
}

std::vector<bool> mentioned_variables(const Circuit& c) {
  std::vector<bool> reach(c.size(), false), out(c.num_vars(), false);
  reach[c.root()] = true;
  for (std::size_t i = c.size(); i-- > 0;) {
    if (!reach[i]) continue;
    const auto id = static_cast<NodeId>(i);
    if (c.kind(id) == NodeKind::Literal) out[c.literal(id).var] = true;
    for (auto ch : c.children(id)) reach[ch] = true;
  }
  return out;
}

// ---------------------------------------------------------------- structure

StructureReport check_structure(const Circuit& c) {
  StructureReport report;
  report.size_wires = c.wire_count();
  report.node_count = c.size();
  const VarSets sets(c);
  const auto words = sets.words();

  report.is_decomposable = true;
  std::vector<std::uint64_t> seen(words);
  for (NodeId id = 0; id < c.size() && report.is_decomposable; ++id) {
    if (c.kind(id) != NodeKind::And) continue;
    std::fill(seen.begin(), seen.end(), 0);
    for (auto ch : c.children(id)) {
      const auto* row = sets.row(ch);
      for (std::size_t w = 0; w < words; ++w) {
        if (seen[w] & row[w]) report.is_decomposable = false;
        seen[w] |= row[w];
      }
    }
  }

  report.is_smooth = true;
  std::vector<NodeId> undecided;
  std::vector<std::optional<std::size_t>> decision(c.size());
  for (NodeId id = 0; id < c.size(); ++id) {
    if (c.kind(id) != NodeKind::Or) continue;
    for (auto ch : c.children(id))
      if (!sets.equal(ch, id)) report.is_smooth = false;
    decision[id] = decision_variable(c, id);
    if (!decision[id]) undecided.push_back(id);
  }

  if (undecided.empty()) {
    report.is_deterministic = Tristate::Yes;
  } else {
    // Brute force over the variables below the non-decision OR nodes.
    std::vector<std::uint64_t> scope(words, 0);
    NodeId last = 0;
    for (auto id : undecided) {
      for (std::size_t w = 0; w < words; ++w) scope[w] |= sets.row(id)[w];
      last = std::max(last, id);
    }
    std::vector<std::size_t> scope_vars;
    for (std::size_t v = 0; v < c.num_vars(); ++v)
      if ((scope[v / 64] >> (v % 64)) & 1u) scope_vars.push_back(v);
    if (scope_vars.size() > kBruteForceDeterminismVars) {
      report.is_deterministic = Tristate::Unknown;
    } else {
      report.is_deterministic = Tristate::Yes;
      std::vector<char> assign(c.num_vars(), 0), value(last + 1, 0);
      const std::uint64_t total = std::uint64_t{1} << scope_vars.size();
      for (std::uint64_t m = 0; m < total && report.is_deterministic == Tristate::Yes; ++m) {
        for (std::size_t j = 0; j < scope_vars.size(); ++j) assign[scope_vars[j]] = (m >> j) & 1u;
        for (NodeId id = 0; id <= last; ++id) {
          switch (c.kind(id)) {
            case NodeKind::True: value[id] = 1; break;
            case NodeKind::False: value[id] = 0; break;
            case NodeKind::Literal: value[id] = assign[c.literal(id).var] == c.literal(id).positive; break;
            case NodeKind::And: {
              char v = 1;
              for (auto ch : c.children(id)) v &= value[ch];
              value[id] = v;
              break;
            }
            case NodeKind::Or: {
              int hits = 0;
              for (auto ch : c.children(id)) hits += value[ch];
              value[id] = hits > 0;
              if (hits > 1) report.is_deterministic = Tristate::No;
              break;
            }
          }
        }
      }
    }
  }

  // OBDD: every OR decides a variable that must come after everything below it.
  if (undecided.empty()) {
    const auto n = c.num_vars();
    std::vector<std::vector<std::uint64_t>> before(n, std::vector<std::uint64_t>(words, 0));
    for (NodeId id = 0; id < c.size(); ++id) {
      if (!decision[id]) continue;
      const auto v = *decision[id];
      const auto* row = sets.row(id);
      for (std::size_t w = 0; w < words; ++w) before[v][w] |= row[w];
    }
    bool ok = true;
    std::vector<std::size_t> pending(n, 0);
    std::vector<std::vector<std::size_t>> after(n);
    for (std::size_t v = 0; v < n && ok; ++v) {
      if ((before[v][v / 64] >> (v % 64)) & 1u) before[v][v / 64] ^= std::uint64_t{1} << (v % 64);
      for (std::size_t u = 0; u < n; ++u)
        if ((before[v][u / 64] >> (u % 64)) & 1u) {
          after[u].push_back(v);
          ++pending[v];
        }
    }
    std::priority_queue<std::size_t, std::vector<std::size_t>, std::greater<>> ready;
    for (std::size_t v = 0; v < n; ++v)
      if (pending[v] == 0) ready.push(v);
    std::vector<std::size_t> order;
    while (!ready.empty()) {
      auto v = ready.top();
      ready.pop();
      order.push_back(v);
      for (auto w : after[v])
        if (--pending[w] == 0) ready.push(w);
    }
    if (order.size() == n) report.obdd_order = std::move(order);
  }
  return report;
}

// ---------------------------------------------------------------- rewriting

namespace {

// Rebuilds c bottom-up with constant folding. `fixed(var)` returns -1 to keep
// literals of var, otherwise the value assigned to var.
template <class Fixed>
Circuit fold(const Circuit& c, const Fixed& fixed, Certificate certificate) {
  CircuitBuilder b(c.vars());
  std::vector<NodeId> map(c.size());
  std::vector<NodeId> kids;
  for (NodeId id = 0; id < c.size(); ++id) {
    switch (c.kind(id)) {
      case NodeKind::True: map[id] = b.constant(true); break;
      case NodeKind::False: map[id] = b.constant(false); break;
      case NodeKind::Literal: {
        const auto lit = c.literal(id);
        const int v = fixed(lit.var);
        map[id] = v < 0 ? b.literal(lit.var, lit.positive) : b.constant((v == 1) == lit.positive);
        break;
      }
      case NodeKind::And:
      case NodeKind::Or: {
        const bool is_and = c.kind(id) == NodeKind::And;
        const NodeKind absorbing = is_and ? NodeKind::False : NodeKind::True;
        const NodeKind neutral = is_and ? NodeKind::True : NodeKind::False;
        kids.clear();
        bool absorbed = false;
        for (auto ch : c.children(id)) {
          const auto k = b.kind(map[ch]);
          if (k == absorbing) {
            absorbed = true;
            break;
          }
          if (k != neutral) kids.push_back(map[ch]);
        }
        if (absorbed)
          map[id] = b.constant(!is_and);
        else
          map[id] = is_and ? b.conjunction(kids) : b.disjunction(kids);
        break;
      }
    }
  }
  return std::move(b).build(map[c.root()], certificate);
}

Certificate folded_certificate(const Circuit& c) {
  return {c.certificate().decomposable, c.certificate().deterministic, false};
}

Circuit smooth_impl(const Circuit& c, bool cover_root) {
  const VarSets sets(c);
  CircuitBuilder b(c.vars());
  std::vector<std::optional<NodeId>> gadget(c.num_vars());
  auto gadget_for = [&](std::size_t v) {
    if (!gadget[v]) gadget[v] = b.disjunction({b.literal(v, true), b.literal(v, false)});
    return *gadget[v];
  };
  // child AND (Y or not Y) for every Y in `want` but not below `child`.
  auto pad = [&](NodeId new_child, auto&& has, auto&& want, bool child_is_true) {
    std::vector<NodeId> parts;
    if (!child_is_true) parts.push_back(new_child);
    for (std::size_t v = 0; v < c.num_vars(); ++v)
      if (want(v) && !has(v)) parts.push_back(gadget_for(v));
    if (parts.size() == (child_is_true ? 0u : 1u)) return new_child;
    return b.conjunction(parts);
  };

  std::vector<NodeId> map(c.size());
  std::vector<NodeId> kids;
  for (NodeId id = 0; id < c.size(); ++id) {
    switch (c.kind(id)) {
      case NodeKind::True: map[id] = b.constant(true); break;
      case NodeKind::False: map[id] = b.constant(false); break;
      case NodeKind::Literal: map[id] = b.literal(c.literal(id).var, c.literal(id).positive); break;
      case NodeKind::And: {
        kids.clear();
        for (auto ch : c.children(id)) kids.push_back(map[ch]);
        map[id] = b.conjunction(kids);
        break;
      }
      case NodeKind::Or: {
        kids.clear();
        for (auto ch : c.children(id)) {
          if (sets.equal(ch, id)) {
            kids.push_back(map[ch]);
            continue;
          }
          kids.push_back(pad(
              map[ch], [&](std::size_t v) { return sets.contains(ch, v); },
              [&](std::size_t v) { return sets.contains(id, v); }, c.kind(ch) == NodeKind::True));
        }
        map[id] = b.disjunction(kids);
        break;
      }
    }
  }
  NodeId root = map[c.root()];
  if (cover_root) {
    const auto r = c.root();
    root = pad(
        root, [&](std::size_t v) { return sets.contains(r, v); }, [](std::size_t) { return true; },
        c.kind(r) == NodeKind::True);
  }
  return std::move(b).build(root, {c.certificate().decomposable, c.certificate().deterministic, true});
}

}  // namespace

Circuit condition(const Circuit& c, std::size_t var, bool value) {
  if (var >= c.num_vars()) fail(ErrorKind::InvalidInput, "conditioned variable out of range");
  return fold(c, [&](std::size_t v) { return v == var ? (value ? 1 : 0) : -1; }, folded_certificate(c));
}

Circuit trim(const Circuit& c) {
  return fold(c, [](std::size_t) { return -1; }, folded_certificate(c));
}

Circuit smooth(const Circuit& c) { return smooth_impl(c, false); }

Circuit smooth_covering(const Circuit& c) { return smooth_impl(c, true); }

// ---------------------------------------------------------------- text format

std::string write_circuit(const Circuit& c) {
  std::ostringstream out;
  for (std::size_t v = 0; v < c.num_vars(); ++v) out << "c var " << v + 1 << ' ' << c.vars().name(v) << '\n';
  out << "nnf " << c.size() << ' ' << c.wire_count() << ' ' << c.num_vars() << '\n';
  for (NodeId id = 0; id < c.size(); ++id) {
    switch (c.kind(id)) {
      case NodeKind::True: out << 'T'; break;
      case NodeKind::False: out << 'F'; break;
      case NodeKind::Literal: {
        const auto lit = c.literal(id);
        out << "L " << (lit.positive ? "" : "-") << lit.var + 1;
        break;
      }
      case NodeKind::And: out << "A " << c.children(id).size(); break;
      case NodeKind::Or: {
        const auto d = decision_variable(c, id);
        out << "O " << (d ? *d + 1 : 0) << ' ' << c.children(id).size();
        break;
      }
    }
    for (auto ch : c.children(id)) out << ' ' << ch;
    out << '\n';
  }
  return out.str();
}

namespace {

class LineReader {
 public:
  explicit LineReader(std::string_view line) : rest_(line) {}

  std::optional<std::string_view> word() {
    while (!rest_.empty() && (rest_.front() == ' ' || rest_.front() == '\t' || rest_.front() == '\r'))
      rest_.remove_prefix(1);
    if (rest_.empty()) return std::nullopt;
    std::size_t n = 0;
    while (n < rest_.size() && rest_[n] != ' ' && rest_[n] != '\t' && rest_[n] != '\r') ++n;
    auto w = rest_.substr(0, n);
    rest_.remove_prefix(n);
    return w;
  }

  long long integer(std::size_t line_no) {
    auto w = word();
    long long value = 0;
    if (!w) bad(line_no, "missing number");
    auto [ptr, ec] = std::from_chars(w->data(), w->data() + w->size(), value);
    if (ec != std::errc() || ptr != w->data() + w->size()) bad(line_no, "malformed number '" + std::string(*w) + "'");
    return value;
  }

  bool done() { return !word().has_value(); }

  [[noreturn]] static void bad(std::size_t line_no, const std::string& what) {
    fail(ErrorKind::InvalidInput, "circuit line " + std::to_string(line_no) + ": " + what);
  }

 private:
  std::string_view rest_;
};

}  // namespace

Circuit parse_circuit(std::string_view text) {
  std::vector<std::pair<std::size_t, std::string>> var_names;
  std::optional<CircuitBuilder> builder;
  std::size_t expected_nodes = 0, expected_wires = 0, num_vars = 0, wires = 0;
  std::vector<NodeId> map;
  std::size_t line_no = 0;
  while (!text.empty()) {
    auto nl = text.find('\n');
    auto line = text.substr(0, nl);
    text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
    ++line_no;
    LineReader r(line);
    auto head = r.word();
    if (!head) continue;
    if (*head == "c") {
      if (builder) continue;
      auto tag = r.word();
      if (tag && *tag == "var") {
        const auto index = r.integer(line_no);
        auto name = r.word();
        if (!name || index < 1) LineReader::bad(line_no, "malformed variable comment");
        var_names.emplace_back(static_cast<std::size_t>(index), std::string(*name));
      }
      continue;
    }
    if (!builder) {
      if (*head != "nnf") LineReader::bad(line_no, "expected 'nnf' header");
      const auto n = r.integer(line_no), w = r.integer(line_no), v = r.integer(line_no);
      if (n < 1 || w < 0 || v < 1) LineReader::bad(line_no, "header counts out of range");
      expected_nodes = static_cast<std::size_t>(n);
      expected_wires = static_cast<std::size_t>(w);
      num_vars = static_cast<std::size_t>(v);
      std::vector<std::string> names(num_vars);
      for (std::size_t i = 0; i < num_vars; ++i) names[i] = "Y" + std::to_string(i + 1);
      for (auto& [index, name] : var_names) {
        if (index > num_vars) LineReader::bad(line_no, "variable comment index exceeds variable count");
        names[index - 1] = name;
      }
      builder.emplace(VariableSet(std::move(names)));
      continue;
    }
    if (map.size() == expected_nodes) LineReader::bad(line_no, "more nodes than the header declares");
    NodeId id = 0;
    if (*head == "T") {
      id = builder->constant(true);
    } else if (*head == "F") {
      id = builder->constant(false);
    } else if (*head == "L") {
      const auto lit = r.integer(line_no);
      if (lit == 0 || static_cast<std::size_t>(std::llabs(lit)) > num_vars)
        LineReader::bad(line_no, "literal out of range");
      id = builder->literal(static_cast<std::size_t>(std::llabs(lit)) - 1, lit > 0);
    } else if (*head == "A" || *head == "O") {
      if (*head == "O") r.integer(line_no);  // decision variable, recomputed on output
      const auto count = r.integer(line_no);
      if (count < 0) LineReader::bad(line_no, "negative child count");
      std::vector<NodeId> kids;
      for (long long j = 0; j < count; ++j) {
        const auto ch = r.integer(line_no);
        if (ch < 0 || static_cast<std::size_t>(ch) >= map.size())
          LineReader::bad(line_no, "child index must refer to an earlier node");
        kids.push_back(map[static_cast<std::size_t>(ch)]);
      }
      wires += kids.size();
      id = *head == "A" ? builder->conjunction(kids) : builder->disjunction(kids);
    } else {
      LineReader::bad(line_no, "unknown node type '" + std::string(*head) + "'");
    }
    if (!r.done()) LineReader::bad(line_no, "trailing tokens");
    map.push_back(id);
  }
  if (!builder) fail(ErrorKind::InvalidInput, "circuit has no 'nnf' header");
  if (map.size() != expected_nodes) fail(ErrorKind::InvalidInput, "node count does not match header");
  if (wires != expected_wires) fail(ErrorKind::InvalidInput, "wire count does not match header");
  return std::move(*builder).build(map.back());
}

}  // namespace nesykc
