#pragma once

// NNF boolean circuits stored as an append-only arena in which every child
// index is smaller than its parent's, so a single forward sweep visits nodes
// bottom-up.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "nesykc/core.hpp"

namespace nesykc {

using NodeId = std::uint32_t;

enum class NodeKind : std::uint8_t { True, False, Literal, And, Or };

struct Literal {
  std::size_t var = 0;
  bool positive = true;
  friend bool operator==(const Literal&, const Literal&) = default;
};

// Properties guaranteed by whoever built the circuit. Compilers certify what
// their construction proves; a parsed circuit certifies nothing and is
// checked on demand.
struct Certificate {
  bool decomposable = false;
  bool deterministic = false;
  bool smooth = false;
};

class Circuit {
 public:
  struct Node {
    NodeKind kind = NodeKind::True;
    bool positive = true;
    std::uint32_t var = 0;
    std::uint32_t first_child = 0;
    std::uint32_t child_count = 0;
  };

  const VariableSet& vars() const noexcept { return vars_; }
  std::size_t num_vars() const noexcept { return vars_.size(); }
  std::size_t size() const noexcept { return nodes_.size(); }
  std::size_t wire_count() const noexcept { return children_.size(); }
  NodeId root() const noexcept { return static_cast<NodeId>(nodes_.size() - 1); }

  NodeKind kind(NodeId id) const { return nodes_[id].kind; }
  Literal literal(NodeId id) const { return {nodes_[id].var, nodes_[id].positive}; }
  std::span<const NodeId> children(NodeId id) const {
    const auto& n = nodes_[id];
    return {children_.data() + n.first_child, n.child_count};
  }

  const Certificate& certificate() const noexcept { return certificate_; }

 private:
  friend class CircuitBuilder;
  VariableSet vars_;
  std::vector<Node> nodes_;
  std::vector<NodeId> children_;
  Certificate certificate_;
};

// Raw construction: no constant folding (see trim), but one-child AND/OR
// collapse to the child and literals/constants are shared.
class CircuitBuilder {
 public:
  explicit CircuitBuilder(VariableSet vars);

  NodeId constant(bool value);
  NodeId literal(std::size_t var, bool positive);
  NodeId conjunction(std::span<const NodeId> children);
  NodeId disjunction(std::span<const NodeId> children);
  NodeId conjunction(std::initializer_list<NodeId> children) { return conjunction(std::span(children.begin(), children.size())); }
  NodeId disjunction(std::initializer_list<NodeId> children) { return disjunction(std::span(children.begin(), children.size())); }
  // OR(AND(Y, if_true), AND(not Y, if_false))
  NodeId decision(std::size_t var, NodeId if_true, NodeId if_false);

  NodeKind kind(NodeId id) const { return nodes_[id].kind; }
  std::size_t num_vars() const noexcept { return vars_.size(); }

  // Keeps the nodes reachable from root, renumbered in order; root becomes the
  // last node.
  Circuit build(NodeId root, Certificate certificate = {}) &&;

 private:
  NodeId push(Circuit::Node node, std::span<const NodeId> children);

  VariableSet vars_;
  std::vector<Circuit::Node> nodes_;
  std::vector<NodeId> children_;
  std::optional<NodeId> constants_[2];
  std::vector<std::optional<NodeId>> literals_;  // 2 * var + positive
};

bool evaluate(const Circuit& c, const State& y);

enum class Tristate { No, Yes, Unknown };

struct StructureReport {
  bool is_nnf = true;
  bool is_decomposable = false;
  Tristate is_deterministic = Tristate::Unknown;
  bool is_smooth = false;
  // Variables listed so that every decision on Y has all other variables of
  // its sub-circuit earlier in the list (leaves first).
  std::optional<std::vector<std::size_t>> obdd_order;
  std::size_t size_wires = 0;
  std::size_t node_count = 0;
};

// Above this many variables the brute-force determinism fallback gives up.
inline constexpr std::size_t kBruteForceDeterminismVars = 20;

StructureReport check_structure(const Circuit& c);

// Variable tested by a decision-shaped OR node: two children where one has
// the literal Y among its conjuncts and the other not-Y. Largest such Y, which keeps
// the natural order for chains that decide the highest variable first.
std::optional<std::size_t> decision_variable(const Circuit& c, NodeId id);

// Variables mentioned under the root.
std::vector<bool> mentioned_variables(const Circuit& c);

Circuit condition(const Circuit& c, std::size_t var, bool value);
Circuit smooth(const Circuit& c);
// smooth() plus conjoining (Y or not Y) gadgets at the root for every circuit
// variable the root does not mention. Query engines run on this form.
Circuit smooth_covering(const Circuit& c);
Circuit trim(const Circuit& c);

// Text format, one node per line, root last:
//   c var <index> <name>      (optional, before the header)
//   nnf <nodes> <wires> <vars>
//   L <+-var> | T | F | A <c> <ids...> | O <decision-var-or-0> <c> <ids...>
std::string write_circuit(const Circuit& c);
Circuit parse_circuit(std::string_view text);

}  // namespace nesykc
