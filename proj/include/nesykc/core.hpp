#pragma once

// Variables, states, theories in the eight constraint languages, probability
// vectors, and the exhaustive oracle that fixes the reference semantics.

#include <cmath>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

#include "nesykc/error.hpp"

namespace nesykc {

class VariableSet {
 public:
  VariableSet() = default;
  explicit VariableSet(std::vector<std::string> names);

  std::size_t size() const noexcept { return names_.size(); }
  const std::string& name(std::size_t index) const { return names_.at(index); }
  const std::vector<std::string>& names() const noexcept { return names_; }
  std::optional<std::size_t> find(std::string_view name) const;
  std::size_t index_of(std::string_view name) const;  // throws InvalidInput

  // Y1..Yk
  static VariableSet numbered(std::size_t count, std::string_view prefix = "Y");

  friend bool operator==(const VariableSet& a, const VariableSet& b) { return a.names_ == b.names_; }

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, std::size_t> index_;
};

// Total assignment. Ordering is lexicographic on the bit-string y_1 y_2 ... y_k
// with 0 < 1.
class State {
 public:
  State() = default;
  explicit State(std::size_t size) : bits_(size, false) {}
  explicit State(std::vector<bool> bits) : bits_(std::move(bits)) {}

  static State from_mask(std::size_t size, std::uint64_t mask);  // bit i of mask = y_i
  static State from_indices(std::size_t size, std::initializer_list<std::size_t> ones);

  std::size_t size() const noexcept { return bits_.size(); }
  bool operator[](std::size_t i) const { return bits_[i]; }
  void set(std::size_t i, bool value) { bits_[i] = value; }
  std::size_t count() const;
  std::vector<std::size_t> ones() const;
  const std::vector<bool>& bits() const noexcept { return bits_; }

  friend bool operator==(const State&, const State&) = default;
  friend auto operator<=>(const State& a, const State& b) { return a.bits_ <=> b.bits_; }

 private:
  std::vector<bool> bits_;
};

enum class Language { Card, Hier, TreeHier, TeHier, Hex, AsPath, SPath, Match };

std::string_view language_name(Language lang);  // JSON spelling
Language parse_language(std::string_view name);
bool is_vertex_based(Language lang);
bool is_edge_based(Language lang);

enum class CardOp { Le, Ge, Eq };

struct CardPayload {
  std::size_t n = 0;
  CardOp op = CardOp::Eq;
  std::size_t bound = 0;
};

struct Edge {
  std::size_t from = 0;
  std::size_t to = 0;
  friend bool operator==(const Edge&, const Edge&) = default;
};

// labels[i] is the variable of edge i (edge-based languages) or of vertex i
// (vertex-based languages).
struct DirectedGraphPayload {
  std::vector<std::string> vertices;
  std::vector<Edge> edges;
  std::vector<std::size_t> labels;
};

struct UndirectedGraphPayload {
  std::vector<std::string> vertices;
  std::vector<Edge> edges;
  std::vector<std::size_t> labels;  // per edge
};

struct HexPayload {
  DirectedGraphPayload hierarchy;  // vertex-labelled
  std::vector<Edge> exclusions;
};

using Payload = std::variant<CardPayload, DirectedGraphPayload, HexPayload, UndirectedGraphPayload>;

class Theory {
 public:
  static Theory card(VariableSet vars, CardOp op, std::size_t bound);
  // Hier, TreeHier, TeHier, AsPath, SPath. Parallel edges are rejected on
  // input; path normalization may create them and passes true.
  static Theory directed(Language lang, VariableSet vars, DirectedGraphPayload graph,
                         bool allow_parallel_edges = false);
  static Theory hex(VariableSet vars, DirectedGraphPayload hierarchy, std::vector<Edge> exclusions);
  static Theory match(VariableSet vars, UndirectedGraphPayload graph);

  Language language() const noexcept { return language_; }
  const VariableSet& vars() const noexcept { return vars_; }
  std::size_t num_vars() const noexcept { return vars_.size(); }
  const Payload& payload() const noexcept { return payload_; }

  const CardPayload& card_payload() const { return std::get<CardPayload>(payload_); }
  const DirectedGraphPayload& directed_payload() const;  // also the hierarchy of a Hex theory
  const HexPayload& hex_payload() const { return std::get<HexPayload>(payload_); }
  const UndirectedGraphPayload& undirected_payload() const { return std::get<UndirectedGraphPayload>(payload_); }

  // Variable-level constraints, precomputed for vertex-based languages:
  // (parent, child) means child => parent; (a, b) exclusion means not (a and b).
  const std::vector<std::pair<std::size_t, std::size_t>>& implications() const noexcept { return implications_; }
  const std::vector<std::pair<std::size_t, std::size_t>>& exclusions() const noexcept { return exclusions_; }

  // True when the hierarchy graph is a single rooted tree.
  bool hierarchy_is_tree() const;

 private:
  Theory(Language lang, VariableSet vars, Payload payload);
  void derive_constraints();

  Language language_;
  VariableSet vars_;
  Payload payload_;
  std::vector<std::pair<std::size_t, std::size_t>> implications_;
  std::vector<std::pair<std::size_t, std::size_t>> exclusions_;
};

class ProbabilityVector {
 public:
  ProbabilityVector() = default;
  explicit ProbabilityVector(std::vector<double> probs);  // throws unless 0 < p < 1

  static ProbabilityVector uniform(std::size_t size, double value = 0.5);

  std::size_t size() const noexcept { return probs_.size(); }
  double operator[](std::size_t i) const { return probs_[i]; }
  const std::vector<double>& values() const noexcept { return probs_; }

  double logit(std::size_t i) const;
  double log_weight(std::size_t i, bool value) const;  // ln p_i or ln(1 - p_i)

 private:
  std::vector<double> probs_;
};

double logit(double p);
double sigmoid(double x);

// ln P(y|p) summed in variable order. Every component computes final state
// probabilities through this function so rankings agree bit-for-bit.
double log_probability(const ProbabilityVector& p, const State& y);
inline double state_probability(const ProbabilityVector& p, const State& y);

// Relative tolerance under which two log-probabilities count as tied.
inline constexpr double kLogTieTolerance = 1e-10;
bool log_tied(double a, double b);

// Inclusive threshold test shared by the oracle and every enumerator.
bool meets_threshold(double log_prob, double threshold);

// Ranking order for enumerations: higher probability first, then the
// lexicographically smaller state.
struct RankedState {
  State state;
  double log_prob = 0.0;
};
bool ranks_before(const RankedState& a, const RankedState& b);

bool satisfies(const Theory& theory, const State& state);
// Bit i of mask is y_i; requires num_vars <= 64.
bool satisfies_mask(const Theory& theory, std::uint64_t mask);

enum class QueryKind { Pqe, Eqe, Mpe, TopK, Thresh };
std::string_view query_name(QueryKind kind);
QueryKind parse_query(std::string_view name);

struct QueryParam {
  std::size_t k = 1;
  double threshold = 0.5;
};

struct QueryResult {
  QueryKind kind = QueryKind::Pqe;
  std::optional<double> value;       // pqe, eqe (nats), mpe probability
  std::optional<State> state;        // mpe
  std::vector<RankedState> states;   // top-k, thresh
};

inline constexpr std::size_t kDefaultOracleCap = 25;

std::vector<State> oracle_models(const Theory& theory, std::size_t cap = kDefaultOracleCap);
QueryResult oracle_query(const Theory& theory, const ProbabilityVector& p, QueryKind kind,
                         const QueryParam& param = {}, std::size_t cap = kDefaultOracleCap);

inline double state_probability(const ProbabilityVector& p, const State& y) {
  return std::exp(log_probability(p, y));
}

}  // namespace nesykc
