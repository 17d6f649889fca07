#include "nesykc/io.hpp"

#include "json.hpp"

namespace nesykc {

using nlohmann::json;

namespace {

const json& member(const json& obj, const char* key) {
  if (!obj.is_object() || !obj.contains(key)) fail(ErrorKind::InvalidInput, std::string("missing JSON key '") + key + "'");
  return obj.at(key);
}

std::string as_string(const json& j, const char* what) {
  if (!j.is_string()) fail(ErrorKind::InvalidInput, std::string(what) + " must be a string");
  return j.get<std::string>();
}

std::size_t as_count(const json& j, const char* what) {
  if (!j.is_number_integer() || j.get<long long>() < 0)
    fail(ErrorKind::InvalidInput, std::string(what) + " must be a non-negative integer");
  return j.get<std::size_t>();
}

std::vector<std::string> string_list(const json& j, const char* what) {
  if (!j.is_array()) fail(ErrorKind::InvalidInput, std::string(what) + " must be an array");
  std::vector<std::string> out;
  for (const auto& item : j) out.push_back(as_string(item, what));
  return out;
}

std::size_t vertex_index(const std::vector<std::string>& vertices, const json& j) {
  const auto name = as_string(j, "edge endpoint");
  for (std::size_t i = 0; i < vertices.size(); ++i)
    if (vertices[i] == name) return i;
  fail(ErrorKind::InvalidInput, "unknown vertex '" + name + "'");
}

CardOp parse_op(const std::string& op) {
  if (op == "le") return CardOp::Le;
  if (op == "ge") return CardOp::Ge;
  if (op == "eq") return CardOp::Eq;
  fail(ErrorKind::InvalidInput, "card op must be le, ge or eq");
}

const char* op_name(CardOp op) {
  switch (op) {
    case CardOp::Le: return "le";
    case CardOp::Ge: return "ge";
    case CardOp::Eq: return "eq";
  }
  return "eq";
}

// Pairs [u, v] over `vertices`.
std::vector<Edge> vertex_pairs(const json& j, const std::vector<std::string>& vertices, const char* what) {
  if (!j.is_array()) fail(ErrorKind::InvalidInput, std::string(what) + " must be an array");
  std::vector<Edge> out;
  for (const auto& e : j) {
    if (!e.is_array() || e.size() != 2) fail(ErrorKind::InvalidInput, std::string(what) + " entries must be [u, v]");
    out.push_back({vertex_index(vertices, e[0]), vertex_index(vertices, e[1])});
  }
  return out;
}

DirectedGraphPayload vertex_graph(const json& payload, const VariableSet& vars) {
  DirectedGraphPayload g;
  g.vertices = payload.contains("vertices") ? string_list(payload.at("vertices"), "vertices") : vars.names();
  for (const auto& v : g.vertices) g.labels.push_back(vars.index_of(v));
  g.edges = vertex_pairs(member(payload, "edges"), g.vertices, "edges");
  return g;
}

template <class Graph>
Graph edge_graph(const json& payload, const VariableSet& vars) {
  Graph g;
  g.vertices = string_list(member(payload, "vertices"), "vertices");
  const auto& edges = member(payload, "edges");
  if (!edges.is_array()) fail(ErrorKind::InvalidInput, "edges must be an array");
  for (const auto& e : edges) {
    if (!e.is_array() || e.size() != 3) fail(ErrorKind::InvalidInput, "edges must be [u, v, varname]");
    g.edges.push_back({vertex_index(g.vertices, e[0]), vertex_index(g.vertices, e[1])});
    g.labels.push_back(vars.index_of(as_string(e[2], "edge variable")));
  }
  return g;
}

Theory theory_from_json(const json& doc) {
  const Language lang = parse_language(as_string(member(doc, "language"), "language"));
  const json& payload = member(doc, "payload");
  if (!payload.is_object()) fail(ErrorKind::InvalidInput, "payload must be an object");
  if (lang == Language::Card) {
    const auto n = as_count(member(payload, "n"), "n");
    VariableSet vars = doc.contains("variables") ? VariableSet(string_list(doc.at("variables"), "variables"))
                                                 : VariableSet::numbered(n);
    if (vars.size() != n) fail(ErrorKind::InvalidInput, "card n does not match the number of variables");
    return Theory::card(std::move(vars), parse_op(as_string(member(payload, "op"), "op")),
                        as_count(member(payload, "l"), "l"));
  }
  VariableSet vars(string_list(member(doc, "variables"), "variables"));
  switch (lang) {
    case Language::Hier:
    case Language::TreeHier:
    case Language::TeHier: {
      auto g = vertex_graph(payload, vars);
      return Theory::directed(lang, std::move(vars), std::move(g));
    }
    case Language::Hex: {
      auto g = vertex_graph(payload, vars);
      auto exclusions = payload.contains("exclusions") ? vertex_pairs(payload.at("exclusions"), g.vertices, "exclusions")
                                                       : std::vector<Edge>{};
      return Theory::hex(std::move(vars), std::move(g), std::move(exclusions));
    }
    case Language::AsPath:
    case Language::SPath: {
      auto g = edge_graph<DirectedGraphPayload>(payload, vars);
      return Theory::directed(lang, std::move(vars), std::move(g));
    }
    case Language::Match: {
      auto g = edge_graph<UndirectedGraphPayload>(payload, vars);
      return Theory::match(std::move(vars), std::move(g));
    }
    case Language::Card: break;
  }
  fail(ErrorKind::InvalidInput, "unsupported language");
}

json parse_document(std::string_view text, const char* what) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    fail(ErrorKind::InvalidInput, std::string("malformed ") + what + " JSON: " + e.what());
  }
}

template <class Graph>
json edges_json(const Graph& g, const VariableSet& vars, bool labelled) {
  json edges = json::array();
  for (std::size_t i = 0; i < g.edges.size(); ++i) {
    json e = {g.vertices[g.edges[i].from], g.vertices[g.edges[i].to]};
    if (labelled) e.push_back(vars.name(g.labels[i]));
    edges.push_back(std::move(e));
  }
  return edges;
}

}  // namespace

Theory parse_theory_json(std::string_view text) {
  const json doc = parse_document(text, "theory");
  try {
    return theory_from_json(doc);
  } catch (const json::exception& e) {
    fail(ErrorKind::InvalidInput, std::string("invalid theory JSON: ") + e.what());
  }
}

std::string write_theory_json(const Theory& theory) {
  json doc;
  doc["language"] = std::string(language_name(theory.language()));
  doc["variables"] = theory.vars().names();
  json payload = json::object();
  const auto& vars = theory.vars();
  switch (theory.language()) {
    case Language::Card: {
      const auto& c = theory.card_payload();
      payload["n"] = c.n;
      payload["op"] = op_name(c.op);
      payload["l"] = c.bound;
      break;
    }
    case Language::Hier:
    case Language::TreeHier:
    case Language::TeHier:
    case Language::Hex: {
      const auto& g = theory.directed_payload();
      payload["vertices"] = g.vertices;
      payload["edges"] = edges_json(g, vars, false);
      if (theory.language() == Language::Hex) {
        json ex = json::array();
        for (const auto& e : theory.hex_payload().exclusions) ex.push_back({g.vertices[e.from], g.vertices[e.to]});
        payload["exclusions"] = std::move(ex);
      }
      break;
    }
    case Language::AsPath:
    case Language::SPath: {
      const auto& g = theory.directed_payload();
      payload["vertices"] = g.vertices;
      payload["edges"] = edges_json(g, vars, true);
      break;
    }
    case Language::Match: {
      const auto& g = theory.undirected_payload();
      payload["vertices"] = g.vertices;
      payload["edges"] = edges_json(g, vars, true);
      break;
    }
  }
  doc["payload"] = std::move(payload);
  return doc.dump(2) + "\n";
}

ProbabilityVector parse_probs_json(std::string_view text, const VariableSet& vars) {
  const json doc = parse_document(text, "probability");
  const json& probs = member(doc, "probs");
  if (!probs.is_object()) fail(ErrorKind::InvalidInput, "probs must be an object");
  std::vector<double> values(vars.size(), 0.0);
  std::vector<bool> seen(vars.size(), false);
  for (const auto& [name, value] : probs.items()) {
    const auto i = vars.index_of(name);
    if (!value.is_number()) fail(ErrorKind::InvalidInput, "probability of '" + name + "' must be a number");
    values[i] = value.get<double>();
    seen[i] = true;
  }
  for (std::size_t i = 0; i < vars.size(); ++i)
    if (!seen[i]) fail(ErrorKind::InvalidInput, "missing probability for '" + vars.name(i) + "'");
  return ProbabilityVector(std::move(values));
}

std::string write_probs_json(const VariableSet& vars, const ProbabilityVector& p) {
  json probs = json::object();
  for (std::size_t i = 0; i < vars.size(); ++i) probs[vars.name(i)] = p[i];
  json doc;
  doc["probs"] = std::move(probs);
  return doc.dump(2) + "\n";
}

}  // namespace nesykc
