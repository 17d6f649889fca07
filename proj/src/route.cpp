#include "nesykc/route.hpp"

#include "nesykc/closure.hpp"
#include "nesykc/compile.hpp"
#include "nesykc/matching.hpp"

namespace nesykc {

QueryResult circuit_query(const Circuit& c, const ProbabilityVector& p, QueryKind kind, const QueryParam& param) {
  QueryResult r;
  r.kind = kind;
  switch (kind) {
    case QueryKind::Pqe: r.value = pqe(c, p); break;
    case QueryKind::Eqe: r.value = eqe(c, p); break;
    case QueryKind::Mpe: {
      auto m = mpe(c, p);
      r.value = m.probability;
      r.state = std::move(m.state);
      break;
    }
    case QueryKind::TopK: r.states = top_k(c, p, param.k); break;
    case QueryKind::Thresh: r.states = thresh_enum(c, p, param.threshold); break;
  }
  return r;
}

namespace {

// Closure and matching solvers only answer the optimization queries.
template <class Mpe, class TopK, class Thresh>
QueryResult solver_query(const ProbabilityVector& p, QueryKind kind, const QueryParam& param, std::string_view what,
                         Mpe&& mpe_fn, TopK&& top_k_fn, Thresh&& thresh_fn) {
  QueryResult r;
  r.kind = kind;
  switch (kind) {
    case QueryKind::Pqe:
    case QueryKind::Eqe:
      fail(ErrorKind::Intractable, std::string(query_name(kind)) + " is #P-hard on " + std::string(what) +
                                       " theories; only mpe, top-k and thresh are supported");
    case QueryKind::Mpe: {
      auto m = mpe_fn(p);
      r.value = m.probability;
      r.state = std::move(m.state);
      break;
    }
    case QueryKind::TopK: r.states = top_k_fn(p, param.k); break;
    case QueryKind::Thresh: r.states = thresh_fn(p, param.threshold); break;
  }
  return r;
}

// Hierarchies are compiled when they are trees and otherwise solved by min-cut.
Theory as_hierarchy(const Theory& t) {
  const auto& g = t.directed_payload();
  return Theory::directed(Language::Hier, t.vars(), g);
}

}  // namespace

QueryResult route_query(const Theory& t, const ProbabilityVector& p, QueryKind kind, const QueryParam& param) {
  switch (t.language()) {
    case Language::Card:
    case Language::AsPath:
    case Language::TreeHier:
    case Language::TeHier: return circuit_query(compile(t), p, kind, param);
    case Language::SPath: {
      std::optional<Theory> acyclic;
      try {
        acyclic = Theory::directed(Language::AsPath, t.vars(), t.directed_payload());
      } catch (const Error&) {
        fail(ErrorKind::Intractable, "spath theory has a cycle; simple-path reasoning on cyclic graphs is intractable");
      }
      return circuit_query(compile(*acyclic), p, kind, param);
    }
    case Language::Hex:
      if (!t.exclusions().empty())
        fail(ErrorKind::Intractable, "hex theories with exclusions are intractable; use the 2-Horn CNF from compile");
      return route_query(as_hierarchy(t), p, kind, param);
    case Language::Hier: {
      if (t.hierarchy_is_tree()) return circuit_query(compile_tree_hier(t), p, kind, param);
      return solver_query(
          p, kind, param, "DAG hierarchy", [&](const ProbabilityVector& q) { return closure_mpe(t, q); },
          [&](const ProbabilityVector& q, std::size_t k) { return closure_top_k(t, q, k); },
          [&](const ProbabilityVector& q, double th) { return closure_thresh_enum(t, q, th); });
    }
    case Language::Match:
      return solver_query(
          p, kind, param, "matching", [&](const ProbabilityVector& q) { return match_mpe(t, q); },
          [&](const ProbabilityVector& q, std::size_t k) { return match_top_k(t, q, k); },
          [&](const ProbabilityVector& q, double th) { return match_thresh_enum(t, q, th); });
  }
  fail(ErrorKind::Intractable, "unsupported language");
}

}  // namespace nesykc
