#include <cmath>

#include "doctest.h"
#include "nesykc/closure.hpp"
#include "support/fixtures.hpp"
#include "support/generators.hpp"

using namespace nesykc;
using namespace nesykc::testing;

namespace {

Theory edge_uv() { return vertex_theory(Language::Hier, {"u", "v"}, {{0, 1}}); }

ProbabilityVector from_logits(std::vector<double> w) {
  for (auto& x : w) x = sigmoid(x);
  return ProbabilityVector(std::move(w));
}

bool is_closure(const Theory& t, const State& y) {
  for (const auto& [parent, child] : t.implications())
    if (y[child] && !y[parent]) return false;
  return true;
}

FlowNetwork random_network(Rng& rng, std::size_t n) {
  FlowNetwork net(n, 0, n - 1);
  for (std::size_t u = 0; u < n; ++u)
    for (std::size_t v = 0; v < n; ++v)
      if (u != v && uniform_real(rng, 0, 1) < 0.3) {
        const bool integral = uniform_int(rng, 0, 1) == 0;
        net.add_arc(u, v, integral ? static_cast<double>(uniform_int(rng, 0, 9)) : uniform_real(rng, 0, 5));
      }
  return net;
}

}  // namespace

TEST_CASE("two-node networks") {
  FlowNetwork net(3, 0, 2);
  net.add_arc(0, 1, 5);
  net.add_arc(1, 2, 3);
  const auto r = max_flow(net);
  CHECK(r.value == doctest::Approx(3));
  CHECK(r.source_side == std::vector<bool>{true, true, false});

  FlowNetwork zero(3, 0, 2);
  zero.add_arc(0, 1, 0);
  zero.add_arc(1, 2, 0);
  CHECK(max_flow(zero).value == 0.0);
  CHECK(max_flow(zero).source_side == std::vector<bool>{true, false, false});
}

TEST_CASE("set_capacity changes an arc in place") {
  FlowNetwork net(3, 0, 2);
  const auto a = net.add_arc(0, 1, 5);
  net.add_arc(1, 2, 3);
  net.set_capacity(a, 1);
  CHECK(max_flow(net).value == doctest::Approx(1));
}

TEST_CASE("max flow equals the minimum over all cuts") {
  Rng rng(50);
  for (int trial = 0; trial < 100; ++trial) {
    const auto n = uniform_int(rng, 2, 10);
    const FlowNetwork net = random_network(rng, n);
    const auto r = max_flow(net);
    const double best = brute_min_cut(net);
    CHECK(std::abs(r.value - best) <= 1e-9 * std::max(1.0, best));
    CHECK(std::abs(cut_capacity(net, r.source_side) - r.value) <= 1e-9 * std::max(1.0, best));
    CHECK(r.source_side[net.source()]);
    CHECK_FALSE(r.source_side[net.sink()]);
  }
}

TEST_CASE("closure examples") {
  const auto a = closure_mpe(edge_uv(), from_logits({1, 2}));
  CHECK(a.state == state_of(2, {0, 1}));
  const auto b = closure_mpe(edge_uv(), from_logits({-3, 2}));
  CHECK(b.state == State(2));
  // The positive-weight parent alone is better than both.
  CHECK(closure_mpe(edge_uv(), from_logits({1, -2})).state == state_of(2, {0}));
}

TEST_CASE("uniform weights give the empty closure") {
  Rng rng(51);
  for (int trial = 0; trial < 10; ++trial) {
    const Theory t = random_hier(rng, 10);
    const auto r = closure_mpe(t, ProbabilityVector::uniform(t.vars().size()));
    CHECK(r.state == State(t.vars().size()));
    CHECK(r.probability == doctest::Approx(std::ldexp(1.0, -static_cast<int>(t.vars().size()))));
  }
}

TEST_CASE("closure mpe matches the oracle on random DAGs") {
  Rng rng(52);
  for (int trial = 0; trial < 60; ++trial) {
    const Theory t = random_hier(rng, 12);
    const auto p = random_probs(rng, t.vars().size());
    const auto want = oracle_query(t, p, QueryKind::Mpe);
    const auto got = closure_mpe(t, p);
    CHECK(is_closure(t, got.state));
    CHECK(close_rel(got.probability, *want.value, 1e-9));
    CHECK(close_rel(got.probability, state_probability(p, got.state), 1e-12));
  }
}

TEST_CASE("scaling logits keeps the argmax") {
  Rng rng(53);
  for (int trial = 0; trial < 30; ++trial) {
    const Theory t = random_hier(rng, 10);
    std::vector<double> w(t.vars().size());
    for (auto& x : w) x = uniform_real(rng, -3, 3);
    const auto base = closure_mpe(t, from_logits(w));
    for (auto& x : w) x *= 1.7;
    CHECK(closure_mpe(t, from_logits(w)).state == base.state);
  }
}

TEST_CASE("forced literals") {
  const Theory t = edge_uv();
  Evidence e = free_evidence(2);
  e[1] = 1;
  CHECK(closure_mpe(t, from_logits({-3, 2}), e).state == state_of(2, {0, 1}));
  e = free_evidence(2);
  e[0] = 0;
  CHECK(closure_mpe(t, from_logits({1, 2}), e).state == State(2));
  e[1] = 1;
  CHECK_FALSE(try_closure_mpe(t, from_logits({1, 2}), e).has_value());
  try {
    closure_mpe(t, from_logits({1, 2}), e);
    FAIL("accepted inconsistent forcing");
  } catch (const Error& err) {
    CHECK(err.kind() == ErrorKind::Unsatisfiable);
  }
}

TEST_CASE("forced mpe matches the filtered oracle") {
  Rng rng(54);
  for (int trial = 0; trial < 40; ++trial) {
    const Theory t = random_hier(rng, 10);
    const auto n = t.vars().size();
    const auto p = random_probs(rng, n);
    Evidence e = free_evidence(n);
    for (auto& x : e) x = static_cast<std::int8_t>(uniform_int(rng, 0, 4) == 0 ? uniform_int(rng, 0, 1) : -1);
    double best = -INFINITY;
    for (const auto& y : oracle_models(t)) {
      bool ok = true;
      for (std::size_t v = 0; v < n; ++v) ok = ok && (e[v] < 0 || y[v] == (e[v] == 1));
      if (ok) best = std::max(best, log_probability(p, y));
    }
    const auto got = try_closure_mpe(t, p, e);
    CHECK(got.has_value() == std::isfinite(best));
    if (got) {
      CHECK(log_tied(got->log_probability, best));
      for (std::size_t v = 0; v < n; ++v)
        if (e[v] >= 0) CHECK(got->state[v] == (e[v] == 1));
    }
  }
}

TEST_CASE("threshold enumeration on a single edge") {
  const auto p = ProbabilityVector::uniform(2);
  CHECK(closure_thresh_enum(edge_uv(), p, 0.2).size() == 3);
  CHECK(closure_thresh_enum(edge_uv(), p, 0.25).size() == 3);
  CHECK(closure_thresh_enum(edge_uv(), p, 0.3).empty());
  // Uniform ties are listed by increasing bit-string.
  const auto all = closure_thresh_enum(edge_uv(), p, 0.2);
  CHECK(all[0].state == State(2));
  CHECK(all[1].state == state_of(2, {0}));
  CHECK(all[2].state == state_of(2, {0, 1}));
}

TEST_CASE("enumeration matches the oracle") {
  Rng rng(55);
  for (int trial = 0; trial < 40; ++trial) {
    const Theory t = random_hier(rng, 12);
    const auto p = random_probs(rng, t.vars().size());
    QueryParam all;
    all.k = std::size_t{1} << 20;
    const auto ranking = oracle_query(t, p, QueryKind::TopK, all).states;
    const auto k = uniform_int(rng, 0, ranking.size() + 2);
    const auto top = closure_top_k(t, p, k);
    CHECK(top.size() == std::min(k, ranking.size()));
    CHECK(ranking_prefix_of(top, ranking));
    for (int probe = 0; probe < 3; ++probe) {
      const double th = std::exp(ranking[uniform_int(rng, 0, ranking.size() - 1)].log_prob) * uniform_real(rng, 0.8, 1.2);
      QueryParam param;
      param.threshold = th;
      const auto want = oracle_query(t, p, QueryKind::Thresh, param).states;
      const auto got = closure_thresh_enum(t, p, th);
      CHECK(state_set(got) == state_set(want));
      CHECK(same_ranking(got, want));
    }
  }
}

TEST_CASE("supported theories") {
  CHECK(closure_supported(edge_uv()));
  CHECK(closure_supported(vertex_theory(Language::TreeHier, {"u", "v"}, {{0, 1}})));
  CHECK_FALSE(closure_supported(example_dag()));
  CHECK_FALSE(closure_supported(vertex_theory(Language::TeHier, {"u", "v"}, {{0, 1}})));
  DirectedGraphPayload g;
  g.vertices = {"a", "b"};
  g.labels = {0, 1};
  CHECK(closure_supported(Theory::hex(VariableSet({"a", "b"}), g, {})));
  CHECK_FALSE(closure_supported(Theory::hex(VariableSet({"a", "b"}), g, {{0, 1}})));
}
