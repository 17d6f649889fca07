#include <cmath>

#include "doctest.h"
#include "support/fixtures.hpp"
#include "support/generators.hpp"

using namespace nesykc;
using namespace nesykc::testing;

TEST_CASE("variable sets index names both ways") {
  VariableSet vars({"a", "b", "c"});
  CHECK(vars.size() == 3);
  CHECK(vars.index_of("b") == 1);
  CHECK(vars.name(2) == "c");
  CHECK_FALSE(vars.find("z").has_value());
  CHECK_THROWS_AS(vars.index_of("z"), Error);
  CHECK_THROWS_AS(VariableSet({"a", "a"}), Error);
  CHECK(VariableSet::numbered(2).names() == std::vector<std::string>{"Y1", "Y2"});
}

TEST_CASE("states order lexicographically with y1 most significant") {
  const State a = State::from_mask(3, 0b001);  // y1 = 1
  const State b = State::from_mask(3, 0b110);  // y2 = y3 = 1
  CHECK(b < a);
  CHECK(a.ones() == std::vector<std::size_t>{0});
  CHECK(b.count() == 2);
}

TEST_CASE("language names round-trip") {
  for (auto lang : kAllLanguages) CHECK(parse_language(language_name(lang)) == lang);
  CHECK(language_name(Language::TeHier) == "te-hier");
  CHECK_THROWS_AS(parse_language("nope"), Error);
}

TEST_CASE("logit closed forms") {
  CHECK(logit(0.5) == doctest::Approx(0.0));
  CHECK(logit(0.9) == doctest::Approx(std::log(9.0)).epsilon(1e-12));
  CHECK(logit(0.2) < logit(0.3));
  for (double p : {0.01, 0.3, 0.5, 0.77, 0.999}) CHECK(std::abs(sigmoid(logit(p)) - p) <= 1e-12);
}

TEST_CASE("probability vectors reject degenerate parameters") {
  CHECK_THROWS_AS(ProbabilityVector({0.5, 1.0}), Error);
  CHECK_THROWS_AS(ProbabilityVector({0.0}), Error);
  CHECK_NOTHROW(ProbabilityVector({0.1, 0.9}));
}

TEST_CASE("log probability factorizes through logits") {
  Rng rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const auto n = uniform_int(rng, 1, 12);
    const auto p = random_probs(rng, n);
    double base = 0.0;
    for (std::size_t i = 0; i < n; ++i) base += std::log1p(-p[i]);
    const State y = State::from_mask(n, rng());
    double score = base;
    for (std::size_t i = 0; i < n; ++i)
      if (y[i]) score += p.logit(i);
    CHECK(log_probability(p, y) == doctest::Approx(score).epsilon(1e-12));
  }
}

TEST_CASE("example DAG satisfaction") {
  const Theory t = example_dag();
  CHECK(satisfies(t, state_of(6, {0, 3})));
  CHECK_FALSE(satisfies(t, state_of(6, {0, 1})));
  CHECK_THROWS_AS(satisfies(t, State(5)), Error);
}

TEST_CASE("example DAG oracle models are the three paths") {
  const auto models = oracle_models(example_dag());
  const std::vector<State> want{state_of(6, {1, 4, 5}), state_of(6, {0, 3}), state_of(6, {0, 2, 4, 5})};
  CHECK(models == want);
}

TEST_CASE("card with bound zero accepts only the empty state") {
  const Theory t = Theory::card(VariableSet::numbered(3), CardOp::Eq, 0);
  for (std::uint64_t m = 0; m < 8; ++m) CHECK(satisfies_mask(t, m) == (m == 0));
  CHECK_THROWS_AS(Theory::card(VariableSet::numbered(2), CardOp::Eq, 3), Error);
}

TEST_CASE("matchings of a three-edge path") {
  const auto models = oracle_models(path_match(3));
  const std::vector<State> want{State(3), state_of(3, {2}), state_of(3, {1}), state_of(3, {0}), state_of(3, {0, 2})};
  CHECK(models == want);
}

TEST_CASE("closures of a single hierarchy edge") {
  const Theory t = vertex_theory(Language::Hier, {"u", "v"}, {{0, 1}});
  const std::vector<State> want{State(2), state_of(2, {0}), state_of(2, {0, 1})};
  CHECK(oracle_models(t) == want);
}

TEST_CASE("te-hier exclusions come from missing common descendants") {
  // r -> a, r -> b, a -> c
  const Theory t = vertex_theory(Language::TeHier, {"r", "a", "b", "c"}, {{0, 1}, {0, 2}, {1, 3}});
  const auto models = oracle_models(t);
  // The empty state plus one root path per vertex.
  CHECK(models.size() == 5);
  CHECK(satisfies(t, state_of(4, {0, 1, 3})));
  CHECK_FALSE(satisfies(t, state_of(4, {0, 1, 2})));
}

TEST_CASE("hex forbids exclusive pairs on top of closure") {
  DirectedGraphPayload g;
  g.vertices = {"animal", "cat", "dog"};
  g.edges = {{0, 1}, {0, 2}};
  g.labels = {0, 1, 2};
  const Theory t = Theory::hex(VariableSet({"animal", "cat", "dog"}), g, {{1, 2}});
  CHECK(satisfies(t, state_of(3, {0, 1})));
  CHECK_FALSE(satisfies(t, state_of(3, {0, 1, 2})));
  CHECK_FALSE(satisfies(t, state_of(3, {1})));
  CHECK(oracle_models(t).size() == 4);
}

TEST_CASE("theory validation") {
  DirectedGraphPayload cyc;
  cyc.vertices = {"a", "b"};
  cyc.edges = {{0, 1}, {1, 0}};
  cyc.labels = {0, 1};
  CHECK_THROWS_AS(Theory::directed(Language::AsPath, VariableSet::numbered(2), cyc), Error);
  CHECK_NOTHROW(Theory::directed(Language::SPath, VariableSet::numbered(2), cyc));

  DirectedGraphPayload dup;
  dup.vertices = {"a", "b"};
  dup.edges = {{0, 1}, {0, 1}};
  dup.labels = {0, 1};
  CHECK_THROWS_AS(Theory::directed(Language::AsPath, VariableSet::numbered(2), dup), Error);

  DirectedGraphPayload loop;
  loop.vertices = {"a"};
  loop.edges = {{0, 0}};
  loop.labels = {0};
  CHECK_THROWS_AS(Theory::directed(Language::SPath, VariableSet::numbered(1), loop), Error);

  // Two roots is not a rooted tree.
  DirectedGraphPayload forest;
  forest.vertices = {"a", "b", "c"};
  forest.edges = {{0, 2}};
  forest.labels = {0, 1, 2};
  CHECK_THROWS_AS(Theory::directed(Language::TreeHier, VariableSet::numbered(3), forest), Error);
  CHECK_NOTHROW(Theory::directed(Language::Hier, VariableSet::numbered(3), forest));

  DirectedGraphPayload unlabelled = forest;
  unlabelled.labels = {0, 0, 2};
  CHECK_THROWS_AS(Theory::directed(Language::Hier, VariableSet::numbered(3), unlabelled), Error);
}

TEST_CASE("oracle queries on the example DAG") {
  const Theory t = example_dag();
  const auto uniform = ProbabilityVector::uniform(6);
  CHECK(oracle_query(t, uniform, QueryKind::Pqe).value.value() == doctest::Approx(3.0 / 64).epsilon(1e-12));
  CHECK(oracle_query(t, uniform, QueryKind::Eqe).value.value() == doctest::Approx(std::log(3.0)).epsilon(1e-12));

  const auto p = dag_probs();
  const auto m = oracle_query(t, p, QueryKind::Mpe);
  CHECK(m.state.value() == state_of(6, {0, 2, 4, 5}));
  CHECK(m.value.value() == doctest::Approx(0.169344).epsilon(1e-12));
  CHECK(oracle_query(t, p, QueryKind::Pqe).value.value() == doctest::Approx(0.177664).epsilon(1e-12));

  QueryParam param;
  param.threshold = 0.004;
  const auto th = oracle_query(t, p, QueryKind::Thresh, param);
  REQUIRE(th.states.size() == 2);
  CHECK(th.states[0].state == state_of(6, {0, 2, 4, 5}));
  CHECK(th.states[1].state == state_of(6, {0, 3}));
}

TEST_CASE("oracle MPE ties go to the smallest bit-string") {
  const Theory t = path_match(3);
  const auto m = oracle_query(t, ProbabilityVector::uniform(3, 0.6), QueryKind::Mpe);
  CHECK(m.state.value() == state_of(3, {0, 2}));
  // Single-edge optima tie; the smallest bit-string is {e3}.
  const Theory star = triangle_match();
  CHECK(oracle_query(star, ProbabilityVector::uniform(3, 0.6), QueryKind::Mpe).state.value() == state_of(3, {2}));
}

TEST_CASE("oracle errors") {
  const Theory big = Theory::card(VariableSet::numbered(26), CardOp::Le, 3);
  CHECK_THROWS_WITH_AS(oracle_models(big), doctest::Contains("limited to 25"), Error);
  try {
    oracle_models(big);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::CapExceeded);
  }
  CHECK_NOTHROW(oracle_models(big, 26).size());

  // A 2-cycle has no source vertex, hence no total simple path.
  DirectedGraphPayload g;
  g.vertices = {"a", "b"};
  g.edges = {{0, 1}, {1, 0}};
  g.labels = {0, 1};
  const Theory cycle = Theory::directed(Language::SPath, VariableSet::numbered(2), g);
  CHECK(oracle_models(cycle).empty());
  CHECK(oracle_query(cycle, ProbabilityVector::uniform(2), QueryKind::Pqe).value.value() == 0.0);
  for (auto kind : {QueryKind::Eqe, QueryKind::Mpe}) {
    try {
      oracle_query(cycle, ProbabilityVector::uniform(2), kind);
      FAIL("expected an unsatisfiable error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::Unsatisfiable);
    }
  }
}

TEST_CASE("oracle model sets are closed under the language closure properties") {
  Rng rng(11);
  for (int trial = 0; trial < 30; ++trial) {
    const Theory m = random_match(rng, 10);
    const auto models = oracle_models(m);
    const std::set<State> set(models.begin(), models.end());
    for (const auto& y : models)
      for (auto i : y.ones()) {
        State sub = y;
        sub.set(i, false);
        CHECK(set.count(sub) == 1);
      }

    const Theory h = random_hier(rng, 10);
    for (const auto& y : oracle_models(h))
      for (auto [parent, child] : h.implications()) CHECK((!y[child] || y[parent]));
  }
}

TEST_CASE("pqe of a theory and its complement sum to one") {
  Rng rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const Theory t = random_theory(rng, kAllLanguages[trial % 8], 10);
    const auto p = random_probs(rng, t.num_vars());
    const auto models = oracle_models(t);
    const std::set<State> set(models.begin(), models.end());
    long double inside = 0, outside = 0;
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << t.num_vars()); ++mask) {
      const State y = State::from_mask(t.num_vars(), mask);
      (set.count(y) ? inside : outside) += state_probability(p, y);
    }
    CHECK(static_cast<double>(inside) ==
          doctest::Approx(oracle_query(t, p, QueryKind::Pqe).value.value()).epsilon(1e-9));
    CHECK(static_cast<double>(inside + outside) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("threshold and ranking helpers") {
  CHECK(meets_threshold(std::log(0.25), 0.25));
  CHECK_FALSE(meets_threshold(std::log(0.24), 0.25));
  CHECK(log_tied(-1.0, -1.0 - 1e-12));
  CHECK_FALSE(log_tied(-1.0, -1.001));
  const RankedState hi{State::from_mask(2, 0b10), -0.5};
  const RankedState lo{State::from_mask(2, 0b01), -0.7};
  CHECK(ranks_before(hi, lo));
  const RankedState same{State::from_mask(2, 0b01), -0.5};
  // Equal probability: the smaller bit-string (y1 = 0) first.
  CHECK(ranks_before(hi, same));
}
