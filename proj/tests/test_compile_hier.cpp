#include <set>

#include "doctest.h"
#include "nesykc/compile.hpp"
#include "support/circuits.hpp"
#include "support/fixtures.hpp"

using namespace nesykc;
using namespace nesykc::testing;

namespace {

std::set<std::set<std::string>> named_models(const VariableSet& vars, const std::vector<State>& models) {
  std::set<std::set<std::string>> out;
  for (const auto& y : models) {
    std::set<std::string> s;
    for (auto i : y.ones()) s.insert(vars.name(i));
    out.insert(s);
  }
  return out;
}

std::vector<State> cnf_models(const Cnf& cnf) {
  std::vector<State> out;
  const auto n = cnf.num_vars;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    State y(n);
    for (std::size_t i = 0; i < n; ++i) y.set(i, mask >> (n - 1 - i) & 1);
    if (cnf_satisfied(cnf, y)) out.push_back(std::move(y));
  }
  return out;
}

void check_d_dnnf(const Circuit& c) {
  const auto r = check_structure(c);
  CHECK(r.is_decomposable);
  CHECK(r.is_deterministic == Tristate::Yes);
  CHECK(c.certificate().decomposable);
  CHECK(c.certificate().deterministic);
}

}  // namespace

TEST_CASE("tree-hier single edge") {
  const Theory t = vertex_theory(Language::TreeHier, {"u", "v"}, {{0, 1}});
  const Circuit c = compile_tree_hier(t);
  CHECK(named_models(t.vars(), circuit_models(c)) == std::set<std::set<std::string>>{{}, {"u"}, {"u", "v"}});
  check_d_dnnf(c);
}

TEST_CASE("tree-hier star") {
  const Theory t = vertex_theory(Language::TreeHier, {"r", "a", "b"}, {{0, 1}, {0, 2}});
  const Circuit c = compile_tree_hier(t);
  CHECK(named_models(t.vars(), circuit_models(c)) ==
        std::set<std::set<std::string>>{{}, {"r"}, {"r", "a"}, {"r", "b"}, {"r", "a", "b"}});
}

TEST_CASE("tree-hier random trees match the oracle") {
  Rng rng(40);
  for (int trial = 0; trial < 60; ++trial) {
    const Theory t = random_tree(rng, Language::TreeHier, 12);
    const Circuit c = compile_tree_hier(t);
    CHECK(circuit_models(c) == oracle_models(t));
    check_d_dnnf(c);
    CHECK(c.wire_count() <= 10 * t.vars().size());
  }
}

TEST_CASE("tree-shaped hier theories compile with closure semantics") {
  const Theory t = vertex_theory(Language::Hier, {"r", "a", "b"}, {{0, 1}, {1, 2}});
  CHECK(circuit_models(compile_tree_hier(t)) == oracle_models(t));
}

TEST_CASE("te-hier chain") {
  const Theory t = vertex_theory(Language::TeHier, {"r", "a", "b"}, {{0, 1}, {1, 2}});
  const Circuit c = compile_te_hier(t);
  CHECK(named_models(t.vars(), circuit_models(c)) ==
        std::set<std::set<std::string>>{{}, {"r"}, {"r", "a"}, {"r", "a", "b"}});
  check_d_dnnf(c);
}

TEST_CASE("te-hier single vertex") {
  const Theory t = vertex_theory(Language::TeHier, {"r"}, {});
  CHECK(circuit_models(compile_te_hier(t)).size() == 2);
}

TEST_CASE("te-hier siblings exclude each other") {
  const Theory t = vertex_theory(Language::TeHier, {"r", "a", "b"}, {{0, 1}, {0, 2}});
  CHECK(named_models(t.vars(), circuit_models(compile_te_hier(t))) ==
        std::set<std::set<std::string>>{{}, {"r"}, {"r", "a"}, {"r", "b"}});
}

TEST_CASE("te-hier random trees have |V| + 1 models") {
  Rng rng(41);
  for (int trial = 0; trial < 60; ++trial) {
    const Theory t = random_tree(rng, Language::TeHier, 12);
    const Circuit c = compile_te_hier(t);
    const auto models = circuit_models(c);
    CHECK(models == oracle_models(t));
    CHECK(models.size() == t.vars().size() + 1);
    check_d_dnnf(c);
    CHECK(check_structure(c).is_smooth);
  }
}

TEST_CASE("non-trees are rejected") {
  const Theory dag = vertex_theory(Language::Hier, {"a", "b", "c"}, {{0, 2}, {1, 2}});
  CHECK_THROWS_AS(compile_tree_hier(dag), Error);
  const Theory forest = vertex_theory(Language::Hier, {"a", "b"}, {});
  CHECK_THROWS_AS(compile_tree_hier(forest), Error);
  CHECK_THROWS_AS(vertex_theory(Language::TreeHier, {"a", "b", "c"}, {{0, 2}, {1, 2}}), Error);
}

TEST_CASE("2-Horn clauses") {
  const Theory h = vertex_theory(Language::Hier, {"u", "v"}, {{0, 1}});
  const Cnf cnf = hex_2horn(h);
  CHECK(cnf.num_vars == 2);
  CHECK(cnf.clauses == std::vector<std::vector<int>>{{1, -2}});

  DirectedGraphPayload g;
  g.vertices = {"a", "b"};
  g.labels = {0, 1};
  const Theory x = Theory::hex(VariableSet({"a", "b"}), g, {{0, 1}});
  CHECK(hex_2horn(x).clauses == std::vector<std::vector<int>>{{-1, -2}});
}

TEST_CASE("2-Horn models equal the oracle on random hex and hier theories") {
  Rng rng(42);
  for (int trial = 0; trial < 80; ++trial) {
    const Theory t = trial % 2 ? random_hex(rng, 12) : random_hier(rng, 12);
    const Cnf cnf = hex_2horn(t);
    CHECK(cnf_models(cnf) == oracle_models(t));
    const std::string text = write_dimacs(cnf, &t.vars());
    const Cnf back = parse_dimacs(text);
    CHECK(back.num_vars == cnf.num_vars);
    CHECK(back.clauses == cnf.clauses);
  }
}

TEST_CASE("DIMACS text") {
  Cnf cnf;
  cnf.num_vars = 3;
  cnf.clauses = {{1, -2}, {-1, -3}};
  const std::string text = write_dimacs(cnf);
  CHECK(text.find("p cnf 3 2\n") != std::string::npos);
  CHECK(text.find("1 -2 0\n") != std::string::npos);
  for (const char* bad : {"", "p cnf 2 1\n1 3 0\n", "p cnf 2 2\n1 0\n", "1 0\n", "p cnf x 1\n", "p cnf 2 1\n1 a 0\n"}) {
    CAPTURE(bad);
    CHECK_THROWS_AS(parse_dimacs(bad), Error);
  }
}

TEST_CASE("compile dispatches by language") {
  CHECK(circuit_models(compile(vertex_theory(Language::TeHier, {"r", "a"}, {{0, 1}}))).size() == 3);
  CHECK(circuit_models(compile(example_dag())).size() == 3);
  for (const Theory& t : {vertex_theory(Language::Hier, {"a", "b", "c"}, {{0, 2}, {1, 2}}), path_match(3)}) {
    try {
      compile(t);
      FAIL("compiled an intractable language");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::Intractable);
    }
  }
}
