#include "nesykc/cli.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "nesykc/compile.hpp"
#include "nesykc/io.hpp"
#include "nesykc/route.hpp"

namespace nesykc {

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::InvalidInput, "cannot read '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << text)) fail(ErrorKind::InvalidInput, "cannot write '" + path.string() + "'");
}

std::string number(double x) {
  if (!std::isfinite(x)) return "null";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

std::string quoted(const std::string& s) { return nlohmann::json(s).dump(); }

std::string names_json(const VariableSet& vars, const State& y) {
  std::string s = "[";
  bool first = true;
  for (auto i : y.ones()) {
    if (!first) s += ",";
    s += quoted(vars.name(i));
    first = false;
  }
  return s + "]";
}

std::string result_json(const VariableSet& vars, const QueryResult& r) {
  std::string s = "{\"query\":" + quoted(std::string(query_name(r.kind)));
  s += ",\"value\":" + (r.value ? number(*r.value) : std::string("null"));
  s += ",\"state\":" + (r.state ? names_json(vars, *r.state) : std::string("null"));
  s += ",\"states\":";
  if (r.kind == QueryKind::TopK || r.kind == QueryKind::Thresh) {
    s += "[";
    for (std::size_t i = 0; i < r.states.size(); ++i) {
      if (i) s += ",";
      s += "{\"state\":" + names_json(vars, r.states[i].state) +
           ",\"probability\":" + number(std::exp(r.states[i].log_prob)) + "}";
    }
    s += "]";
  } else {
    s += "null";
  }
  return s + "}";
}

std::string report_json(const VariableSet& vars, const StructureReport& r) {
  auto flag = [](bool b) { return b ? std::string("true") : std::string("false"); };
  std::string s = "{\"is_nnf\":" + flag(r.is_nnf);
  s += ",\"is_decomposable\":" + flag(r.is_decomposable);
  s += ",\"is_deterministic\":";
  s += r.is_deterministic == Tristate::Unknown ? "null" : flag(r.is_deterministic == Tristate::Yes);
  s += ",\"is_smooth\":" + flag(r.is_smooth);
  s += ",\"obdd_order\":";
  if (r.obdd_order) {
    s += "[";
    for (std::size_t i = 0; i < r.obdd_order->size(); ++i) {
      if (i) s += ",";
      s += quoted(vars.name((*r.obdd_order)[i]));
    }
    s += "]";
  } else {
    s += "null";
  }
  s += ",\"size_wires\":" + std::to_string(r.size_wires);
  s += ",\"node_count\":" + std::to_string(r.node_count);
  return s + "}";
}

std::size_t oracle_cap() {
  const char* env = std::getenv("NESYKC_ORACLE_CAP");
  if (!env || !*env) return kDefaultOracleCap;
  char* end = nullptr;
  const long long cap = std::strtoll(env, &end, 10);
  if (*end != '\0' || cap < 0) fail(ErrorKind::InvalidInput, "NESYKC_ORACLE_CAP must be a non-negative integer");
  return static_cast<std::size_t>(cap);
}

struct QueryArgs {
  std::string query;
  std::string circuit;
  std::string theory;
  std::string probs;
  std::size_t k = 1;
  double threshold = 0.5;
  std::string log_base = "e";
};

QueryParam params_of(const QueryArgs& a) {
  if (!(a.threshold > 0.0)) fail(ErrorKind::InvalidInput, "--threshold must be positive");
  return {a.k, a.threshold};
}

void rescale_entropy(QueryResult& r, const std::string& base) {
  if (r.kind == QueryKind::Eqe && base == "2" && r.value) *r.value /= std::log(2.0);
}

int cmd_compile(const std::string& theory_path, const std::string& out_path, bool no_trim, bool smoothed,
                std::ostream& out) {
  const Theory t = parse_theory_json(read_file(theory_path));
  if (t.language() == Language::Hier || t.language() == Language::Hex) {
    std::filesystem::path cnf_path(out_path);
    cnf_path.replace_extension(".cnf");
    const Cnf cnf = hex_2horn(t);
    write_file(cnf_path, write_dimacs(cnf, &t.vars()));
    out << "{\"cnf\":" << quoted(cnf_path.string()) << ",\"vars\":" << cnf.num_vars
        << ",\"clauses\":" << cnf.clauses.size() << "}\n";
    return 0;
  }
  CompileOptions options;
  options.trim = !no_trim;
  Circuit c = compile(t, options);
  if (smoothed) c = smooth(c);
  write_file(out_path, write_circuit(c));
  out << report_json(c.vars(), check_structure(c)) << "\n";
  return 0;
}

int cmd_query(const QueryArgs& a, std::ostream& out) {
  const QueryKind kind = parse_query(a.query);
  const QueryParam param = params_of(a);
  QueryResult r;
  VariableSet vars;
  if (!a.circuit.empty()) {
    const Circuit c = parse_circuit(read_file(a.circuit));
    vars = c.vars();
    r = circuit_query(c, parse_probs_json(read_file(a.probs), vars), kind, param);
  } else {
    const Theory t = parse_theory_json(read_file(a.theory));
    vars = t.vars();
    r = route_query(t, parse_probs_json(read_file(a.probs), vars), kind, param);
  }
  rescale_entropy(r, a.log_base);
  out << result_json(vars, r) << "\n";
  return 0;
}

int cmd_oracle(const QueryArgs& a, std::ostream& out) {
  const QueryKind kind = parse_query(a.query);
  const QueryParam param = params_of(a);
  const Theory t = parse_theory_json(read_file(a.theory));
  QueryResult r = oracle_query(t, parse_probs_json(read_file(a.probs), t.vars()), kind, param, oracle_cap());
  rescale_entropy(r, a.log_base);
  out << result_json(t.vars(), r) << "\n";
  return 0;
}

int cmd_check(const std::string& circuit_path, std::ostream& out) {
  const Circuit c = parse_circuit(read_file(circuit_path));
  out << report_json(c.vars(), check_structure(c)) << "\n";
  return 0;
}

void add_query_options(CLI::App* cmd, QueryArgs& a, bool allow_circuit) {
  cmd->add_option("query", a.query, "pqe, eqe, mpe, top-k or thresh")
      ->required()
      ->check(CLI::IsMember({"pqe", "eqe", "mpe", "top-k", "thresh"}));
  if (allow_circuit) {
    auto* circuit = cmd->add_option("--circuit", a.circuit, "circuit file");
    auto* theory = cmd->add_option("--theory", a.theory, "theory JSON file");
    circuit->excludes(theory);
    theory->excludes(circuit);
    cmd->callback([&a] {
      if (a.circuit.empty() && a.theory.empty()) throw CLI::ValidationError("one of --circuit or --theory is required");
    });
  } else {
    cmd->add_option("--theory", a.theory, "theory JSON file")->required();
  }
  cmd->add_option("--probs", a.probs, "probability JSON file")->required();
  cmd->add_option("--k", a.k, "number of states for top-k");
  cmd->add_option("--threshold", a.threshold, "probability threshold for thresh");
  cmd->add_option("--log-base", a.log_base, "entropy log base")->check(CLI::IsMember({"e", "2"}));
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Knowledge compilation and probabilistic queries for constraint languages", "nesykc"};
  app.require_subcommand(1);

  std::string theory_path, out_path, circuit_path;
  bool no_trim = false, smoothed = false;
  auto* compile_cmd = app.add_subcommand("compile", "compile a theory to a circuit or 2-Horn CNF");
  compile_cmd->add_option("--theory", theory_path, "theory JSON file")->required();
  compile_cmd->add_option("--out", out_path, "output circuit file")->required();
  compile_cmd->add_flag("--no-trim", no_trim, "keep constant nodes");
  compile_cmd->add_flag("--smooth", smoothed, "smooth the compiled circuit");

  QueryArgs query_args, oracle_args;
  auto* query_cmd = app.add_subcommand("query", "answer a query on a circuit or theory");
  add_query_options(query_cmd, query_args, true);

  auto* check_cmd = app.add_subcommand("check", "report structural properties of a circuit");
  check_cmd->add_option("--circuit", circuit_path, "circuit file")->required();

  auto* oracle_cmd = app.add_subcommand("oracle", "answer a query by exhaustive enumeration");
  add_query_options(oracle_cmd, oracle_args, false);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return static_cast<int>(ErrorKind::InvalidInput);
  }

  try {
    if (compile_cmd->parsed()) return cmd_compile(theory_path, out_path, no_trim, smoothed, out);
    if (query_cmd->parsed()) return cmd_query(query_args, out);
    if (check_cmd->parsed()) return cmd_check(circuit_path, out);
    if (oracle_cmd->parsed()) return cmd_oracle(oracle_args, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return static_cast<int>(e.kind());
  }
  return static_cast<int>(ErrorKind::InvalidInput);
}

}  // namespace nesykc
