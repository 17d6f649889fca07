#include "nesykc/queries.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace nesykc {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void require_structure(const Circuit& c, bool deterministic, const std::string& query) {
  const auto& cert = c.certificate();
  if (cert.decomposable && (!deterministic || cert.deterministic)) return;
  const auto report = check_structure(c);
  if (!report.is_decomposable) fail(ErrorKind::Intractable, query + " needs a decomposable circuit");
  if (deterministic && report.is_deterministic != Tristate::Yes)
    fail(ErrorKind::Intractable, query + " needs a circuit verified deterministic");
}

void check_dimension(const Circuit& c, const ProbabilityVector& p) {
  if (p.size() != c.num_vars()) fail(ErrorKind::InvalidInput, "probability vector dimension does not match circuit");
}

// A circuit that is smooth and mentions every variable at its root.
class Prepared {
 public:
  Prepared(const Circuit& c, QueryStats* stats) {
    bool ready = c.certificate().smooth;
    if (ready) {
      const auto seen = mentioned_variables(c);
      ready = std::all_of(seen.begin(), seen.end(), [](bool b) { return b; });
    }
    if (ready) {
      ref_ = &c;
    } else {
      own_.emplace(smooth_covering(c));
      ref_ = &*own_;
      if (stats) stats->smoothed = true;
    }
  }
  const Circuit& get() const { return *ref_; }

 private:
  std::optional<Circuit> own_;
  const Circuit* ref_ = nullptr;
};

void count_pass(const Circuit& c, QueryStats* stats) {
  if (!stats) return;
  stats->wire_visits += c.wire_count();
  ++stats->passes;
}

// Log weight of each literal, 2 * var + positive; -inf where evidence forbids.
std::vector<double> literal_log_weights(const ProbabilityVector& p, const Evidence* evidence) {
  std::vector<double> lw(2 * p.size());
  for (std::size_t v = 0; v < p.size(); ++v) {
    lw[2 * v] = p.log_weight(v, false);
    lw[2 * v + 1] = p.log_weight(v, true);
    if (evidence && (*evidence)[v] >= 0) lw[2 * v + ((*evidence)[v] ? 0 : 1)] = kNegInf;
  }
  return lw;
}

// Max-sum sweep. best[n] is the largest log weight of a model of n; choice[n]
// the first OR child attaining it.
void max_sweep(const Circuit& c, const std::vector<double>& lw, std::vector<double>& best,
               std::vector<std::uint32_t>& choice) {
  best.assign(c.size(), 0.0);
  choice.assign(c.size(), 0);
  for (NodeId id = 0; id < c.size(); ++id) {
    switch (c.kind(id)) {
      case NodeKind::True: best[id] = 0.0; break;
      case NodeKind::False: best[id] = kNegInf; break;
      case NodeKind::Literal: {
        const auto lit = c.literal(id);
        best[id] = lw[2 * lit.var + (lit.positive ? 1 : 0)];
        break;
      }
      case NodeKind::And: {
        double sum = 0.0;
        for (auto ch : c.children(id)) sum += best[ch];
        best[id] = sum;
        break;
      }
      case NodeKind::Or: {
        auto kids = c.children(id);
        double m = kNegInf;
        std::uint32_t arg = 0;
        for (std::uint32_t j = 0; j < kids.size(); ++j)
          if (best[kids[j]] > m) {
            m = best[kids[j]];
            arg = j;
          }
        best[id] = m;
        choice[id] = arg;
        break;
      }
    }
  }
}

// Follows the recorded choices from the root. Returns true when some visited
// OR node had a second child tied with the chosen one.
bool trace(const Circuit& c, const std::vector<double>& best, const std::vector<std::uint32_t>& choice, State& out) {
  bool tie = false;
  std::vector<NodeId> stack{c.root()};
  while (!stack.empty()) {
    const NodeId id = stack.back();
    stack.pop_back();
    switch (c.kind(id)) {
      case NodeKind::Literal: out.set(c.literal(id).var, c.literal(id).positive); break;
      case NodeKind::And:
        for (auto ch : c.children(id)) stack.push_back(ch);
        break;
      case NodeKind::Or: {
        auto kids = c.children(id);
        const NodeId chosen = kids[choice[id]];
        for (auto ch : kids)
          if (ch != chosen && std::isfinite(best[ch]) && log_tied(best[ch], best[chosen])) tie = true;
        stack.push_back(chosen);
        break;
      }
      default: break;
    }
  }
  return tie;
}

std::optional<MpeResult> mpe_prepared(const Circuit& c, const ProbabilityVector& p, const Evidence& evidence,
                                      QueryStats* stats) {
  std::vector<double> best;
  std::vector<std::uint32_t> choice;
  auto lw = literal_log_weights(p, &evidence);
  max_sweep(c, lw, best, choice);
  count_pass(c, stats);
  const double top = best[c.root()];
  if (!std::isfinite(top)) return std::nullopt;

  State state(c.num_vars());
  if (trace(c, best, choice, state)) {
    // Several optima: fix variables to 0 in order while the optimum survives.
    Evidence fixed = evidence;
    for (std::size_t v = 0; v < c.num_vars(); ++v) {
      if (fixed[v] >= 0) continue;
      fixed[v] = 0;
      lw = literal_log_weights(p, &fixed);
      max_sweep(c, lw, best, choice);
      count_pass(c, stats);
      const double m = best[c.root()];
      if (!(std::isfinite(m) && (m >= top || log_tied(m, top)))) fixed[v] = 1;
    }
    for (std::size_t v = 0; v < c.num_vars(); ++v) state.set(v, fixed[v] == 1);
  }
  MpeResult r;
  r.state = std::move(state);
  r.log_probability = log_probability(p, r.state);
  r.probability = std::exp(r.log_probability);
  return r;
}

// Depth-first expansion of derivations, pruned by the max-sum bound.
class ThresholdEnumerator {
 public:
  ThresholdEnumerator(const Circuit& c, const ProbabilityVector& p, double threshold)
      : c_(c), p_(p), threshold_(threshold), lw_(literal_log_weights(p, nullptr)), assignment_(c.num_vars(), false) {
    std::vector<std::uint32_t> choice;
    max_sweep(c, lw_, best_, choice);
    const double lt = std::log(threshold);
    // Looser than meets_threshold; the final filter is exact.
    floor_ = lt - 2e-9 * std::max(1.0, std::abs(lt));
  }

  std::vector<RankedState> run() {
    if (std::isfinite(best_[c_.root()]) && best_[c_.root()] >= floor_) {
      push(c_.root());
      expand(0.0);
    }
    std::sort(out_.begin(), out_.end(), ranks_before);
    return std::move(out_);
  }

 private:
  void push(NodeId id) {
    pending_.push_back(id);
    bound_.push_back((bound_.empty() ? 0.0 : bound_.back()) + best_[id]);
  }
  void pop() {
    pending_.pop_back();
    bound_.pop_back();
  }
  double rest() const { return bound_.empty() ? 0.0 : bound_.back(); }

  void expand(double acc) {
    if (pending_.empty()) {
      emit();
      return;
    }
    const NodeId id = pending_.back();
    pop();
    switch (c_.kind(id)) {
      case NodeKind::True: expand(acc); break;
      case NodeKind::False: break;
      case NodeKind::Literal: {
        const auto lit = c_.literal(id);
        const bool old = assignment_[lit.var];
        assignment_[lit.var] = lit.positive;
        expand(acc + lw_[2 * lit.var + (lit.positive ? 1 : 0)]);
        assignment_[lit.var] = old;
        break;
      }
      case NodeKind::And: {
        auto kids = c_.children(id);
        for (auto ch : kids) push(ch);
        expand(acc);
        for (std::size_t j = 0; j < kids.size(); ++j) pop();
        break;
      }
      case NodeKind::Or: {
        for (auto ch : c_.children(id)) {
          if (!std::isfinite(best_[ch]) || acc + rest() + best_[ch] < floor_) continue;
          push(ch);
          expand(acc);
          pop();
        }
        break;
      }
    }
    push(id);
  }

  void emit() {
    State s(std::vector<bool>(assignment_.begin(), assignment_.end()));
    const double lp = log_probability(p_, s);
    if (meets_threshold(lp, threshold_)) out_.push_back({std::move(s), lp});
  }

  const Circuit& c_;
  const ProbabilityVector& p_;
  double threshold_;
  double floor_ = 0.0;
  std::vector<double> lw_;
  std::vector<double> best_;
  std::vector<NodeId> pending_;
  std::vector<double> bound_;  // prefix sums of best_ over pending_
  std::vector<bool> assignment_;
  std::vector<RankedState> out_;
};

}  // namespace

double pqe(const Circuit& c, const ProbabilityVector& p, QueryStats* stats) {
  check_dimension(c, p);
  require_structure(c, true, "pqe");
  std::vector<double> z(c.size());
  for (NodeId id = 0; id < c.size(); ++id) {
    switch (c.kind(id)) {
      case NodeKind::True: z[id] = 1.0; break;
      case NodeKind::False: z[id] = 0.0; break;
      case NodeKind::Literal: {
        const auto lit = c.literal(id);
        z[id] = lit.positive ? p[lit.var] : 1.0 - p[lit.var];
        break;
      }
      case NodeKind::And: {
        double prod = 1.0;
        for (auto ch : c.children(id)) prod *= z[ch];
        z[id] = prod;
        break;
      }
      case NodeKind::Or: {
        // Neumaier compensated sum.
        double sum = 0.0, carry = 0.0;
        for (auto ch : c.children(id)) {
          const double x = z[ch];
          const double t = sum + x;
          carry += std::abs(sum) >= std::abs(x) ? (sum - t) + x : (x - t) + sum;
          sum = t;
        }
        z[id] = sum + carry;
        break;
      }
    }
  }
  count_pass(c, stats);
  return z[c.root()];
}

double eqe(const Circuit& c, const ProbabilityVector& p, QueryStats* stats) {
  check_dimension(c, p);
  require_structure(c, true, "eqe");
  const Prepared prepared(c, stats);
  const Circuit& s = prepared.get();
  // z: total weight of the node's models; h: sum of w * ln w over them.
  std::vector<double> z(s.size()), h(s.size());
  for (NodeId id = 0; id < s.size(); ++id) {
    switch (s.kind(id)) {
      case NodeKind::True: z[id] = 1.0; h[id] = 0.0; break;
      case NodeKind::False: z[id] = 0.0; h[id] = 0.0; break;
      case NodeKind::Literal: {
        const auto lit = s.literal(id);
        const double w = lit.positive ? p[lit.var] : 1.0 - p[lit.var];
        z[id] = w;
        h[id] = w * std::log(w);
        break;
      }
      case NodeKind::And: {
        double zz = 1.0, hh = 0.0;
        for (auto ch : s.children(id)) {
          hh = hh * z[ch] + zz * h[ch];
          zz *= z[ch];
        }
        z[id] = zz;
        h[id] = hh;
        break;
      }
      case NodeKind::Or: {
        double zz = 0.0, hh = 0.0;
        for (auto ch : s.children(id)) {
          zz += z[ch];
          hh += h[ch];
        }
        z[id] = zz;
        h[id] = hh;
        break;
      }
    }
  }
  count_pass(s, stats);
  const double zr = z[s.root()];
  if (!(zr > 0.0)) fail(ErrorKind::Unsatisfiable, "entropy of an unsatisfiable circuit is undefined");
  return std::max(0.0, std::log(zr) - h[s.root()] / zr);
}

MpeResult mpe(const Circuit& c, const ProbabilityVector& p, QueryStats* stats) {
  auto r = mpe(c, p, free_evidence(c.num_vars()), stats);
  if (!r) fail(ErrorKind::Unsatisfiable, "MPE of an unsatisfiable circuit is undefined");
  return std::move(*r);
}

std::optional<MpeResult> mpe(const Circuit& c, const ProbabilityVector& p, const Evidence& evidence,
                             QueryStats* stats) {
  check_dimension(c, p);
  if (evidence.size() != c.num_vars()) fail(ErrorKind::InvalidInput, "evidence dimension does not match circuit");
  require_structure(c, false, "mpe");
  const Prepared prepared(c, stats);
  return mpe_prepared(prepared.get(), p, evidence, stats);
}

std::vector<RankedState> thresh_enum(const Circuit& c, const ProbabilityVector& p, double threshold,
                                     QueryStats* stats) {
  check_dimension(c, p);
  if (!(threshold > 0.0)) fail(ErrorKind::InvalidInput, "threshold must be positive");
  require_structure(c, true, "thresh");
  const Prepared prepared(c, stats);
  count_pass(prepared.get(), stats);
  return ThresholdEnumerator(prepared.get(), p, threshold).run();
}

std::vector<RankedState> top_k(const Circuit& c, const ProbabilityVector& p, std::size_t k, QueryStats* stats) {
  check_dimension(c, p);
  require_structure(c, true, "top-k");
  const Prepared prepared(c, stats);
  auto solve = [&](const Evidence& e) -> std::optional<RankedState> {
    auto r = mpe_prepared(prepared.get(), p, e, stats);
    if (!r) return std::nullopt;
    return RankedState{std::move(r->state), r->log_probability};
  };
  return lawler_enumerate(c.num_vars(), solve, k, std::nullopt);
}

}  // namespace nesykc
