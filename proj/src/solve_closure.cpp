#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>

#include "nesykc/closure.hpp"

namespace nesykc {

FlowNetwork::FlowNetwork(std::size_t num_nodes, std::size_t source, std::size_t sink)
    : num_nodes_(num_nodes), source_(source), sink_(sink) {
  if (source >= num_nodes || sink >= num_nodes || source == sink)
    fail(ErrorKind::InvalidInput, "flow network needs distinct source and sink nodes");
}

std::size_t FlowNetwork::add_arc(std::size_t from, std::size_t to, double capacity) {
  if (from >= num_nodes_ || to >= num_nodes_) fail(ErrorKind::InvalidInput, "arc endpoint out of range");
  if (!(capacity >= 0.0) || !std::isfinite(capacity)) fail(ErrorKind::InvalidInput, "arc capacity must be finite and >= 0");
  arcs_.push_back({from, to, capacity});
  return arcs_.size() - 1;
}

void FlowNetwork::set_capacity(std::size_t arc, double capacity) {
  if (!(capacity >= 0.0) || !std::isfinite(capacity)) fail(ErrorKind::InvalidInput, "arc capacity must be finite and >= 0");
  arcs_.at(arc).capacity = capacity;
}

namespace {

class Dinic {
 public:
  explicit Dinic(const FlowNetwork& net) : net_(net), out_(net.num_nodes()), level_(net.num_nodes()), next_(net.num_nodes()) {
    double scale = 1.0;
    for (const auto& a : net.arcs()) {
      // Residual arc 2i runs forward, 2i+1 backward.
      to_.push_back(a.to);
      residual_.push_back(a.capacity);
      to_.push_back(a.from);
      residual_.push_back(0.0);
      out_[a.from].push_back(to_.size() - 2);
      out_[a.to].push_back(to_.size() - 1);
      scale = std::max(scale, a.capacity);
    }
    eps_ = 1e-12 * scale;
  }

  FlowResult run() {
    double value = 0.0;
    while (levels()) {
      std::fill(next_.begin(), next_.end(), 0);
      while (true) {
        const double pushed = push(net_.source(), std::numeric_limits<double>::infinity());
        if (pushed <= 0.0) break;
        value += pushed;
      }
    }
    FlowResult result;
    result.value = value;
    result.source_side.assign(net_.num_nodes(), false);
    for (std::size_t v = 0; v < net_.num_nodes(); ++v) result.source_side[v] = level_[v] >= 0;
    return result;
  }

 private:
  bool levels() {
    std::fill(level_.begin(), level_.end(), -1);
    std::queue<std::size_t> queue;
    level_[net_.source()] = 0;
    queue.push(net_.source());
    while (!queue.empty()) {
      const auto v = queue.front();
      queue.pop();
      for (auto a : out_[v]) {
        if (residual_[a] > eps_ && level_[to_[a]] < 0) {
          level_[to_[a]] = level_[v] + 1;
          queue.push(to_[a]);
        }
      }
    }
    return level_[net_.sink()] >= 0;
  }

  double push(std::size_t v, double limit) {
    if (v == net_.sink()) return limit;
    for (auto& i = next_[v]; i < out_[v].size(); ++i) {
      const auto a = out_[v][i];
      const auto w = to_[a];
      if (residual_[a] <= eps_ || level_[w] != level_[v] + 1) continue;
      const double got = push(w, std::min(limit, residual_[a]));
      if (got > 0.0) {
        residual_[a] -= got;
        residual_[a ^ 1] += got;
        return got;
      }
    }
    return 0.0;
  }

  const FlowNetwork& net_;
  std::vector<std::size_t> to_;
  std::vector<double> residual_;
  std::vector<std::vector<std::size_t>> out_;
  std::vector<long> level_;
  std::vector<std::size_t> next_;
  double eps_ = 0.0;
};

}  // namespace

double cut_capacity(const FlowNetwork& net, const std::vector<bool>& source_side) {
  double total = 0.0;
  for (const auto& a : net.arcs())
    if (source_side[a.from] && !source_side[a.to]) total += a.capacity;
  return total;
}

FlowResult max_flow(const FlowNetwork& net) {
  FlowResult result = Dinic(net).run();
  const double cut = cut_capacity(net, result.source_side);
  if (std::abs(cut - result.value) > 1e-9 * std::max(1.0, std::abs(cut)))
    throw std::logic_error("max-flow value differs from the capacity of the residual cut");
  return result;
}

bool closure_supported(const Theory& theory) {
  switch (theory.language()) {
    case Language::Hier:
    case Language::TreeHier: return true;
    case Language::Hex: return theory.exclusions().empty();
    default: return false;
  }
}

namespace {

// Picard's reduction. Vertex v gains weight logit(p_v) when selected; an arc
// child -> parent of infinite capacity pulls the parent into any closure that
// selects the child.
class ClosureSolver {
 public:
  ClosureSolver(const Theory& theory, const ProbabilityVector& p)
      : theory_(theory), p_(p), n_(theory.num_vars()), net_(n_ + 2, n_, n_ + 1), parents_(n_) {
    if (!closure_supported(theory)) fail(ErrorKind::Intractable, "closure solver expects a hierarchy without exclusions");
    if (p.size() != n_) fail(ErrorKind::InvalidInput, "probability vector dimension does not match theory");
    weight_.resize(n_);
    double total = 0.0;
    for (std::size_t v = 0; v < n_; ++v) {
      weight_[v] = p.logit(v);
      total += std::abs(weight_[v]);
    }
    infinity_ = total + 1.0;
    for (std::size_t v = 0; v < n_; ++v) {
      from_source_.push_back(net_.add_arc(n_, v, 0.0));
      to_sink_.push_back(net_.add_arc(v, n_ + 1, 0.0));
    }
    for (auto [parent, child] : theory.implications()) {
      net_.add_arc(child, parent, infinity_);
      parents_[child].push_back(parent);
    }
  }

  std::optional<MpeResult> solve(const Evidence& forced) {
    if (!forced.empty() && forced.size() != n_) fail(ErrorKind::InvalidInput, "evidence dimension does not match theory");
    auto value = [&](std::size_t v) -> int { return forced.empty() ? -1 : forced[v]; };
    if (!consistent(forced)) return std::nullopt;
    for (std::size_t v = 0; v < n_; ++v) {
      net_.set_capacity(from_source_[v], value(v) == 1 ? infinity_ : std::max(weight_[v], 0.0));
      net_.set_capacity(to_sink_[v], value(v) == 0 ? infinity_ : std::max(-weight_[v], 0.0));
    }
    const FlowResult flow = max_flow(net_);
    State y(n_);
    for (std::size_t v = 0; v < n_; ++v) y.set(v, flow.source_side[v]);
    for (std::size_t v = 0; v < n_; ++v)
      if (value(v) >= 0 && y[v] != (value(v) == 1)) throw std::logic_error("closure violates a forced literal");
    if (!satisfies(theory_, y)) throw std::logic_error("min-cut side is not a closure");
    MpeResult r;
    r.log_probability = log_probability(p_, y);
    r.probability = std::exp(r.log_probability);
    r.state = std::move(y);
    return r;
  }

 private:
  // The ancestors of the vertices forced to 1 must all be free or forced to 1.
  bool consistent(const Evidence& forced) const {
    if (forced.empty()) return true;
    std::vector<char> pulled(n_, 0);
    std::vector<std::size_t> stack;
    for (std::size_t v = 0; v < n_; ++v)
      if (forced[v] == 1) {
        pulled[v] = 1;
        stack.push_back(v);
      }
    while (!stack.empty()) {
      const auto v = stack.back();
      stack.pop_back();
      if (forced[v] == 0) return false;
      for (auto u : parents_[v])
        if (!pulled[u]) {
          pulled[u] = 1;
          stack.push_back(u);
        }
    }
    return true;
  }

  const Theory& theory_;
  const ProbabilityVector& p_;
  std::size_t n_;
  FlowNetwork net_;
  std::vector<std::vector<std::size_t>> parents_;
  std::vector<double> weight_;
  std::vector<std::size_t> from_source_, to_sink_;
  double infinity_ = 1.0;
};

std::vector<RankedState> enumerate(const Theory& theory, const ProbabilityVector& p, std::optional<std::size_t> limit,
                                   std::optional<double> threshold) {
  ClosureSolver solver(theory, p);
  auto solve = [&](const Evidence& e) -> std::optional<RankedState> {
    auto r = solver.solve(e);
    if (!r) return std::nullopt;
    return RankedState{std::move(r->state), r->log_probability};
  };
  return lawler_enumerate(theory.num_vars(), solve, limit, threshold);
}

}  // namespace

std::optional<MpeResult> try_closure_mpe(const Theory& theory, const ProbabilityVector& p, const Evidence& forced) {
  return ClosureSolver(theory, p).solve(forced);
}

MpeResult closure_mpe(const Theory& theory, const ProbabilityVector& p, const Evidence& forced) {
  auto r = try_closure_mpe(theory, p, forced);
  if (!r) fail(ErrorKind::Unsatisfiable, "forced literals are inconsistent with every closure");
  return std::move(*r);
}

std::vector<RankedState> closure_thresh_enum(const Theory& theory, const ProbabilityVector& p, double threshold) {
  if (!(threshold > 0.0)) fail(ErrorKind::InvalidInput, "threshold must be positive");
  return enumerate(theory, p, std::nullopt, threshold);
}

std::vector<RankedState> closure_top_k(const Theory& theory, const ProbabilityVector& p, std::size_t k) {
  return enumerate(theory, p, k, std::nullopt);
}

}  // namespace nesykc
