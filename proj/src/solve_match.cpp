#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "nesykc/matching.hpp"

namespace nesykc {

namespace {

// Primal-dual blossom algorithm, following the structure of Van Rantwijk's
// widely used implementation (Galil's O(n^3) formulation). Endpoint p of edge
// k = p / 2 is endpoint[p]; blossoms are numbered n..2n-1.
class Blossom {
 public:
  Blossom(std::size_t num_vertices, const std::vector<WeightedEdge>& edges)
      : edges_(edges), nvertex_(static_cast<long>(num_vertices)), nedge_(static_cast<long>(edges.size())) {
    std::int64_t maxweight = 0;
    for (const auto& e : edges) {
      if (e.u >= num_vertices || e.v >= num_vertices || e.u == e.v)
        fail(ErrorKind::InvalidInput, "matching edge endpoints must be distinct vertices in range");
      maxweight = std::max(maxweight, e.weight);
    }
    const auto n = nvertex_;
    endpoint_.resize(2 * nedge_);
    neighbend_.resize(n);
    for (long k = 0; k < nedge_; ++k) {
      endpoint_[2 * k] = static_cast<long>(edges[k].u);
      endpoint_[2 * k + 1] = static_cast<long>(edges[k].v);
      neighbend_[edges[k].u].push_back(2 * k + 1);
      neighbend_[edges[k].v].push_back(2 * k);
    }
    mate_.assign(n, -1);
    label_.assign(2 * n, 0);
    labelend_.assign(2 * n, -1);
    inblossom_.resize(n);
    std::iota(inblossom_.begin(), inblossom_.end(), 0L);
    blossomparent_.assign(2 * n, -1);
    blossomchilds_.assign(2 * n, {});
    blossombase_.assign(2 * n, -1);
    std::iota(blossombase_.begin(), blossombase_.begin() + n, 0L);
    blossomendps_.assign(2 * n, {});
    bestedge_.assign(2 * n, -1);
    blossombestedges_.assign(2 * n, {});
    has_bestedges_.assign(2 * n, 0);
    for (long b = n; b < 2 * n; ++b) unusedblossoms_.push_back(b);
    dualvar_.assign(2 * n, 0);
    std::fill(dualvar_.begin(), dualvar_.begin() + n, maxweight);
    allowedge_.assign(nedge_, 0);
  }

  std::vector<long> run() {
    const auto n = nvertex_;
    for (long stage = 0; stage < n; ++stage) {
      std::fill(label_.begin(), label_.end(), 0);
      std::fill(bestedge_.begin(), bestedge_.end(), -1);
      for (long b = n; b < 2 * n; ++b) {
        blossombestedges_[b].clear();
        has_bestedges_[b] = 0;
      }
      std::fill(allowedge_.begin(), allowedge_.end(), 0);
      queue_.clear();
      for (long v = 0; v < n; ++v)
        if (mate_[v] == -1 && label_[inblossom_[v]] == 0) assign_label(v, 1, -1);

      bool augmented = false;
      while (true) {
        while (!queue_.empty() && !augmented) {
          const long v = queue_.back();
          queue_.pop_back();
          for (long p : neighbend_[v]) {
            const long k = p / 2;
            const long w = endpoint_[p];
            if (inblossom_[v] == inblossom_[w]) continue;
            std::int64_t kslack = 0;
            if (!allowedge_[k]) {
              kslack = slack(k);
              if (kslack <= 0) allowedge_[k] = 1;
            }
            if (allowedge_[k]) {
              if (label_[inblossom_[w]] == 0) {
                assign_label(w, 2, p ^ 1);
              } else if (label_[inblossom_[w]] == 1) {
                const long base = scan_blossom(v, w);
                if (base >= 0) {
                  add_blossom(base, k);
                } else {
                  augment_matching(k);
                  augmented = true;
                  break;
                }
              } else if (label_[w] == 0) {
                label_[w] = 2;
                labelend_[w] = p ^ 1;
              }
            } else if (label_[inblossom_[w]] == 1) {
              const long b = inblossom_[v];
              if (bestedge_[b] == -1 || kslack < slack(bestedge_[b])) bestedge_[b] = k;
            } else if (label_[w] == 0) {
              if (bestedge_[w] == -1 || kslack < slack(bestedge_[w])) bestedge_[w] = k;
            }
          }
        }
        if (augmented) break;

        // Dual adjustment.
        int deltatype = 1;
        std::int64_t delta = *std::min_element(dualvar_.begin(), dualvar_.begin() + n);
        long deltaedge = -1, deltablossom = -1;
        for (long v = 0; v < n; ++v) {
          if (label_[inblossom_[v]] == 0 && bestedge_[v] != -1) {
            const auto d = slack(bestedge_[v]);
            if (d < delta) {
              delta = d;
              deltatype = 2;
              deltaedge = bestedge_[v];
            }
          }
        }
        for (long b = 0; b < 2 * n; ++b) {
          if (blossomparent_[b] == -1 && label_[b] == 1 && bestedge_[b] != -1) {
            const auto d = slack(bestedge_[b]) / 2;
            if (d < delta) {
              delta = d;
              deltatype = 3;
              deltaedge = bestedge_[b];
            }
          }
        }
        for (long b = n; b < 2 * n; ++b) {
          if (blossombase_[b] >= 0 && blossomparent_[b] == -1 && label_[b] == 2 && dualvar_[b] < delta) {
            delta = dualvar_[b];
            deltatype = 4;
            deltablossom = b;
          }
        }
        for (long v = 0; v < n; ++v) {
          if (label_[inblossom_[v]] == 1)
            dualvar_[v] -= delta;
          else if (label_[inblossom_[v]] == 2)
            dualvar_[v] += delta;
        }
        for (long b = n; b < 2 * n; ++b) {
          if (blossombase_[b] >= 0 && blossomparent_[b] == -1) {
            if (label_[b] == 1)
              dualvar_[b] += delta;
            else if (label_[b] == 2)
              dualvar_[b] -= delta;
          }
        }
        if (deltatype == 1) break;
        if (deltatype == 2) {
          allowedge_[deltaedge] = 1;
          long i = static_cast<long>(edges_[deltaedge].u), j = static_cast<long>(edges_[deltaedge].v);
          if (label_[inblossom_[i]] == 0) std::swap(i, j);
          queue_.push_back(i);
        } else if (deltatype == 3) {
          allowedge_[deltaedge] = 1;
          queue_.push_back(static_cast<long>(edges_[deltaedge].u));
        } else {
          expand_blossom(deltablossom, false);
        }
      }
      if (!augmented) break;
      for (long b = n; b < 2 * n; ++b)
        if (blossomparent_[b] == -1 && blossombase_[b] >= 0 && label_[b] == 1 && dualvar_[b] == 0)
          expand_blossom(b, true);
    }
    std::vector<long> mate(n, -1);
    for (long v = 0; v < n; ++v)
      if (mate_[v] >= 0) mate[v] = endpoint_[mate_[v]];
    return mate;
  }

 private:
  std::int64_t slack(long k) const {
    const auto& e = edges_[k];
    return dualvar_[e.u] + dualvar_[e.v] - 2 * e.weight;
  }

  static long wrap(long j, std::size_t size) {
    const auto s = static_cast<long>(size);
    return ((j % s) + s) % s;
  }

  void leaves(long b, std::vector<long>& out) const {
    if (b < nvertex_) {
      out.push_back(b);
      return;
    }
    for (long t : blossomchilds_[b]) leaves(t, out);
  }

  std::vector<long> leaves(long b) const {
    std::vector<long> out;
    leaves(b, out);
    return out;
  }

  void assign_label(long w, int t, long p) {
    const long b = inblossom_[w];
    label_[w] = label_[b] = t;
    labelend_[w] = labelend_[b] = p;
    bestedge_[w] = bestedge_[b] = -1;
    if (t == 1) {
      leaves(b, queue_);
    } else if (t == 2) {
      const long base = blossombase_[b];
      assign_label(endpoint_[mate_[base]], 1, mate_[base] ^ 1);
    }
  }

  // Trace back from v and w to find a new blossom base, or -1 for an
  // augmenting path.
  long scan_blossom(long v, long w) {
    std::vector<long> path;
    long base = -1;
    while (v != -1 || w != -1) {
      long b = inblossom_[v];
      if (label_[b] & 4) {
        base = blossombase_[b];
        break;
      }
      path.push_back(b);
      label_[b] = 5;
      if (labelend_[b] == -1) {
        v = -1;
      } else {
        v = endpoint_[labelend_[b]];
        b = inblossom_[v];
        v = endpoint_[labelend_[b]];
      }
      if (w != -1) std::swap(v, w);
    }
    for (long b : path) label_[b] = 1;
    return base;
  }

  void add_blossom(long base, long k) {
    long v = static_cast<long>(edges_[k].u);
    long w = static_cast<long>(edges_[k].v);
    const long bb = inblossom_[base];
    long bv = inblossom_[v];
    long bw = inblossom_[w];
    const long b = unusedblossoms_.back();
    unusedblossoms_.pop_back();
    blossombase_[b] = base;
    blossomparent_[b] = -1;
    blossomparent_[bb] = b;
    auto& path = blossomchilds_[b];
    auto& endps = blossomendps_[b];
    path.clear();
    endps.clear();
    while (bv != bb) {
      blossomparent_[bv] = b;
      path.push_back(bv);
      endps.push_back(labelend_[bv]);
      v = endpoint_[labelend_[bv]];
      bv = inblossom_[v];
    }
    path.push_back(bb);
    std::reverse(path.begin(), path.end());
    std::reverse(endps.begin(), endps.end());
    endps.push_back(2 * k);
    while (bw != bb) {
      blossomparent_[bw] = b;
      path.push_back(bw);
      endps.push_back(labelend_[bw] ^ 1);
      w = endpoint_[labelend_[bw]];
      bw = inblossom_[w];
    }
    label_[b] = 1;
    labelend_[b] = labelend_[bb];
    dualvar_[b] = 0;
    for (long leaf : leaves(b)) {
      if (label_[inblossom_[leaf]] == 2) queue_.push_back(leaf);
      inblossom_[leaf] = b;
    }
    std::vector<long> bestedgeto(2 * nvertex_, -1);
    for (long child : path) {
      std::vector<long> candidates;
      if (!has_bestedges_[child]) {
        for (long leaf : leaves(child))
          for (long p : neighbend_[leaf]) candidates.push_back(p / 2);
      } else {
        candidates = blossombestedges_[child];
      }
      for (long kk : candidates) {
        long i = static_cast<long>(edges_[kk].u), j = static_cast<long>(edges_[kk].v);
        if (inblossom_[j] == b) std::swap(i, j);
        const long bj = inblossom_[j];
        if (bj != b && label_[bj] == 1 && (bestedgeto[bj] == -1 || slack(kk) < slack(bestedgeto[bj])))
          bestedgeto[bj] = kk;
      }
      blossombestedges_[child].clear();
      has_bestedges_[child] = 0;
      bestedge_[child] = -1;
    }
    blossombestedges_[b].clear();
    for (long kk : bestedgeto)
      if (kk != -1) blossombestedges_[b].push_back(kk);
    has_bestedges_[b] = 1;
    bestedge_[b] = -1;
    for (long kk : blossombestedges_[b])
      if (bestedge_[b] == -1 || slack(kk) < slack(bestedge_[b])) bestedge_[b] = kk;
  }

  void expand_blossom(long b, bool endstage) {
    for (long s : blossomchilds_[b]) {
      blossomparent_[s] = -1;
      if (s < nvertex_) {
        inblossom_[s] = s;
      } else if (endstage && dualvar_[s] == 0) {
        expand_blossom(s, endstage);
      } else {
        for (long leaf : leaves(s)) inblossom_[leaf] = s;
      }
    }
    if (!endstage && label_[b] == 2) {
      const auto& childs = blossomchilds_[b];
      const auto& endps = blossomendps_[b];
      const long entrychild = inblossom_[endpoint_[labelend_[b] ^ 1]];
      long j = static_cast<long>(std::find(childs.begin(), childs.end(), entrychild) - childs.begin());
      long jstep, endptrick;
      if (j & 1) {
        j -= static_cast<long>(childs.size());
        jstep = 1;
        endptrick = 0;
      } else {
        jstep = -1;
        endptrick = 1;
      }
      long p = labelend_[b];
      while (j != 0) {
        label_[endpoint_[p ^ 1]] = 0;
        label_[endpoint_[endps[wrap(j - endptrick, endps.size())] ^ endptrick ^ 1]] = 0;
        assign_label(endpoint_[p ^ 1], 2, p);
        allowedge_[endps[wrap(j - endptrick, endps.size())] / 2] = 1;
        j += jstep;
        p = endps[wrap(j - endptrick, endps.size())] ^ endptrick;
        allowedge_[p / 2] = 1;
        j += jstep;
      }
      long bv = childs[wrap(j, childs.size())];
      label_[endpoint_[p ^ 1]] = label_[bv] = 2;
      labelend_[endpoint_[p ^ 1]] = labelend_[bv] = p;
      bestedge_[bv] = -1;
      j += jstep;
      while (childs[wrap(j, childs.size())] != entrychild) {
        bv = childs[wrap(j, childs.size())];
        if (label_[bv] == 1) {
          j += jstep;
          continue;
        }
        long found = -1;
        for (long leaf : leaves(bv))
          if (label_[leaf] != 0) {
            found = leaf;
            break;
          }
        if (found != -1) {
          label_[found] = 0;
          label_[endpoint_[mate_[blossombase_[bv]]]] = 0;
          assign_label(found, 2, labelend_[found]);
        }
        j += jstep;
      }
    }
    label_[b] = -1;
    labelend_[b] = -1;
    blossomchilds_[b].clear();
    blossomendps_[b].clear();
    blossombase_[b] = -1;
    blossombestedges_[b].clear();
    has_bestedges_[b] = 0;
    bestedge_[b] = -1;
    unusedblossoms_.push_back(b);
  }

  // Swap matched and unmatched edges along the even path from v to the base of b.
  void augment_blossom(long b, long v) {
    long t = v;
    while (blossomparent_[t] != b) t = blossomparent_[t];
    if (t >= nvertex_) augment_blossom(t, v);
    auto& childs = blossomchilds_[b];
    auto& endps = blossomendps_[b];
    const long i = static_cast<long>(std::find(childs.begin(), childs.end(), t) - childs.begin());
    long j = i;
    long jstep, endptrick;
    if (i & 1) {
      j -= static_cast<long>(childs.size());
      jstep = 1;
      endptrick = 0;
    } else {
      jstep = -1;
      endptrick = 1;
    }
    while (j != 0) {
      j += jstep;
      t = childs[wrap(j, childs.size())];
      const long p = endps[wrap(j - endptrick, endps.size())] ^ endptrick;
      if (t >= nvertex_) augment_blossom(t, endpoint_[p]);
      j += jstep;
      t = childs[wrap(j, childs.size())];
      if (t >= nvertex_) augment_blossom(t, endpoint_[p ^ 1]);
      mate_[endpoint_[p]] = p ^ 1;
      mate_[endpoint_[p ^ 1]] = p;
    }
    std::rotate(childs.begin(), childs.begin() + i, childs.end());
    std::rotate(endps.begin(), endps.begin() + i, endps.end());
    blossombase_[b] = blossombase_[childs[0]];
  }

  void augment_matching(long k) {
    const long ends[2][2] = {{static_cast<long>(edges_[k].u), 2 * k + 1}, {static_cast<long>(edges_[k].v), 2 * k}};
    for (const auto& start : ends) {
      long s = start[0], p = start[1];
      while (true) {
        const long bs = inblossom_[s];
        if (bs >= nvertex_) augment_blossom(bs, s);
        mate_[s] = p;
        if (labelend_[bs] == -1) break;
        const long t = endpoint_[labelend_[bs]];
        const long bt = inblossom_[t];
        s = endpoint_[labelend_[bt]];
        const long j = endpoint_[labelend_[bt] ^ 1];
        if (bt >= nvertex_) augment_blossom(bt, j);
        mate_[j] = labelend_[bt];
        p = labelend_[bt] ^ 1;
      }
    }
  }

  const std::vector<WeightedEdge>& edges_;
  long nvertex_;
  long nedge_;
  std::vector<long> endpoint_;
  std::vector<std::vector<long>> neighbend_;
  std::vector<long> mate_;
  std::vector<int> label_;
  std::vector<long> labelend_;
  std::vector<long> inblossom_;
  std::vector<long> blossomparent_;
  std::vector<std::vector<long>> blossomchilds_;
  std::vector<long> blossombase_;
  std::vector<std::vector<long>> blossomendps_;
  std::vector<long> bestedge_;
  std::vector<std::vector<long>> blossombestedges_;
  std::vector<char> has_bestedges_;
  std::vector<long> unusedblossoms_;
  std::vector<std::int64_t> dualvar_;
  std::vector<char> allowedge_;
  std::vector<long> queue_;
};

void check_matching(std::size_t num_vertices, const std::vector<Edge>& edges, const std::vector<std::size_t>& chosen) {
  std::vector<char> used(num_vertices, 0);
  for (auto i : chosen) {
    const auto& e = edges[i];
    if (used[e.from] || used[e.to]) throw std::logic_error("edge set is not a matching");
    used[e.from] = used[e.to] = 1;
  }
}

// Largest integer scale keeping every scaled weight (times the tie multiplier)
// well inside int64.
double integer_scale(const std::vector<double>& weights, double multiplier) {
  double largest = 1.0;
  for (double w : weights) largest = std::max(largest, std::abs(w));
  return std::min(std::ldexp(1.0, 40), std::ldexp(1.0, 58) / (largest * multiplier));
}

}  // namespace

std::vector<long> max_weight_matching(std::size_t num_vertices, const std::vector<WeightedEdge>& edges) {
  return Blossom(num_vertices, edges).run();
}

std::vector<std::size_t> max_weight_matching(std::size_t num_vertices, const std::vector<Edge>& edges,
                                             const std::vector<double>& weights) {
  if (weights.size() != edges.size()) fail(ErrorKind::InvalidInput, "one weight per edge expected");
  for (double w : weights)
    if (!std::isfinite(w)) fail(ErrorKind::InvalidInput, "matching weights must be finite");
  const double scale = integer_scale(weights, 1.0);
  std::vector<WeightedEdge> scaled;
  std::vector<std::size_t> index;
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const auto w = std::llround(weights[i] * scale);
    if (w <= 0) continue;
    scaled.push_back({edges[i].from, edges[i].to, w});
    index.push_back(i);
  }
  const auto mate = max_weight_matching(num_vertices, scaled);
  std::vector<std::size_t> chosen;
  for (std::size_t k = 0; k < scaled.size(); ++k)
    if (mate[scaled[k].u] == static_cast<long>(scaled[k].v)) chosen.push_back(index[k]);
  std::sort(chosen.begin(), chosen.end());
  check_matching(num_vertices, edges, chosen);
  return chosen;
}

namespace {

class MatchSolver {
 public:
  MatchSolver(const Theory& theory, const ProbabilityVector& p) : p_(p) {
    if (theory.language() != Language::Match) fail(ErrorKind::InvalidInput, "matching solver expects a match theory");
    if (p.size() != theory.num_vars()) fail(ErrorKind::InvalidInput, "probability vector dimension does not match theory");
    const auto& g = theory.undirected_payload();
    num_vertices_ = g.vertices.size();
    // Edge i of the graph carries variable labels[i]; work per variable.
    edges_.resize(theory.num_vars());
    for (std::size_t i = 0; i < g.edges.size(); ++i) edges_[g.labels[i]] = g.edges[i];
    const auto k = edges_.size();
    logits_.resize(k);
    for (std::size_t i = 0; i < k; ++i) logits_[i] = p.logit(i);
    // Tie-break perturbation: subtracting the 1-based index from weights that
    // are multiples of a factor above any index sum.
    multiplier_ = static_cast<double>(k) * static_cast<double>(k + 1) / 2.0 + 1.0;
    scale_ = integer_scale(logits_, multiplier_);
  }

  std::optional<MpeResult> solve(const Evidence& forced) {
    const auto k = edges_.size();
    if (!forced.empty() && forced.size() != k) fail(ErrorKind::InvalidInput, "evidence dimension does not match theory");
    auto value = [&](std::size_t i) -> int { return forced.empty() ? -1 : forced[i]; };
    std::vector<char> covered(num_vertices_, 0);
    State y(k);
    for (std::size_t i = 0; i < k; ++i) {
      if (value(i) != 1) continue;
      const auto& e = edges_[i];
      if (covered[e.from] || covered[e.to]) return std::nullopt;
      covered[e.from] = covered[e.to] = 1;
      y.set(i, true);
    }
    std::vector<WeightedEdge> candidates;
    std::vector<std::size_t> index;
    const auto m = static_cast<std::int64_t>(multiplier_);
    for (std::size_t i = 0; i < k; ++i) {
      if (value(i) >= 0) continue;
      const auto& e = edges_[i];
      if (covered[e.from] || covered[e.to]) continue;
      const std::int64_t w = std::llround(logits_[i] * scale_) * m - static_cast<std::int64_t>(i + 1);
      if (w <= 0) continue;
      candidates.push_back({e.from, e.to, w});
      index.push_back(i);
    }
    const auto mate = max_weight_matching(num_vertices_, candidates);
    for (std::size_t c = 0; c < candidates.size(); ++c)
      if (mate[candidates[c].u] == static_cast<long>(candidates[c].v)) y.set(index[c], true);
    check_matching(num_vertices_, edges_, y.ones());
    MpeResult r;
    r.log_probability = log_probability(p_, y);
    r.probability = std::exp(r.log_probability);
    r.state = std::move(y);
    return r;
  }

 private:
  const ProbabilityVector& p_;
  std::size_t num_vertices_ = 0;
  std::vector<Edge> edges_;
  std::vector<double> logits_;
  double multiplier_ = 1.0;
  double scale_ = 1.0;
};

std::vector<RankedState> enumerate(const Theory& theory, const ProbabilityVector& p, std::optional<std::size_t> limit,
                                   std::optional<double> threshold) {
  MatchSolver solver(theory, p);
  auto solve = [&](const Evidence& e) -> std::optional<RankedState> {
    auto r = solver.solve(e);
    if (!r) return std::nullopt;
    return RankedState{std::move(r->state), r->log_probability};
  };
  return lawler_enumerate(theory.num_vars(), solve, limit, threshold);
}

}  // namespace

std::optional<MpeResult> try_match_mpe(const Theory& theory, const ProbabilityVector& p, const Evidence& forced) {
  return MatchSolver(theory, p).solve(forced);
}

MpeResult match_mpe(const Theory& theory, const ProbabilityVector& p, const Evidence& forced) {
  auto r = try_match_mpe(theory, p, forced);
  if (!r) fail(ErrorKind::InvalidInput, "forced edges share a vertex");
  return std::move(*r);
}

std::vector<RankedState> match_thresh_enum(const Theory& theory, const ProbabilityVector& p, double threshold) {
  if (!(threshold > 0.0)) fail(ErrorKind::InvalidInput, "threshold must be positive");
  return enumerate(theory, p, std::nullopt, threshold);
}

std::vector<RankedState> match_top_k(const Theory& theory, const ProbabilityVector& p, std::size_t k) {
  return enumerate(theory, p, k, std::nullopt);
}

}  // namespace nesykc
