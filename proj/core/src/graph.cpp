#include "skipdisk/graph.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "skipdisk/distance.hpp"
#include "skipdisk/frontier.hpp"

namespace skipdisk {

namespace {

// Reusable per-build scratch: an epoch-stamped seen set avoids clearing
// an n-sized array between insertions.
struct BuildScratch {
  explicit BuildScratch(std::size_t n, std::size_t l)
      : stamp(n, 0), frontier(l) {}

  bool mark_seen(PointId id) {
    if (stamp[id] == epoch) return false;
    stamp[id] = epoch;
    return true;
  }
  void next_query() { ++epoch; }

  std::vector<std::uint32_t> stamp;
  std::uint32_t epoch = 1;
  FrontierList frontier;
  std::vector<std::pair<float, PointId>> visited;  // popped nodes, in pop order
};

// Greedy search over the working graph; fills scratch.visited with the
// expanded nodes and their distances to the query.
void greedy_search_build(const VectorDataset& data, const NeighborGraph& g,
                         const float* query, PointId entry,
                         BuildScratch& scratch) {
  scratch.next_query();
  scratch.frontier.clear();
  scratch.visited.clear();
  scratch.mark_seen(entry);
  scratch.frontier.insert(l2_sq(query, data.vec(entry).data(), data.dim),
                          entry);
  while (scratch.frontier.has_unchecked()) {
    auto e = scratch.frontier.pop_unchecked();
    scratch.visited.emplace_back(e.dist, e.id);
    for (PointId nb : g.neighbors(e.id)) {
      if (!scratch.mark_seen(nb)) continue;
      scratch.frontier.insert(l2_sq(query, data.vec(nb).data(), data.dim), nb);
    }
  }
}

void set_neighbors(NeighborGraph& g, PointId i,
                   std::span<const PointId> nbrs) {
  PointId* row = g.adjacency.data() + static_cast<std::size_t>(i) * g.r;
  std::copy(nbrs.begin(), nbrs.end(), row);
  g.len[i] = static_cast<std::uint8_t>(nbrs.size());
}

}  // namespace

PointId medoid(const VectorDataset& data) {
  const std::size_t n = data.size();
  if (n == 0) throw DataError("medoid: empty dataset");
  // Deterministic sample: evenly strided ids, at most 100000.
  const std::size_t cap = 100000;
  const std::size_t stride = n <= cap ? 1 : (n + cap - 1) / cap;

  std::vector<double> centroid(data.dim, 0.0);
  std::size_t count = 0;
  for (std::size_t i = 0; i < n; i += stride) {
    auto v = data.vec(i);
    for (std::uint32_t j = 0; j < data.dim; ++j) centroid[j] += v[j];
    ++count;
  }
  std::vector<float> c(data.dim);
  for (std::uint32_t j = 0; j < data.dim; ++j) {
    c[j] = static_cast<float>(centroid[j] / static_cast<double>(count));
  }
  PointId best = 0;
  float best_d = std::numeric_limits<float>::infinity();
  for (std::size_t i = 0; i < n; i += stride) {
    float d = l2_sq(c.data(), data.vec(i).data(), data.dim);
    if (d < best_d) {
      best_d = d;
      best = static_cast<PointId>(i);
    }
  }
  return best;
}

std::vector<PointId> robust_prune(
    const VectorDataset& data,
    std::span<const std::pair<float, PointId>> sorted_candidates, float alpha,
    std::uint32_t r) {
  // Graduated occlusion: rounds at slack 1.0, then x1.2 per round up to
  // alpha.  Early rounds admit only candidates no kept neighbor occludes,
  // which preserves long-range edges; later rounds relax the slack until
  // R neighbors are kept.  A candidate c' is occluded at slack a by a
  // kept c when a * dist(c, c') <= dist(target, c'); on squared
  // distances the factor dist^2(target, c') / dist^2(c, c') is compared
  // against a^2.
  constexpr float kSelected = std::numeric_limits<float>::infinity();
  std::vector<PointId> kept;
  kept.reserve(r);
  std::vector<float> occl_sq(sorted_candidates.size(), 0.0f);
  float cur = 1.0f;
  while (kept.size() < r && cur <= alpha * 1.0001f) {
    const float cur_sq = cur * cur;
    for (std::size_t i = 0;
         i < sorted_candidates.size() && kept.size() < r; ++i) {
      if (occl_sq[i] == kSelected || occl_sq[i] > cur_sq) continue;
      occl_sq[i] = kSelected;
      kept.push_back(sorted_candidates[i].second);
      const float* cv = data.vec(sorted_candidates[i].second).data();
      for (std::size_t j = i + 1; j < sorted_candidates.size(); ++j) {
        if (occl_sq[j] == kSelected) continue;
        float d_cc = l2_sq(cv, data.vec(sorted_candidates[j].second).data(),
                           data.dim);
        if (d_cc == 0.0f) {
          // Duplicate of a kept candidate: occluded at every slack.
          occl_sq[j] = kSelected;
          continue;
        }
        occl_sq[j] =
            std::max(occl_sq[j], sorted_candidates[j].first / d_cc);
      }
    }
    cur *= 1.2f;
  }
  return kept;
}

NeighborGraph build_vamana(const VectorDataset& data, const BuildParams& params,
                           std::uint64_t seed) {
  const std::size_t n = data.size();
  if (n < 2) throw DataError("build_vamana: need at least two points");
  if (params.r < 2) throw ConfigError("build_vamana: R must be >= 2");
  if (params.l_build < params.r) {
    throw ConfigError("build_vamana: L_build must be >= R");
  }
  if (params.alpha < 1.0f) throw ConfigError("build_vamana: alpha must be >= 1");

  NeighborGraph g;
  g.r = params.r;
  g.adjacency.assign(n * static_cast<std::size_t>(params.r), 0);
  g.len.assign(n, 0);

  // Random initialization: up to R distinct neighbors per node.
  Rng init_rng(derive_seed(seed, seed_tag::kGraphInit));
  const std::uint32_t init_deg =
      static_cast<std::uint32_t>(std::min<std::size_t>(params.r, n - 1));
  for (std::size_t i = 0; i < n; ++i) {
    PointId* row = g.adjacency.data() + i * params.r;
    std::uint32_t got = 0;
    while (got < init_deg) {
      PointId cand = static_cast<PointId>(init_rng.bounded(n));
      if (cand == i) continue;
      bool dup = false;
      for (std::uint32_t j = 0; j < got; ++j) {
        if (row[j] == cand) {
          dup = true;
          break;
        }
      }
      if (dup) continue;
      row[got++] = cand;
    }
    g.len[i] = static_cast<std::uint8_t>(init_deg);
  }

  g.entry = medoid(data);

  std::vector<PointId> order(n);
  std::iota(order.begin(), order.end(), 0u);
  Rng order_rng(derive_seed(seed, seed_tag::kGraphOrder));
  for (std::size_t i = n - 1; i > 0; --i) {
    std::size_t j = order_rng.bounded(i + 1);
    std::swap(order[i], order[j]);
  }

  BuildScratch scratch(n, params.l_build);
  std::vector<std::pair<float, PointId>> cand;
  std::vector<std::pair<float, PointId>> rev_cand;

  for (int pass = 0; pass < 2; ++pass) {
    for (std::size_t oi = 0; oi < n; ++oi) {
      PointId p = order[oi];
      const float* pv = data.vec(p).data();
      greedy_search_build(data, g, pv, g.entry, scratch);

      // Candidate set: visited nodes plus current neighbors, dedup by id,
      // excluding p itself.
      cand.clear();
      for (auto& [d, id] : scratch.visited) {
        if (id != p) cand.emplace_back(d, id);
      }
      for (PointId nb : g.neighbors(p)) {
        if (nb == p) continue;
        cand.emplace_back(l2_sq(pv, data.vec(nb).data(), data.dim), nb);
      }
      // A repeated id always carries the identical computed distance, so
      // duplicates are adjacent after the (dist, id) sort.
      std::sort(cand.begin(), cand.end());
      cand.erase(std::unique(cand.begin(), cand.end()), cand.end());

      std::vector<PointId> pruned =
          robust_prune(data, cand, params.alpha, params.r);
      set_neighbors(g, p, pruned);

      // Reverse edges with immediate re-prune on overflow.
      for (PointId nb : pruned) {
        auto existing = g.neighbors(nb);
        if (std::find(existing.begin(), existing.end(), p) != existing.end()) {
          continue;
        }
        if (g.len[nb] < params.r) {
          g.adjacency[static_cast<std::size_t>(nb) * params.r + g.len[nb]] = p;
          ++g.len[nb];
          continue;
        }
        const float* nv = data.vec(nb).data();
        rev_cand.clear();
        for (PointId x : existing) {
          rev_cand.emplace_back(l2_sq(nv, data.vec(x).data(), data.dim), x);
        }
        rev_cand.emplace_back(l2_sq(nv, pv, data.dim), p);
        std::sort(rev_cand.begin(), rev_cand.end());
        std::vector<PointId> repruned =
            robust_prune(data, rev_cand, params.alpha, params.r);
        set_neighbors(g, nb, repruned);
      }
    }
  }
  return g;
}

std::vector<std::uint32_t> indegree_counts(const NeighborGraph& graph) {
  std::vector<std::uint32_t> deg(graph.size(), 0);
  for (std::size_t i = 0; i < graph.size(); ++i) {
    for (PointId nb : graph.neighbors(static_cast<PointId>(i))) ++deg[nb];
  }
  return deg;
}

double reachable_fraction(const NeighborGraph& graph) {
  std::vector<std::uint8_t> seen(graph.size(), 0);
  std::vector<PointId> stack{graph.entry};
  seen[graph.entry] = 1;
  std::size_t count = 0;
  while (!stack.empty()) {
    PointId p = stack.back();
    stack.pop_back();
    ++count;
    for (PointId nb : graph.neighbors(p)) {
      if (!seen[nb]) {
        seen[nb] = 1;
        stack.push_back(nb);
      }
    }
  }
  return static_cast<double>(count) / static_cast<double>(graph.size());
}

}  // namespace skipdisk
