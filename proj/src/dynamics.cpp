#include "sprtree/dynamics.hpp"

#include <algorithm>
#include <bit>
#include <map>
#include <numeric>
#include <queue>
#include <stdexcept>

namespace sprtree {

JumpStep spr_jump_step(const WeightedTree& t, Rng& rng, double time_scale) {
  double rate = t.total_length() * time_scale;
  if (!(rate > 0)) throw std::domain_error("spr_jump_step: degenerate tree");
  JumpStep step;
  step.holding_time = rng.exponential(rate);
  PointRef u = sample_length_point(t, rng);
  PointRef v = sample_weight_point(t, rng);
  step.next = spr(t, u, v);
  return step;
}

namespace {

JumpRecord observe(const WeightedTree& t, int index, double time, const PointRef& root) {
  JumpRecord r;
  r.jump_index = index;
  r.time = time;
  r.mean_dist = t.has_weight() ? mean_dist(t) : 0.0;
  r.height = height_from(t, root);
  r.diameter = diameter(t);
  r.total_length = t.total_length();
  return r;
}

}  // namespace

ChainTrajectory run_chain(const WeightedTree& t0, double horizon,
                          const std::vector<int>& snapshot_indices, Rng& rng, double time_scale) {
  if (!(horizon > 0)) throw std::invalid_argument("run_chain: horizon must be positive");
  ChainTrajectory traj;
  WeightedTree cur = t0;
  PointRef root = PointRef::at_vertex(t0.root() >= 0 ? t0.root() : 0);
  traj.records.push_back(observe(cur, 0, 0.0, root));
  double time = 0;
  int index = 0;
  for (;;) {
    JumpStep step = spr_jump_step(cur, rng, time_scale);
    if (time + step.holding_time > horizon) break;
    time += step.holding_time;
    cur = std::move(step.next);
    ++index;
    traj.records.push_back(observe(cur, index, time, root));
    if (std::find(snapshot_indices.begin(), snapshot_indices.end(), index) !=
        snapshot_indices.end())
      traj.snapshots.emplace(index, cur);
  }
  traj.final_tree = std::move(cur);
  return traj;
}

int Cladogram::vertex_count() const {
  int m = 0;
  for (auto [a, b] : edges) m = std::max({m, a, b});
  return m + 1;
}

Cladogram Cladogram::star3() {
  Cladogram c;
  c.n_leaves = 3;
  c.edges = {{0, 3}, {1, 3}, {2, 3}};
  return c;
}

namespace {

// compact internal vertex ids to n_leaves..; leaves keep their labels
Cladogram normalize(int n_leaves, std::vector<std::pair<int, int>> edges) {
  std::map<int, int> remap;
  int next = n_leaves;
  auto id = [&](int v) {
    if (v < n_leaves) return v;
    auto it = remap.find(v);
    if (it != remap.end()) return it->second;
    remap[v] = next;
    return next++;
  };
  for (auto& [a, b] : edges) {
    a = id(a);
    b = id(b);
    if (a > b) std::swap(a, b);
  }
  std::sort(edges.begin(), edges.end());
  Cladogram c;
  c.n_leaves = n_leaves;
  c.edges = std::move(edges);
  return c;
}

std::vector<std::vector<int>> clad_adjacency(const Cladogram& c) {
  std::vector<std::vector<int>> adj(c.vertex_count());
  for (auto [a, b] : c.edges) {
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  return adj;
}

// leaves reachable from `start` without crossing the edge (block_a, block_b)
std::uint64_t side_leaves(const Cladogram& c, int start, int block_a, int block_b) {
  auto adj = clad_adjacency(c);
  std::vector<char> seen(c.vertex_count(), 0);
  std::queue<int> q;
  q.push(start);
  seen[start] = 1;
  std::uint64_t mask = 0;
  while (!q.empty()) {
    int v = q.front();
    q.pop();
    if (v < c.n_leaves) mask |= (1ULL << v);
    for (int w : adj[v]) {
      if ((v == block_a && w == block_b) || (v == block_b && w == block_a)) continue;
      if (!seen[w]) {
        seen[w] = 1;
        q.push(w);
      }
    }
  }
  return mask;
}

}  // namespace

std::vector<std::uint64_t> topology_key(const Cladogram& c) {
  std::uint64_t full = (1ULL << c.n_leaves) - 1;
  std::vector<std::uint64_t> key;
  for (auto [a, b] : c.edges) {
    std::uint64_t side = side_leaves(c, a, a, b);
    std::uint64_t split = std::min(side, full & ~side);
    if (std::popcount(split) >= 2) key.push_back(split);
  }
  std::sort(key.begin(), key.end());
  return key;
}

namespace {

struct Move {
  Cladogram result;
  int remaining_edges = 0;  // 0 marks the single-vertex self-loop
};

// all outcomes of cutting `edge_idx` with the pruned part on `prune_side`
// (0 = first endpoint, 1 = second), one Move per regraft edge
std::vector<Move> moves_for(const Cladogram& c, int edge_idx, int prune_side) {
  auto [p, q] = c.edges[edge_idx];
  int keep = prune_side == 0 ? q : p;   // endpoint staying with the host
  int prune = prune_side == 0 ? p : q;  // root of the pruned part, stem rides along

  auto adj = clad_adjacency(c);
  std::vector<char> host(c.vertex_count(), 0);
  {
    std::queue<int> bq;
    bq.push(keep);
    host[keep] = 1;
    while (!bq.empty()) {
      int v = bq.front();
      bq.pop();
      for (int w : adj[v]) {
        if ((v == p && w == q) || (v == q && w == p)) continue;
        if (!host[w]) {
          host[w] = 1;
          bq.push(w);
        }
      }
    }
  }

  std::vector<std::pair<int, int>> host_edges, pruned_edges;
  for (std::size_t i = 0; i < c.edges.size(); ++i) {
    if (i == static_cast<std::size_t>(edge_idx)) continue;
    auto [a, b] = c.edges[i];
    (host[a] ? host_edges : pruned_edges).push_back({a, b});
  }

  std::vector<Move> out;
  if (host_edges.empty()) {
    // host is the bare vertex `keep`: the only regraft restores the topology
    Move m;
    m.result = normalize(c.n_leaves, c.edges);
    m.remaining_edges = 0;
    out.push_back(std::move(m));
    return out;
  }

  // suppress `keep` if the cut left it with degree 2
  std::vector<int> kn;
  for (int w : adj[keep])
    if (host[w] && !(keep == p && w == q) && !(keep == q && w == p)) kn.push_back(w);
  if (kn.size() == 2) {
    std::vector<std::pair<int, int>> merged;
    for (auto [a, b] : host_edges) {
      if (a == keep || b == keep) continue;
      merged.push_back({a, b});
    }
    merged.push_back({kn[0], kn[1]});
    host_edges = std::move(merged);
  }

  int fresh = c.vertex_count();  // id for the regraft vertex
  for (std::size_t f = 0; f < host_edges.size(); ++f) {
    std::vector<std::pair<int, int>> edges = pruned_edges;
    for (std::size_t i = 0; i < host_edges.size(); ++i) {
      if (i == f) continue;
      edges.push_back(host_edges[i]);
    }
    auto [fa, fb] = host_edges[f];
    edges.push_back({fa, fresh});
    edges.push_back({fresh, fb});
    edges.push_back({fresh, prune});
    Move m;
    m.result = normalize(c.n_leaves, std::move(edges));
    m.remaining_edges = static_cast<int>(host_edges.size());
    out.push_back(std::move(m));
  }
  return out;
}

}  // namespace

Cladogram cladogram_spr_step(const Cladogram& c, Rng& rng) {
  if (c.n_leaves < 3) throw std::invalid_argument("cladogram step: needs >= 3 leaves");
  int e = rng.uniform_int(static_cast<int>(c.edges.size()));
  int side = rng.uniform_int(2);
  auto moves = moves_for(c, e, side);
  if (moves.size() == 1) return moves[0].result;
  int f = rng.uniform_int(static_cast<int>(moves.size()));
  return moves[f].result;
}

namespace {

// insert leaf with label `leaf` into edge e of a tree whose leaves are
// 0..leaf-1; internal ids are moved out of the way of the new label first
Cladogram grow_leaf(const Cladogram& c, std::size_t e, int leaf) {
  constexpr int kShift = 1 << 20;
  std::vector<std::pair<int, int>> edges = c.edges;
  for (auto& [a, b] : edges) {
    if (a >= c.n_leaves) a += kShift;
    if (b >= c.n_leaves) b += kShift;
  }
  auto [a, b] = edges[e];
  edges.erase(edges.begin() + e);
  int y = 2 * kShift;
  edges.push_back({a, y});
  edges.push_back({y, b});
  edges.push_back({y, leaf});
  return normalize(leaf + 1, std::move(edges));
}

}  // namespace

Cladogram Cladogram::random_topology(int n, Rng& rng) {
  Cladogram c = normalize(3, star3().edges);
  for (int leaf = 3; leaf < n; ++leaf) {
    std::size_t e = static_cast<std::size_t>(rng.uniform_int(static_cast<int>(c.edges.size())));
    c = grow_leaf(c, e, leaf);
  }
  return c;
}

std::vector<Cladogram> enumerate_topologies(int n_leaves) {
  if (n_leaves < 3 || n_leaves > 6)
    throw std::invalid_argument("enumerate_topologies: supported for 3..6 leaves");
  std::vector<Cladogram> cur{normalize(3, Cladogram::star3().edges)};
  for (int leaf = 3; leaf < n_leaves; ++leaf) {
    std::map<std::vector<std::uint64_t>, Cladogram> next;
    for (const auto& c : cur)
      for (std::size_t e = 0; e < c.edges.size(); ++e) {
        Cladogram grown = grow_leaf(c, e, leaf);
        next.emplace(topology_key(grown), grown);
      }
    cur.clear();
    for (auto& [k, v] : next) cur.push_back(std::move(v));
  }
  return cur;
}

std::vector<std::vector<double>> transition_matrix(int n_leaves) {
  auto topos = enumerate_topologies(n_leaves);
  std::map<std::vector<std::uint64_t>, int> index;
  for (std::size_t i = 0; i < topos.size(); ++i) index[topology_key(topos[i])] = static_cast<int>(i);

  const int E = static_cast<int>(topos.front().edges.size());
  // common denominator: 2E * lcm of the possible regraft-edge counts
  long lcm = 1;
  for (const auto& c : topos)
    for (int e = 0; e < E; ++e)
      for (int side = 0; side < 2; ++side)
        for (const auto& m : moves_for(c, e, side))
          if (m.remaining_edges > 0) lcm = std::lcm(lcm, static_cast<long>(m.remaining_edges));

  std::vector<std::vector<long>> counts(topos.size(), std::vector<long>(topos.size(), 0));
  for (std::size_t i = 0; i < topos.size(); ++i) {
    for (int e = 0; e < E; ++e) {
      for (int side = 0; side < 2; ++side) {
        auto moves = moves_for(topos[i], e, side);
        for (const auto& m : moves) {
          int j = index.at(topology_key(m.result));
          counts[i][j] += (m.remaining_edges == 0) ? lcm : lcm / m.remaining_edges;
        }
      }
    }
  }
  const double denom = static_cast<double>(2L * E * lcm);
  std::vector<std::vector<double>> out(topos.size(), std::vector<double>(topos.size(), 0.0));
  for (std::size_t i = 0; i < topos.size(); ++i)
    for (std::size_t j = 0; j < topos.size(); ++j) out[i][j] = counts[i][j] / denom;
  return out;
}

}  // namespace sprtree
