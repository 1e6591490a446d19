#include "sprtree/rtree.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <queue>
#include <stdexcept>

#include "json.hpp"

namespace sprtree {

WeightedTree::WeightedTree(int n_vertices, std::vector<Edge> edges, std::vector<WeightAtom> atoms,
                           int root)
    : n_(n_vertices), edges_(std::move(edges)), atoms_(std::move(atoms)), root_(root) {
  build_and_validate();
}

void WeightedTree::build_and_validate() {
  if (n_ < 1) throw std::invalid_argument("tree: needs at least one vertex");
  if (static_cast<int>(edges_.size()) != n_ - 1)
    throw std::invalid_argument("tree: edge count must be vertex count - 1");
  adj_.assign(n_, {});
  for (std::size_t i = 0; i < edges_.size(); ++i) {
    const Edge& e = edges_[i];
    if (e.a < 0 || e.a >= n_ || e.b < 0 || e.b >= n_ || e.a == e.b)
      throw std::invalid_argument("tree: bad edge endpoints");
    if (!(e.len > 0)) throw std::invalid_argument("tree: edge length must be positive");
    adj_[e.a].push_back({e.b, static_cast<int>(i)});
    adj_[e.b].push_back({e.a, static_cast<int>(i)});
  }
  parent_.assign(n_, -1);
  depth_.assign(n_, -1);
  dist_up_.assign(n_, 0.0);
  std::queue<int> q;
  q.push(0);
  depth_[0] = 0;
  int seen = 0;
  std::vector<int> parent_edge(n_, -1);
  while (!q.empty()) {
    int v = q.front();
    q.pop();
    ++seen;
    for (auto [w, eid] : adj_[v]) {
      if (depth_[w] >= 0) continue;
      depth_[w] = depth_[v] + 1;
      parent_[w] = v;
      parent_edge[w] = eid;
      dist_up_[w] = dist_up_[v] + edges_[eid].len;
      q.push(w);
    }
  }
  if (seen != n_) throw std::invalid_argument("tree: not connected");
  if (root_ >= n_) throw std::invalid_argument("tree: root out of range");
  if (!atoms_.empty()) {
    double total = 0;
    for (const auto& a : atoms_) {
      if (a.mass < 0) throw std::invalid_argument("tree: negative atom mass");
      check_ref(a.at);
      total += a.mass;
    }
    if (std::fabs(total - 1.0) > 1e-12)
      throw std::invalid_argument("tree: atom masses must sum to 1");
  }
}

void WeightedTree::check_ref(const PointRef& p) const {
  if (p.is_vertex()) {
    if (p.vertex >= n_) throw std::invalid_argument("tree: vertex ref out of range");
    return;
  }
  if (p.edge < 0 || p.edge >= static_cast<int>(edges_.size()))
    throw std::invalid_argument("tree: edge ref out of range");
  if (!(p.offset > 0 && p.offset < edges_[p.edge].len))
    throw std::invalid_argument("tree: edge offset must be strictly interior");
}

int WeightedTree::lca(int u, int v) const {
  while (depth_[u] > depth_[v]) u = parent_[u];
  while (depth_[v] > depth_[u]) v = parent_[v];
  while (u != v) {
    u = parent_[u];
    v = parent_[v];
  }
  return u;
}

double WeightedTree::distance(int u, int v) const {
  if (u == v) return 0.0;
  int a = lca(u, v);
  return dist_up_[u] + dist_up_[v] - 2.0 * dist_up_[a];
}

double WeightedTree::distance(const PointRef& p, const PointRef& q) const {
  check_ref(p);
  check_ref(q);
  if (p.is_vertex() && q.is_vertex()) return distance(p.vertex, q.vertex);
  if (!p.is_vertex() && !q.is_vertex() && p.edge == q.edge)
    return std::fabs(p.offset - q.offset);
  auto expand = [&](const PointRef& r, int& va, int& vb, double& da, double& db) {
    if (r.is_vertex()) {
      va = vb = r.vertex;
      da = db = 0.0;
    } else {
      va = edges_[r.edge].a;
      vb = edges_[r.edge].b;
      da = r.offset;
      db = edges_[r.edge].len - r.offset;
    }
  };
  int pa, pb, qa, qb;
  double pda, pdb, qda, qdb;
  expand(p, pa, pb, pda, pdb);
  expand(q, qa, qb, qda, qdb);
  double best = pda + qda + distance(pa, qa);
  best = std::min(best, pda + qdb + distance(pa, qb));
  best = std::min(best, pdb + qda + distance(pb, qa));
  best = std::min(best, pdb + qdb + distance(pb, qb));
  return best;
}

double WeightedTree::total_length() const {
  double s = 0;
  for (const auto& e : edges_) s += e.len;
  return s;
}

namespace {

// Mutable working copy used by the surgery operations: points can be
// materialized as vertices, splitting edges and re-anchoring atoms. Refs
// registered with track() are kept valid across splits, so several points
// on one original edge can be materialized in sequence.
struct MutableTree {
  int n;
  std::vector<Edge> edges;
  std::vector<WeightAtom> atoms;
  int root;
  std::vector<PointRef> tracked;

  explicit MutableTree(const WeightedTree& t)
      : n(t.vertex_count()), edges(t.edges()), atoms(t.weights()), root(t.root()) {}

  int track(const PointRef& p) {
    tracked.push_back(p);
    return static_cast<int>(tracked.size()) - 1;
  }

  int split_edge(int eid, double off) {
    Edge e = edges[eid];
    int m = n++;
    edges[eid] = {e.a, m, off};
    int upper = static_cast<int>(edges.size());
    edges.push_back({m, e.b, e.len - off});
    auto remap = [&](PointRef& r) {
      if (r.is_vertex() || r.edge != eid) return;
      if (r.offset == off) {
        r = PointRef::at_vertex(m);
      } else if (r.offset > off) {
        r = PointRef::on_edge(upper, r.offset - off);
      }
    };
    for (auto& atom : atoms) remap(atom.at);
    for (auto& r : tracked) remap(r);
    return m;
  }

  int materialize(int tracked_idx) {
    PointRef p = tracked[tracked_idx];
    if (p.is_vertex()) return p.vertex;
    int m = split_edge(p.edge, p.offset);
    tracked[tracked_idx] = PointRef::at_vertex(m);
    return m;
  }

  int materialize(const PointRef& p) { return materialize(track(p)); }

  std::vector<std::vector<std::pair<int, int>>> adjacency() const {
    std::vector<std::vector<std::pair<int, int>>> adj(n);
    for (std::size_t i = 0; i < edges.size(); ++i) {
      adj[edges[i].a].push_back({edges[i].b, static_cast<int>(i)});
      adj[edges[i].b].push_back({edges[i].a, static_cast<int>(i)});
    }
    return adj;
  }

  WeightedTree freeze() const { return WeightedTree(n, edges, atoms, root); }
};

// parents of every vertex when the tree is rooted at r
std::vector<int> root_parents(const std::vector<std::vector<std::pair<int, int>>>& adj, int r) {
  std::vector<int> par(adj.size(), -2);
  par[r] = -1;
  std::queue<int> q;
  q.push(r);
  while (!q.empty()) {
    int v = q.front();
    q.pop();
    for (auto [w, eid] : adj[v]) {
      (void)eid;
      if (par[w] != -2) continue;
      par[w] = v;
      q.push(w);
    }
  }
  return par;
}

}  // namespace

double mean_dist(const WeightedTree& t) {
  if (!t.has_weight()) throw std::invalid_argument("mean_dist: tree carries no weight");
  MutableTree mt(t);
  for (std::size_t i = 0; i < mt.atoms.size(); ++i) mt.materialize(mt.atoms[i].at);
  std::vector<double> vmass(mt.n, 0.0);
  for (const auto& a : mt.atoms) vmass[a.at.vertex] += a.mass;
  auto adj = mt.adjacency();
  auto par = root_parents(adj, 0);
  // accumulate subtree masses leaf-to-root
  std::vector<int> order;
  order.reserve(mt.n);
  {
    std::queue<int> q;
    q.push(0);
    while (!q.empty()) {
      int v = q.front();
      q.pop();
      order.push_back(v);
      for (auto [w, eid] : adj[v]) {
        (void)eid;
        if (w != par[v]) q.push(w);
      }
    }
  }
  std::vector<double> sub(vmass);
  for (int i = mt.n - 1; i >= 0; --i) {
    int v = order[i];
    if (par[v] >= 0) sub[par[v]] += sub[v];
  }
  double total = 0;
  for (const auto& e : mt.edges) {
    int child = (par[e.b] == e.a) ? e.b : e.a;
    double m = sub[child];
    total += 2.0 * e.len * m * (1.0 - m);
  }
  return total;
}

double height_from(const WeightedTree& t, const PointRef& root) {
  t.check_ref(root);
  double h = 0;
  for (int v = 0; v < t.vertex_count(); ++v)
    h = std::max(h, t.distance(root, PointRef::at_vertex(v)));
  return h;
}

double diameter(const WeightedTree& t) {
  if (t.vertex_count() == 1) return 0.0;
  auto farthest = [&](int s) {
    int best = s;
    double bd = 0;
    for (int v = 0; v < t.vertex_count(); ++v) {
      double d = t.distance(s, v);
      if (d > bd) {
        bd = d;
        best = v;
      }
    }
    return std::make_pair(best, bd);
  };
  auto [a, d0] = farthest(0);
  (void)d0;
  return farthest(a).second;
}

namespace {

// Skeleton assembly shared by the trimmings: kept vertices plus kept
// sub-intervals of edges, with back-references into the source tree.
struct Skeleton {
  WeightedTree tree;
  std::vector<PointRef> origin;          // per skeleton vertex, location in the source
  std::vector<int> source_edge;          // per skeleton edge: source edge id
  std::vector<double> source_offset_a;   // source offset of the skeleton edge's `a` end
  int mapped_root = -1;
};

Skeleton assemble(const WeightedTree& t, const std::vector<char>& keep_vertex,
                  const std::vector<std::pair<double, double>>& intervals, int root_vertex,
                  PointRef fallback_point) {
  std::vector<int> vmap(t.vertex_count(), -1);
  std::vector<PointRef> origin;
  int nv = 0;
  for (int v = 0; v < t.vertex_count(); ++v) {
    if (keep_vertex[v]) {
      vmap[v] = nv++;
      origin.push_back(PointRef::at_vertex(v));
    }
  }
  std::vector<Edge> edges;
  std::vector<int> sedge;
  std::vector<double> soff;
  for (std::size_t i = 0; i < t.edges().size(); ++i) {
    auto [lo, hi] = intervals[i];
    if (!(hi - lo > 0)) continue;
    const Edge& e = t.edges()[i];
    int va, vb;
    if (lo == 0.0) {
      va = vmap[e.a];
    } else {
      va = nv++;
      origin.push_back(PointRef::on_edge(static_cast<int>(i), lo));
    }
    if (hi == e.len) {
      vb = vmap[e.b];
    } else {
      vb = nv++;
      origin.push_back(PointRef::on_edge(static_cast<int>(i), hi));
    }
    if (va < 0 || vb < 0) throw std::logic_error("trim: kept interval touches a dropped vertex");
    edges.push_back({va, vb, hi - lo});
    sedge.push_back(static_cast<int>(i));
    soff.push_back(lo);
  }
  Skeleton sk;
  if (nv == 0) {
    sk.tree = WeightedTree(1, {}, {}, 0);
    sk.origin = {fallback_point};
    sk.mapped_root = 0;
    return sk;
  }
  int new_root = (root_vertex >= 0 && vmap[root_vertex] >= 0) ? vmap[root_vertex] : -1;
  sk.tree = WeightedTree(nv, std::move(edges), {}, new_root);
  sk.origin = std::move(origin);
  sk.source_edge = std::move(sedge);
  sk.source_offset_a = std::move(soff);
  sk.mapped_root = new_root;
  return sk;
}

// max distance reachable from each endpoint of each edge, going away from
// the edge: out[2i] for endpoint a of edge i, out[2i+1] for endpoint b
std::vector<double> directional_extents(const WeightedTree& t) {
  int n = t.vertex_count();
  std::vector<int> par(n, -2), pedge(n, -1);
  std::vector<int> order;
  order.reserve(n);
  par[0] = -1;
  {
    std::queue<int> q;
    q.push(0);
    while (!q.empty()) {
      int v = q.front();
      q.pop();
      order.push_back(v);
      for (auto [w, eid] : t.neighbors(v)) {
        if (par[w] != -2) continue;
        par[w] = v;
        pedge[w] = eid;
        q.push(w);
      }
    }
  }
  // down[v]: max distance into v's own subtree; best two child branches
  std::vector<double> down(n, 0.0), best1(n, 0.0), best2(n, 0.0);
  std::vector<int> argbest1(n, -1);
  for (int i = n - 1; i >= 0; --i) {
    int v = order[i];
    if (par[v] < 0) continue;
    double cand = t.edges()[pedge[v]].len + down[v];
    int p = par[v];
    if (cand > best1[p]) {
      best2[p] = best1[p];
      best1[p] = cand;
      argbest1[p] = v;
    } else if (cand > best2[p]) {
      best2[p] = cand;
    }
    down[p] = std::max(down[p], cand);
  }
  // up[v]: max distance through the parent side
  std::vector<double> up(n, 0.0);
  for (int v : order) {
    if (par[v] < 0) continue;
    int p = par[v];
    double sibling = (argbest1[p] == v) ? best2[p] : best1[p];
    up[v] = t.edges()[pedge[v]].len + std::max(up[p], sibling);
  }
  std::vector<double> out(2 * t.edges().size(), 0.0);
  for (std::size_t i = 0; i < t.edges().size(); ++i) {
    const Edge& e = t.edges()[i];
    int child = (par[e.b] == e.a) ? e.b : e.a;
    int parent = (child == e.b) ? e.a : e.b;
    double away_child = down[child];
    double sibling = (argbest1[parent] == child) ? best2[parent] : best1[parent];
    double away_parent = std::max(up[parent], sibling);
    if (child == e.b) {
      out[2 * i] = away_parent;
      out[2 * i + 1] = away_child;
    } else {
      out[2 * i] = away_child;
      out[2 * i + 1] = away_parent;
    }
  }
  return out;
}

Skeleton trim_rooted_skeleton(const WeightedTree& t, const PointRef& root, double eps) {
  if (!(eps > 0)) throw std::invalid_argument("trim: eps must be positive");
  MutableTree mt(t);
  mt.atoms.clear();
  int r = mt.materialize(root);
  mt.root = r;
  WeightedTree base = mt.freeze();
  auto adj = mt.adjacency();
  auto par = root_parents(adj, r);
  std::vector<int> order;
  order.reserve(mt.n);
  {
    std::queue<int> q;
    q.push(r);
    while (!q.empty()) {
      int v = q.front();
      q.pop();
      order.push_back(v);
      for (auto [w, eid] : adj[v]) {
        (void)eid;
        if (w != par[v]) q.push(w);
      }
    }
  }
  std::vector<double> down(mt.n, 0.0);
  for (int i = mt.n - 1; i >= 0; --i) {
    int v = order[i];
    if (par[v] < 0) continue;
    for (auto [w, eid] : adj[v]) {
      if (w == par[v]) {
        down[w] = std::max(down[w], mt.edges[eid].len + down[v]);
        break;
      }
    }
  }
  std::vector<char> keep(mt.n, 0);
  for (int v = 0; v < mt.n; ++v) keep[v] = (down[v] >= eps) ? 1 : 0;
  keep[r] = 1;
  std::vector<std::pair<double, double>> iv(mt.edges.size(), {0.0, 0.0});
  for (std::size_t i = 0; i < mt.edges.size(); ++i) {
    const Edge& e = mt.edges[i];
    int child = (par[e.b] == e.a) ? e.b : e.a;
    double upper = e.len + down[child] - eps;  // offsets measured from the root side
    if (upper <= 0) continue;
    upper = std::min(upper, e.len);
    if (child == e.b) {
      iv[i] = {0.0, upper};
    } else {
      iv[i] = {e.len - upper, e.len};
    }
  }
  return assemble(base, keep, iv, r, PointRef::at_vertex(r));
}

Skeleton trim_skeleton(const WeightedTree& t, double eps) {
  if (!(eps > 0)) throw std::invalid_argument("trim: eps must be positive");
  if (t.vertex_count() == 1 || diameter(t) <= eps) {
    Skeleton sk;
    sk.tree = WeightedTree(1, {}, {}, 0);
    sk.origin = {PointRef::at_vertex(0)};
    sk.mapped_root = 0;
    return sk;
  }
  auto ext = directional_extents(t);
  std::vector<char> keep(t.vertex_count(), 0);
  for (int v = 0; v < t.vertex_count(); ++v) {
    double b1 = 0, b2 = 0;
    for (auto [w, eid] : t.neighbors(v)) {
      const Edge& e = t.edges()[eid];
      double away = e.len + ((e.a == v) ? ext[2 * eid + 1] : ext[2 * eid]);
      if (away > b1) {
        b2 = b1;
        b1 = away;
      } else if (away > b2) {
        b2 = away;
      }
      (void)w;
    }
    keep[v] = (b2 >= eps && b1 >= eps) ? 1 : 0;
  }
  std::vector<std::pair<double, double>> iv(t.edges().size(), {0.0, 0.0});
  for (std::size_t i = 0; i < t.edges().size(); ++i) {
    const Edge& e = t.edges()[i];
    double lo = std::max(0.0, eps - ext[2 * i]);
    double hi = std::min(e.len, e.len + ext[2 * i + 1] - eps);
    iv[i] = (hi > lo) ? std::make_pair(lo, hi) : std::make_pair(0.0, 0.0);
  }
  return assemble(t, keep, iv, -1, PointRef::at_vertex(0));
}

}  // namespace

WeightedTree trim_rooted(const WeightedTree& t, const PointRef& root, double eps) {
  t.check_ref(root);
  return trim_rooted_skeleton(t, root, eps).tree;
}

WeightedTree trim(const WeightedTree& t, double eps) { return trim_skeleton(t, eps).tree; }

SubtreeInfo subtree(const WeightedTree& t, const PointRef& u, const PointRef& v) {
  t.check_ref(u);
  t.check_ref(v);
  MutableTree mt(t);
  int tu = mt.track(u), tv = mt.track(v);
  int uv = mt.materialize(tu);
  int vv = mt.materialize(tv);
  if (uv == vv) throw std::invalid_argument("subtree: u and v coincide");
  auto adj = mt.adjacency();
  auto par = root_parents(adj, vv);
  // S = everything whose path to v passes strictly through u
  std::vector<char> in_s(mt.n, 0);
  std::vector<double> dist_u(mt.n, 0.0);
  double h = 0;
  std::queue<int> q;
  for (auto [w, eid] : adj[uv]) {
    if (w == par[uv]) continue;
    in_s[w] = 1;
    dist_u[w] = mt.edges[eid].len;
    h = std::max(h, dist_u[w]);
    q.push(w);
  }
  while (!q.empty()) {
    int x = q.front();
    q.pop();
    for (auto [w, eid] : adj[x]) {
      if (w == par[x] || in_s[w]) continue;
      if (w == uv) continue;
      in_s[w] = 1;
      dist_u[w] = dist_u[x] + mt.edges[eid].len;
      h = std::max(h, dist_u[w]);
      q.push(w);
    }
  }
  double mass = 0;
  for (const auto& a : mt.atoms)
    if (a.at.is_vertex() ? in_s[a.at.vertex] : in_s[mt.edges[a.at.edge].a] || in_s[mt.edges[a.at.edge].b])
      mass += a.mass;
  // extract the skeleton rooted at u
  std::vector<int> vmap(mt.n, -1);
  int nv = 0;
  vmap[uv] = nv++;
  for (int x = 0; x < mt.n; ++x)
    if (in_s[x]) vmap[x] = nv++;
  std::vector<Edge> edges;
  for (const auto& e : mt.edges) {
    bool inside = (in_s[e.a] || e.a == uv) && (in_s[e.b] || e.b == uv);
    bool real = in_s[e.a] || in_s[e.b];
    if (inside && real) edges.push_back({vmap[e.a], vmap[e.b], e.len});
  }
  SubtreeInfo info;
  info.skeleton = WeightedTree(nv, std::move(edges), {}, 0);
  info.mass = mass;
  info.height = h;
  return info;
}

WeightedTree spr(const WeightedTree& t, const PointRef& u, const PointRef& v) {
  t.check_ref(u);
  t.check_ref(v);
  MutableTree mt(t);
  int tu = mt.track(u), tv = mt.track(v);
  int uv = mt.materialize(tu);
  int vv = mt.materialize(tv);
  if (uv == vv) return mt.freeze();
  auto adj = mt.adjacency();
  auto par = root_parents(adj, vv);
  for (auto& e : mt.edges) {
    // re-anchor every subtree edge hanging off u away from v
    if (e.a == uv && par[uv] != e.b) {
      e.a = vv;
    } else if (e.b == uv && par[uv] != e.a) {
      e.b = vv;
    }
  }
  return mt.freeze();
}

std::pair<double, double> spr_meandist_bound(const WeightedTree& t, const PointRef& u,
                                             const PointRef& v) {
  double before = mean_dist(t);
  double duv = t.distance(u, v);
  double ms;
  if (duv == 0.0) {
    ms = 0.0;
  } else {
    ms = subtree(t, u, v).mass;
  }
  double after = (duv == 0.0) ? before : mean_dist(spr(t, u, v));
  double lhs = (before - after) * (before - after);
  double rhs = 4.0 * ms * ms * (1.0 - ms) * (1.0 - ms) * duv * duv;
  return {lhs, rhs};
}

std::vector<PointRef> eps_net(const WeightedTree& t, double eps) {
  if (!(eps > 0)) throw std::invalid_argument("eps_net: eps must be positive");
  Skeleton sk = trim_skeleton(t, eps / 2.0);
  std::vector<PointRef> net;
  auto push_unique = [&](const PointRef& p) {
    for (const auto& q : net) {
      if (p.is_vertex() != q.is_vertex()) continue;
      if (p.is_vertex() && p.vertex == q.vertex) return;
      if (!p.is_vertex() && p.edge == q.edge && std::fabs(p.offset - q.offset) <= 1e-12) return;
    }
    net.push_back(p);
  };
  const WeightedTree& R = sk.tree;
  if (R.vertex_count() == 1) {
    net.push_back(sk.origin[0]);
    return net;
  }
  // map a location on a skeleton edge back into the source tree
  auto back = [&](int skel_edge, double off) -> PointRef {
    int se = sk.source_edge[skel_edge];
    double o = sk.source_offset_a[skel_edge] + off;
    const Edge& e = t.edges()[se];
    if (o <= 0) return PointRef::at_vertex(e.a);
    if (o >= e.len) return PointRef::at_vertex(e.b);
    return PointRef::on_edge(se, o);
  };
  auto back_vertex = [&](int skel_vertex) -> PointRef { return sk.origin[skel_vertex]; };
  std::vector<int> leaves;
  for (int x = 0; x < R.vertex_count(); ++x)
    if (R.degree(x) <= 1) leaves.push_back(x);
  int x0 = leaves.front();
  push_unique(back_vertex(x0));
  const double step = eps / 2.0;
  for (std::size_t li = 1; li < leaves.size(); ++li) {
    // walk the unique path x0 -> leaf, dropping points every eps/2
    int target = leaves[li];
    auto par = root_parents([&] {
      std::vector<std::vector<std::pair<int, int>>> a(R.vertex_count());
      for (std::size_t i = 0; i < R.edges().size(); ++i) {
        a[R.edges()[i].a].push_back({R.edges()[i].b, static_cast<int>(i)});
        a[R.edges()[i].b].push_back({R.edges()[i].a, static_cast<int>(i)});
      }
      return a;
    }(), x0);
    std::vector<int> path{target};
    while (path.back() != x0) path.push_back(par[path.back()]);
    std::reverse(path.begin(), path.end());
    double walked = 0;
    double next_mark = step;
    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
      int a = path[i], b = path[i + 1];
      int eid = -1;
      for (auto [w, id] : R.neighbors(a))
        if (w == b) eid = id;
      double len = R.edges()[eid].len;
      bool fwd = (R.edges()[eid].a == a);
      while (next_mark <= walked + len) {
        double off = next_mark - walked;
        double eoff = fwd ? off : len - off;
        if (eoff <= 0) {
          push_unique(back_vertex(R.edges()[eid].a));
        } else if (eoff >= len) {
          push_unique(back_vertex(R.edges()[eid].b));
        } else {
          push_unique(back(eid, eoff));
        }
        next_mark += step;
      }
      walked += len;
    }
    push_unique(back_vertex(target));
  }
  return net;
}

PointRef sample_length_point(const WeightedTree& t, Rng& rng) {
  double total = t.total_length();
  if (!(total > 0)) throw std::domain_error("sample_length_point: degenerate tree");
  double r = rng.uniform01() * total;
  for (std::size_t i = 0; i < t.edges().size(); ++i) {
    double len = t.edges()[i].len;
    if (r < len || i + 1 == t.edges().size()) {
      double off = std::clamp(r, 1e-15 * len, (1.0 - 1e-15) * len);
      return PointRef::on_edge(static_cast<int>(i), off);
    }
    r -= len;
  }
  throw std::logic_error("sample_length_point: unreachable");
}

PointRef sample_weight_point(const WeightedTree& t, Rng& rng) {
  if (!t.has_weight()) throw std::domain_error("sample_weight_point: tree carries no weight");
  double r = rng.uniform01();
  for (std::size_t i = 0; i < t.weights().size(); ++i) {
    if (r < t.weights()[i].mass || i + 1 == t.weights().size()) return t.weights()[i].at;
    r -= t.weights()[i].mass;
  }
  throw std::logic_error("sample_weight_point: unreachable");
}

double four_point_defect(const WeightedTree& t, int max_tuples, Rng& rng) {
  int n = t.vertex_count();
  if (n < 4) return 0.0;
  double worst = 0.0;
  for (int k = 0; k < max_tuples; ++k) {
    int x1 = rng.uniform_int(n), x2 = rng.uniform_int(n);
    int x3 = rng.uniform_int(n), x4 = rng.uniform_int(n);
    double d12 = t.distance(x1, x2), d34 = t.distance(x3, x4);
    double d13 = t.distance(x1, x3), d24 = t.distance(x2, x4);
    double d14 = t.distance(x1, x4), d23 = t.distance(x2, x3);
    double lhs = d12 + d34;
    double rhs = std::max(d13 + d24, d14 + d23);
    worst = std::max(worst, lhs - rhs);
  }
  return worst;
}

std::string tree_to_json(const WeightedTree& t, const std::string& meta_json) {
  nlohmann::ordered_json j;
  if (!meta_json.empty()) j["meta"] = nlohmann::ordered_json::parse(meta_json);
  j["vertices"] = nlohmann::ordered_json::array();
  for (int v = 0; v < t.vertex_count(); ++v) j["vertices"].push_back({{"id", v}});
  j["edges"] = nlohmann::ordered_json::array();
  for (const auto& e : t.edges()) j["edges"].push_back({{"a", e.a}, {"b", e.b}, {"len", e.len}});
  j["weights"] = nlohmann::ordered_json::array();
  for (const auto& a : t.weights()) {
    nlohmann::ordered_json at;
    if (a.at.is_vertex()) {
      at = {{"vertex", a.at.vertex}};
    } else {
      at = {{"edge", a.at.edge}, {"offset", a.at.offset}};
    }
    j["weights"].push_back({{"at", at}, {"mass", a.mass}});
  }
  if (t.root() >= 0) {
    j["root"] = t.root();
  } else {
    j["root"] = nullptr;
  }
  return j.dump(2) + "\n";
}

WeightedTree tree_from_json(const std::string& text) {
  auto j = nlohmann::json::parse(text);
  int n = static_cast<int>(j.at("vertices").size());
  std::vector<Edge> edges;
  for (const auto& je : j.at("edges"))
    edges.push_back({je.at("a").get<int>(), je.at("b").get<int>(), je.at("len").get<double>()});
  std::vector<WeightAtom> atoms;
  for (const auto& jw : j.at("weights")) {
    const auto& at = jw.at("at");
    PointRef p = at.contains("vertex")
                     ? PointRef::at_vertex(at.at("vertex").get<int>())
                     : PointRef::on_edge(at.at("edge").get<int>(), at.at("offset").get<double>());
    atoms.push_back({p, jw.at("mass").get<double>()});
  }
  int root = -1;
  if (j.contains("root") && !j.at("root").is_null()) root = j.at("root").get<int>();
  return WeightedTree(n, std::move(edges), std::move(atoms), root);
}

namespace {

void newick_rec(const WeightedTree& t, int v, int from, std::string& out) {
  std::vector<std::pair<int, double>> kids;
  for (auto [w, eid] : t.neighbors(v))
    if (w != from) kids.push_back({w, t.edges()[eid].len});
  if (!kids.empty()) {
    out += '(';
    for (std::size_t i = 0; i < kids.size(); ++i) {
      if (i) out += ',';
      newick_rec(t, kids[i].first, v, out);
      char buf[40];
      std::snprintf(buf, sizeof buf, ":%.17g", kids[i].second);
      out += buf;
    }
    out += ')';
  }
  out += 'v' + std::to_string(v);
}

}  // namespace

std::string to_newick(const WeightedTree& t) {
  int start = t.root() >= 0 ? t.root() : 0;
  std::string out;
  newick_rec(t, start, -1, out);
  out += ";";
  return out;
}

}  // namespace sprtree
