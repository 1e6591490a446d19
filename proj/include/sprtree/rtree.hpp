#pragma once

#include <string>
#include <utility>
#include <vector>

#include "sprtree/rng.hpp"

namespace sprtree {

// A location on a tree: either a vertex, or a point strictly inside an edge
// at `offset` from the edge's `a` endpoint.
struct PointRef {
  int vertex = -1;
  int edge = -1;
  double offset = 0.0;

  static PointRef at_vertex(int v) {
    PointRef p;
    p.vertex = v;
    return p;
  }
  static PointRef on_edge(int e, double off) {
    PointRef p;
    p.edge = e;
    p.offset = off;
    return p;
  }
  bool is_vertex() const { return vertex >= 0; }
};

struct Edge {
  int a = -1;
  int b = -1;
  double len = 0.0;
};

struct WeightAtom {
  PointRef at;
  double mass = 0.0;
};

// Finite real tree with positive edge lengths and an atomic probability
// weight. An empty atom list marks a bare skeleton (trimmings, extracted
// subtrees); otherwise the masses must sum to 1. Immutable after
// construction; every operation returns a new tree.
class WeightedTree {
 public:
  WeightedTree() = default;
  WeightedTree(int n_vertices, std::vector<Edge> edges, std::vector<WeightAtom> atoms,
               int root = -1);

  int vertex_count() const { return n_; }
  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<WeightAtom>& weights() const { return atoms_; }
  int root() const { return root_; }
  bool has_weight() const { return !atoms_.empty(); }

  const std::vector<std::pair<int, int>>& neighbors(int v) const { return adj_[v]; }
  int degree(int v) const { return static_cast<int>(adj_[v].size()); }

  double distance(int u, int v) const;
  double distance(const PointRef& p, const PointRef& q) const;
  double total_length() const;

  void check_ref(const PointRef& p) const;

 private:
  int n_ = 0;
  std::vector<Edge> edges_;
  std::vector<WeightAtom> atoms_;
  int root_ = -1;
  std::vector<std::vector<std::pair<int, int>>> adj_;  // (neighbor, edge id)
  std::vector<int> parent_, depth_;
  std::vector<double> dist_up_;

  void build_and_validate();
  int lca(int u, int v) const;
};

// nu x nu average of pairwise distances, computed exactly edge-by-edge.
double mean_dist(const WeightedTree& t);

double height_from(const WeightedTree& t, const PointRef& root);
double diameter(const WeightedTree& t);

// Points with at least eps of tree extending beyond them away from the root;
// each root-to-leaf path is shortened by eps. Returns a skeleton rooted at
// the image of `root`.
WeightedTree trim_rooted(const WeightedTree& t, const PointRef& root, double eps);

// Points with two edge-disjoint directions each extending at least eps.
// A single point when the diameter is <= eps (or when no point qualifies).
WeightedTree trim(const WeightedTree& t, double eps);

struct SubtreeInfo {
  WeightedTree skeleton;  // rooted at the image of u
  double mass = 0.0;      // atom mass strictly inside (an atom at u is outside)
  double height = 0.0;    // sup over the subtree of the distance to u
};

// The part of the tree strictly on the other side of u from v.
SubtreeInfo subtree(const WeightedTree& t, const PointRef& u, const PointRef& v);

// Prune the subtree on the other side of u from v and regraft it at v. The
// detachment point u stays as an explicit vertex; atoms inside the subtree
// ride with it; total length and masses are preserved.
WeightedTree spr(const WeightedTree& t, const PointRef& u, const PointRef& v);

// ((mean_dist change)^2, 4 nu(S)^2 nu(complement)^2 d(u,v)^2); the first is
// never larger than the second.
std::pair<double, double> spr_meandist_bound(const WeightedTree& t, const PointRef& u,
                                             const PointRef& v);

// Covering set: every point of the tree is within eps of the result, with
// cardinality at most ceil(2L/eps) * ceil(2L/eps + 1) for L = total length.
std::vector<PointRef> eps_net(const WeightedTree& t, double eps);

PointRef sample_length_point(const WeightedTree& t, Rng& rng);
PointRef sample_weight_point(const WeightedTree& t, Rng& rng);

// Largest |d(x1,x2)+d(x3,x4) - max of the two other pairings| over sampled
// 4-tuples; 0 for a tree metric.
double four_point_defect(const WeightedTree& t, int max_tuples, Rng& rng);

std::string tree_to_json(const WeightedTree& t, const std::string& meta_json = "");
WeightedTree tree_from_json(const std::string& text);
std::string to_newick(const WeightedTree& t);

}  // namespace sprtree
