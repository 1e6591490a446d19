#pragma once

#include <utility>
#include <vector>

#include "sprtree/excursion.hpp"
#include "sprtree/rng.hpp"
#include "sprtree/rtree.hpp"

namespace sprtree {

// The quotient tree of a PL excursion, built by a single left-to-right sweep.
// Two times are identified when the path value at both equals the minimum in
// between; breakpoint images become vertices (interior local minima are
// branch points, local maxima are leaves) and a vertex's height equals its
// distance from the root, the image of time 0.
//
// Each edge additionally remembers the index of the ascending segment through
// which the path first enters it and of the descending segment through which
// it finally leaves. Both segments span the edge's full height range, so the
// start and end of the subpath above any point of the edge are linear
// functions of the level, evaluated exactly.
class ContourTree {
 public:
  explicit ContourTree(Excursion e);

  const Excursion& path() const { return e_; }
  int vertex_count() const { return static_cast<int>(height_.size()); }
  int root() const { return 0; }
  double height(int v) const { return height_[v]; }
  int parent(int v) const { return parent_[v]; }
  const std::vector<Edge>& edges() const { return edges_; }
  int vertex_of_breakpoint(std::size_t i) const { return bp_vertex_[i]; }
  double total_length() const;

  // Tree point visited at time t.
  PointRef point_at_time(double t) const;

  // Start and end of the subpath strictly above the given point's level,
  // around its first visit. The point is (edge, level within the edge).
  std::pair<double, double> straddle_of(int edge, double level) const;

  // Tree with the Lebesgue weight discretized on m midpoints (i-1/2)zeta/m.
  WeightedTree weighted_tree(int weight_grid) const;

  // Mass of the region between the time axis and the path, under
  // ds da / (straddle length), equals total edge length. The variants below
  // integrate indicators of the straddle over that region, exactly.
  double gamma_length_tail_mass(double p0) const;  // straddle length > p0
  double gamma_height_tail_mass(double x) const;   // straddle max above level > x

  GammaPoint sample_gamma(Rng& rng) const;
  // Sample from the restriction to straddle length >= p0; requires
  // gamma_length_tail_mass(p0) > 0.
  GammaPoint sample_gamma_qualifying(double p0, Rng& rng) const;

 private:
  Excursion e_;
  std::vector<double> height_;
  std::vector<int> parent_;
  std::vector<int> parent_edge_;
  std::vector<Edge> edges_;
  std::vector<int> seg_in_, seg_out_;  // per edge
  std::vector<int> bp_vertex_;

  double seg_time_at(int seg, double level) const;
  GammaPoint gamma_from_edge_level(int edge, double level, Rng& rng) const;
};

// Quotient tree of e with the Lebesgue weight discretized on a grid of
// weight_grid atoms of equal mass.
WeightedTree tree_from_excursion(const Excursion& e, int weight_grid);

}  // namespace sprtree
