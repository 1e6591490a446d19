#include "sprtree/contour.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sprtree {

ContourTree::ContourTree(Excursion e) : e_(std::move(e)) {
  const auto& T = e_.times();
  const auto& V = e_.values();
  const std::size_t k = T.size();

  height_.push_back(0.0);
  parent_.push_back(-1);
  parent_edge_.push_back(-1);
  bp_vertex_.assign(k, -1);
  bp_vertex_[0] = 0;

  std::vector<int> stack{0};  // root-to-cursor path, heights strictly increasing

  auto new_vertex = [&](double h, int par, int pedge) {
    height_.push_back(h);
    parent_.push_back(par);
    parent_edge_.push_back(pedge);
    return static_cast<int>(height_.size()) - 1;
  };

  for (std::size_t i = 1; i < k; ++i) {
    const int seg = static_cast<int>(i) - 1;
    const double h = V[i];
    if (h > V[i - 1]) {
      int p = stack.back();
      int eid = static_cast<int>(edges_.size());
      int nv = new_vertex(h, p, eid);
      edges_.push_back({p, nv, h - height_[p]});
      seg_in_.push_back(seg);
      seg_out_.push_back(-1);
      stack.push_back(nv);
      bp_vertex_[i] = nv;
    } else {
      for (;;) {
        int x = stack.back();
        if (height_[x] == h) {
          bp_vertex_[i] = x;
          break;
        }
        int p = parent_[x];
        if (height_[p] < h) {
          // land strictly inside the edge (p -> x): split it
          int eid = parent_edge_[x];
          int up = static_cast<int>(edges_.size());
          int m = new_vertex(h, p, eid);
          edges_.push_back({m, x, height_[x] - h});
          seg_in_.push_back(seg_in_[eid]);
          seg_out_.push_back(seg);  // the upper part is exited now
          edges_[eid] = {p, m, h - height_[p]};
          parent_[x] = m;
          parent_edge_[x] = up;
          stack.back() = m;
          bp_vertex_[i] = m;
          break;
        }
        seg_out_[parent_edge_[x]] = seg;  // x's edge fully exited
        stack.pop_back();
      }
    }
  }
}

double ContourTree::total_length() const {
  double s = 0;
  for (const auto& e : edges_) s += e.len;
  return s;
}

double ContourTree::seg_time_at(int seg, double level) const {
  const auto& T = e_.times();
  const auto& V = e_.values();
  return T[seg] + (level - V[seg]) * (T[seg + 1] - T[seg]) / (V[seg + 1] - V[seg]);
}

PointRef ContourTree::point_at_time(double t) const {
  const auto& V = e_.values();
  std::size_t seg = e_.segment_index(t);
  double h = e_(t);
  // anchor at the higher end of the segment, then climb toward the root
  int c = (V[seg + 1] > V[seg]) ? bp_vertex_[seg + 1] : bp_vertex_[seg];
  if (h == height_[c]) return PointRef::at_vertex(c);
  while (parent_[c] >= 0 && height_[parent_[c]] >= h) {
    c = parent_[c];
    if (h == height_[c]) return PointRef::at_vertex(c);
  }
  return PointRef::on_edge(parent_edge_[c], h - height_[parent_[c]]);
}

std::pair<double, double> ContourTree::straddle_of(int edge, double level) const {
  return {seg_time_at(seg_in_[edge], level), seg_time_at(seg_out_[edge], level)};
}

WeightedTree ContourTree::weighted_tree(int weight_grid) const {
  if (weight_grid < 1) throw std::invalid_argument("weighted_tree: grid must be >= 1");
  std::vector<WeightAtom> atoms;
  atoms.reserve(weight_grid);
  const double z = e_.zeta();
  const double mass = 1.0 / weight_grid;
  for (int i = 1; i <= weight_grid; ++i) {
    double t = (i - 0.5) * z / weight_grid;
    atoms.push_back({point_at_time(t), mass});
  }
  return WeightedTree(vertex_count(), edges_, std::move(atoms), 0);
}

double ContourTree::gamma_length_tail_mass(double p0) const {
  double total = 0;
  for (std::size_t i = 0; i < edges_.size(); ++i) {
    double hlo = height_[edges_[i].a], hhi = height_[edges_[i].b];
    double llo = seg_time_at(seg_out_[i], hlo) - seg_time_at(seg_in_[i], hlo);
    double lhi = seg_time_at(seg_out_[i], hhi) - seg_time_at(seg_in_[i], hhi);
    // straddle length decreases linearly in the level along the edge
    if (lhi >= p0) {
      total += edges_[i].len;
    } else if (llo > p0) {
      total += (llo - p0) / (llo - lhi) * edges_[i].len;
    }
  }
  return total;
}

double ContourTree::gamma_height_tail_mass(double x) const {
  // accumulate max depth-below per vertex, children first (heights decrease
  // strictly toward the root, so height order is a valid topological order)
  std::vector<int> order(vertex_count());
  for (int v = 0; v < vertex_count(); ++v) order[v] = v;
  std::sort(order.begin(), order.end(),
            [&](int u, int v) { return height_[u] > height_[v]; });
  std::vector<double> down(vertex_count(), 0.0);
  for (int v : order) {
    if (v == 0) continue;
    double cand = edges_[parent_edge_[v]].len + down[v];
    double& d = down[parent_[v]];
    d = std::max(d, cand);
  }
  double total = 0;
  for (std::size_t i = 0; i < edges_.size(); ++i) {
    double reach = edges_[i].len + down[edges_[i].b];  // height above the edge's bottom
    total += std::clamp(reach - x, 0.0, edges_[i].len);
  }
  return total;
}

GammaPoint ContourTree::gamma_from_edge_level(int edge, double level, Rng& rng) const {
  auto [lo, hi] = straddle_of(edge, level);
  GammaPoint gp;
  gp.level = level;
  gp.s_lo = lo;
  gp.s_hi = hi;
  gp.s = lo + rng.uniform01() * (hi - lo);
  return gp;
}

GammaPoint ContourTree::sample_gamma(Rng& rng) const {
  double total = total_length();
  if (!(total > 0)) throw std::domain_error("sample_gamma: degenerate tree");
  double r = rng.uniform01() * total;
  for (std::size_t i = 0; i < edges_.size(); ++i) {
    if (r < edges_[i].len || i + 1 == edges_.size()) {
      double off = std::clamp(r, 0.0, edges_[i].len);
      double level = height_[edges_[i].a] + off;
      return gamma_from_edge_level(static_cast<int>(i), level, rng);
    }
    r -= edges_[i].len;
  }
  throw std::logic_error("sample_gamma: unreachable");
}

GammaPoint ContourTree::sample_gamma_qualifying(double p0, Rng& rng) const {
  // qualifying portion per edge, mirroring gamma_length_tail_mass
  std::vector<double> part(edges_.size(), 0.0);
  std::vector<double> cap(edges_.size(), 0.0);  // qualifying level span above the edge bottom
  double total = 0;
  for (std::size_t i = 0; i < edges_.size(); ++i) {
    double hlo = height_[edges_[i].a], hhi = height_[edges_[i].b];
    double llo = seg_time_at(seg_out_[i], hlo) - seg_time_at(seg_in_[i], hlo);
    double lhi = seg_time_at(seg_out_[i], hhi) - seg_time_at(seg_in_[i], hhi);
    double q = 0;
    if (lhi >= p0) {
      q = edges_[i].len;
    } else if (llo > p0) {
      q = (llo - p0) / (llo - lhi) * edges_[i].len;
    }
    part[i] = q;
    cap[i] = q;
    total += q;
  }
  if (!(total > 0)) throw std::domain_error("sample_gamma_qualifying: no qualifying region");
  double r = rng.uniform01() * total;
  for (std::size_t i = 0; i < edges_.size(); ++i) {
    if (r < part[i] || i + 1 == edges_.size()) {
      if (part[i] <= 0) continue;
      double off = std::clamp(r, 0.0, cap[i]);
      double level = height_[edges_[i].a] + off;
      return gamma_from_edge_level(static_cast<int>(i), level, rng);
    }
    r -= part[i];
  }
  throw std::logic_error("sample_gamma_qualifying: unreachable");
}

WeightedTree tree_from_excursion(const Excursion& e, int weight_grid) {
  if (weight_grid < 1) throw std::invalid_argument("tree_from_excursion: grid must be >= 1");
  return ContourTree(e).weighted_tree(weight_grid);
}

}  // namespace sprtree
