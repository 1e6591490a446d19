#pragma once

#include <utility>
#include <vector>

#include "sprtree/rtree.hpp"

namespace sprtree {

// Finite metric space given by its symmetric distance matrix.
struct FiniteMetricSpace {
  std::vector<std::vector<double>> d;

  FiniteMetricSpace() = default;
  explicit FiniteMetricSpace(std::vector<std::vector<double>> dist);
  int size() const { return static_cast<int>(d.size()); }
};

// Nonnegative masses summing to 1 over the points of a space.
struct AtomicMeasure {
  std::vector<double> mass;

  AtomicMeasure() = default;
  explicit AtomicMeasure(std::vector<double> m);
  int size() const { return static_cast<int>(mass.size()); }
};

// Relation between two spaces covering both sides.
struct Correspondence {
  std::vector<std::pair<int, int>> pairs;
};

void check_correspondence(const FiniteMetricSpace& x, const FiniteMetricSpace& y,
                          const Correspondence& r);

double distortion(const FiniteMetricSpace& x, const FiniteMetricSpace& y,
                  const Correspondence& r);

struct BoundedValue {
  double lower = 0;
  double upper = 0;
  bool exact = false;
};

// Gromov-Hausdorff distance: half the minimal distortion over
// correspondences. Exact (branch and bound) when |X|*|Y| <= exact_limit,
// otherwise a bracketing pair of bounds.
BoundedValue gh(const FiniteMetricSpace& x, const FiniteMetricSpace& y, long exact_limit = 20);

// Prohorov distance between two measures on the same space, exact via the
// coupling characterization: a max-flow feasibility test at each candidate
// threshold taken from the pairwise distances.
double prohorov(const FiniteMetricSpace& x, const AtomicMeasure& mu, const AtomicMeasure& nu);

// Feasibility of d_P <= eps via one max-flow, usable on larger spaces.
bool prohorov_le(const FiniteMetricSpace& x, const AtomicMeasure& mu, const AtomicMeasure& nu,
                 double eps);

// Measurable near-isometry built from a correspondence by the greedy
// ball-partition construction over an eps-net. Requires dis(r) < 2 eps.
// The result satisfies dis(f) <= dis(r) + 2 eps and its image is a
// 3 eps-net in Y.
std::vector<int> isometry_from_correspondence(const FiniteMetricSpace& x,
                                              const FiniteMetricSpace& y, const Correspondence& r,
                                              double eps);

double map_distortion(const FiniteMetricSpace& x, const FiniteMetricSpace& y,
                      const std::vector<int>& f);
double net_radius(const FiniteMetricSpace& y, const std::vector<int>& image);

// (d_P(f mu, f nu), d_P(mu, nu) + dis(f)); the first never exceeds the second.
std::pair<double, double> pushforward_prohorov_check(const FiniteMetricSpace& x,
                                                     const FiniteMetricSpace& y,
                                                     const std::vector<int>& f,
                                                     const AtomicMeasure& mu,
                                                     const AtomicMeasure& nu);

struct WeightedSpace {
  FiniteMetricSpace space;
  AtomicMeasure weight;
};

struct DeltaResult {
  double lower = 0;
  double upper = 0;
  bool exact = false;
  std::vector<int> f, g;  // witness maps at the upper bound
};

// Weighted Gromov-Hausdorff discrepancy: the least eps admitting
// near-isometries both ways whose push-forwards match the weights within
// eps in Prohorov distance. Exact by enumeration of both map families when
// |Y|^|X| and |X|^|Y| are within exact_limit, otherwise seeded local search
// (upper bound) plus a relaxation lower bound.
DeltaResult delta_ghwt(const WeightedSpace& xw, const WeightedSpace& yw,
                       double exact_limit = 1e6);

// Bracket for the chained metric built from delta_ghwt:
// (lower^(1/4) / 2, upper^(1/4)).
BoundedValue d_ghwt_bounds(const DeltaResult& delta);

// Finite restriction of a weighted tree: vertices, atom locations and an
// eps/2 length-net become the points; atoms keep their masses.
WeightedSpace discretize_tree(const WeightedTree& t, double eps);

}  // namespace sprtree
