#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "sprtree/contour.hpp"
#include "sprtree/excursion.hpp"
#include "sprtree/rng.hpp"
#include "sprtree/sampler.hpp"

namespace testutil {

using sprtree::Excursion;

inline Excursion tent() { return Excursion({0.0, 0.5, 1.0}, {0.0, 0.5, 0.0}); }

inline Excursion wpath() {
  return Excursion({0.0, 0.25, 0.5, 0.75, 1.0}, {0.0, 1.0, 0.5, 1.0, 0.0});
}

inline Excursion random_excursion(int n, sprtree::Rng& rng) {
  sprtree::SamplerConfig cfg;
  cfg.steps = n;
  return sample_excursion(cfg, rng);
}

// quotient metric read off the path: e(t1) + e(t2) - 2 min between
inline double path_tree_dist(const Excursion& e, double t1, double t2) {
  if (t1 > t2) std::swap(t1, t2);
  double lo = std::min(e(t1), e(t2));
  const auto& t = e.times();
  const auto& v = e.values();
  for (std::size_t i = 0; i < t.size(); ++i)
    if (t[i] > t1 && t[i] < t2) lo = std::min(lo, v[i]);
  return e(t1) + e(t2) - 2.0 * lo;
}

// quotient metric after pruning the straddle of gp and regrafting at the
// time tau_w: distances change only across the straddle boundary
inline double path_spr_dist(const Excursion& e, const sprtree::GammaPoint& gp, double tau_w,
                            double t1, double t2) {
  auto in_sub = [&](double t) {
    return t > gp.s_lo && t < gp.s_hi && path_tree_dist(e, t, gp.s_lo) > 0;
  };
  bool s1 = in_sub(t1), s2 = in_sub(t2);
  if (s1 == s2) return path_tree_dist(e, t1, t2);
  double ts = s1 ? t1 : t2;
  double to = s1 ? t2 : t1;
  return path_tree_dist(e, ts, gp.s_lo) + path_tree_dist(e, tau_w, to);
}

// time in the original path of the spliced path's time t
inline double spr_time_map(const sprtree::GammaPoint& gp, double v, double t) {
  double len = gp.s_hi - gp.s_lo;
  if (t <= v) return t <= gp.s_lo ? t : t + len;
  if (t <= v + len) return gp.s_lo + (t - v);
  double tc = t - len;
  return tc <= gp.s_lo ? tc : t;
}

}  // namespace testutil
