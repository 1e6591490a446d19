#pragma once

#include <string>

#include "sprtree/contour.hpp"
#include "sprtree/excursion.hpp"
#include "sprtree/rng.hpp"
#include "sprtree/rtree.hpp"

namespace sprtree {

enum class SamplerMethod { dyck, bridge_vervaat };

SamplerMethod method_from_string(const std::string& s);
std::string to_string(SamplerMethod m);

struct SamplerConfig {
  int steps = 1000;       // lattice resolution n; paths use a 2n grid
  int weight_grid = 512;  // atoms in discretized tree weights
  std::uint64_t seed = 0;
  SamplerMethod method = SamplerMethod::dyck;
};

// Unit-length approximation of the normalized positive excursion.
// dyck: uniform strictly positive lattice excursion of 2n steps (cycle-lemma
// rotation of a +-1 bridge on 2n-2 steps, then lifted by one step at each
// end), breakpoints i/(2n), heights S_i/sqrt(2n).
// bridge_vervaat: Gaussian bridge on a 2n grid rotated at its argmin.
Excursion sample_excursion(const SamplerConfig& cfg, Rng& rng);

// Tree of the doubled excursion with the discretized uniform weight.
WeightedTree sample_crt(const SamplerConfig& cfg, Rng& rng);

// Point under the region measure ds da / (straddle length), normalized by
// its total mass (the tree's total edge length): a length-uniform tree point
// mapped back to its straddle, with the time coordinate uniform inside.
GammaPoint sample_gamma_point(const Excursion& e, Rng& rng);

struct Decomposition {
  double rho = 0;         // length of the subpath above the point
  Excursion hat_unit;     // subpath, rescaled to unit length
  Excursion check_unit;   // remainder, rescaled to unit length
  double u = 0;           // start of the subpath over the remainder's length
};

// Split a unit excursion at a region point into the two unit-rescaled parts.
Decomposition decompose(const Excursion& e, const GammaPoint& gp);

// Inverse of decompose.
Excursion reassemble(const Decomposition& d);

// Sample from the splice-length density 1/sqrt((1-rho) rho^3) truncated to
// [rho_min, 1], by the exact inverse CDF.
double sample_rho(double rho_min, Rng& rng);

// Exchangeable pair: two unit excursions built from the same ingredients
// (two independent sampled paths, one shared splice length, two independent
// uniform insertion positions).
std::pair<Excursion, Excursion> sample_symmetric_pair(const SamplerConfig& cfg, double rho_min,
                                                      Rng& rng);

}  // namespace sprtree
