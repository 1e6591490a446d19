#pragma once

#include <map>
#include <string>
#include <vector>

#include "sprtree/sampler.hpp"

namespace sprtree {

// Closed-form target values, by id:
//   excursion_max_tail(x)   P{max of a unit excursion > x}
//   straddle_height_tail(x) region mass where the straddle's peak exceeds x
//   straddle_length_tail(p) region mass where the straddle is longer than p
//   trim_length_mean(x)     mean trimmed length of the doubled-path tree
//   height_alpha_mean(a)    mean of subtree height^a over length x weight
//   mass_tail_mean(p)       mean region where the subtree mass exceeds p
//   mass_beta_mean(b)       mean of subtree mass^b over length x weight
//   rho_density_norm(p0)    integral of (1-r)^{-1/2} r^{-3/2} over [p0, 1]
double closed_form(const std::string& id, double param);

double riemann_zeta_checked(double alpha);

struct EstimateReport {
  std::string id;
  std::map<std::string, double> params;
  double estimate = 0;
  double std_error = 0;
  std::size_t n_samples = 0;
  SamplerConfig cfg;
  double theory = 0;
  double z_score = 0;
  double z_threshold = 3.0;
  bool pass = false;
  double runtime_seconds = 0;  // console diagnostics only, never serialized

  std::string to_json(const std::string& meta_json = "") const;
};

// Monte Carlo estimate of a closed-form target: the outer expectation is
// over sampled trees; the inner length x weight functional is integrated
// exactly on each tree, edge by edge.
EstimateReport mc_estimate(const std::string& id, double param, const SamplerConfig& cfg,
                           std::size_t n_samples, int threads = 1);

struct DistributionReport {
  std::size_t qualifying = 0;
  double p_rho = 0;          // splice length against its truncated density
  double p_u = 0;            // insertion position against uniform
  double p_independence = 0; // splice length vs subpath maximum
  double p_max = 0;          // rescaled subpath maximum against the max law
  double control_shuffled_p = 0;   // must pass
  double control_dependent_p = 0;  // must fail
  std::string to_json(const std::string& meta_json = "") const;
};

// Joint law of the split at a region point of a sampled excursion,
// conditioned on splice length >= p0; per-path conditional draws are
// reweighted by the qualifying region mass.
DistributionReport distribution_test(const SamplerConfig& cfg, double p0,
                                     std::size_t n_qualifying);

struct ExchangeabilityReport {
  std::size_t n_pairs = 0;
  double p_max = 0;        // sign test on path maxima
  double p_mean_dist = 0;  // sign test on tree mean distances
  double p_excursion = 0;  // sign test on the largest high-level component
  std::string to_json(const std::string& meta_json = "") const;
};

ExchangeabilityReport exchangeability_test(const SamplerConfig& cfg, double rho_min,
                                           std::size_t n_pairs);

// Exact per-tree functionals behind mc_estimate, exposed for the oracles.
double tree_mass_tail(const WeightedTree& t, double p);
double tree_mass_beta(const WeightedTree& t, double beta);
double tree_trim_length(const WeightedTree& t, double x);
double tree_height_alpha(const WeightedTree& t, double alpha);

}  // namespace sprtree
