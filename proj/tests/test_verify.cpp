#include <cmath>

#include "doctest.h"
#include "helpers.hpp"
#include "sprtree/stats.hpp"
#include "sprtree/verify.hpp"

using namespace sprtree;

TEST_CASE("special function plumbing") {
  CHECK(riemann_zeta_checked(2.0) == doctest::Approx(M_PI * M_PI / 6.0).epsilon(1e-12));
  CHECK(std::tgamma(0.5) == doctest::Approx(std::sqrt(M_PI)).epsilon(1e-12));
  CHECK(gamma_q(0.5, 0.5 * 3.841458820694124) == doctest::Approx(0.05).epsilon(1e-6));
  CHECK(chi2_sf(21.665994333461924, 9) == doctest::Approx(0.01).epsilon(1e-6));
}

TEST_CASE("closed forms hit their pinned values") {
  CHECK(closed_form("excursion_max_tail", 1.0) == doctest::Approx(0.8220765).epsilon(2e-6));
  CHECK(closed_form("trim_length_mean", 1.0) == doctest::Approx(1.8237784).epsilon(2e-6));
  CHECK(closed_form("mass_beta_mean", 1.0) == doctest::Approx(std::sqrt(M_PI / 2.0)).epsilon(1e-12));
  CHECK(closed_form("mass_beta_mean", 1.0) == doctest::Approx(1.2533141).epsilon(1e-6));
  CHECK(closed_form("height_alpha_mean", 2.0) ==
        doctest::Approx(std::pow(2.0, 1.5) * std::sqrt(M_PI) * M_PI * M_PI / 6.0).epsilon(1e-12));
  CHECK(closed_form("height_alpha_mean", 2.0) == doctest::Approx(8.2464752).epsilon(1e-6));
  CHECK(closed_form("straddle_length_tail", 1.0) == 0.0);
  CHECK(closed_form("mass_tail_mean", 0.5) == doctest::Approx(std::sqrt(2.0 / M_PI)).epsilon(1e-12));
  CHECK_THROWS_AS(closed_form("excursion_max_tail", -1.0), std::domain_error);
  CHECK_THROWS_AS(closed_form("nope", 1.0), std::invalid_argument);
}

TEST_CASE("pushing the truncation deeper does not move the series") {
  // the stopping rule leaves the sums stable well below the tolerance
  for (double x : {0.3, 0.7, 1.0, 1.9}) {
    double a = closed_form("excursion_max_tail", x);
    double manual = 0;
    for (int n = 1; n <= 200; ++n) {
      double q = 2.0 * n * n * x * x;
      manual += 2.0 * (2.0 * q - 1.0) * std::exp(-q);
    }
    CHECK(a == doctest::Approx(manual).epsilon(1e-12));
  }
}

TEST_CASE("internal consistency identities") {
  for (double p : {0.1, 0.3, 0.5, 0.7, 0.9}) {
    CHECK(closed_form("mass_tail_mean", p) ==
          doctest::Approx(2.0 * closed_form("straddle_length_tail", p)).epsilon(1e-12));
  }
  for (double x : {0.4, 0.8, 1.0, 1.6}) {
    CHECK(closed_form("trim_length_mean", x) ==
          doctest::Approx(2.0 * closed_form("straddle_height_tail", x / 2.0)).epsilon(1e-12));
  }
  // quadrature route against the antiderivative
  for (double p0 : {0.05, 0.2, 0.5, 0.9}) {
    CHECK(closed_form("rho_density_norm", p0) ==
          doctest::Approx(2.0 * std::sqrt((1.0 - p0) / p0)).epsilon(1e-9));
  }
}

TEST_CASE("per-tree functionals agree with quadrature oracles") {
  Rng rng(307);
  for (int rep = 0; rep < 6; ++rep) {
    SamplerConfig cfg;
    cfg.steps = 12;
    cfg.weight_grid = 24;
    Rng seeded(307, rep);
    WeightedTree t = sample_crt(cfg, seeded);
    const int grid = 60;
    double q_mass_tail = 0, q_mass_beta = 0, q_trim = 0, q_height = 0;
    const double p = 0.3, beta = 1.3, x = 0.6, alpha = 2.0;
    for (std::size_t ei = 0; ei < t.edges().size(); ++ei) {
      double len = t.edges()[ei].len;
      for (int k = 0; k < grid; ++k) {
        PointRef u = PointRef::on_edge(static_cast<int>(ei), (k + 0.5) / grid * len);
        for (const auto& atom : t.weights()) {
          if (t.distance(u, atom.at) == 0.0) continue;
          SubtreeInfo s = subtree(t, u, atom.at);
          double w = atom.mass * len / grid;
          if (s.mass > p) q_mass_tail += w;
          q_mass_beta += w * std::pow(s.mass, beta);
          if (s.height > x) q_trim += w;
          q_height += w * std::pow(s.height, alpha);
        }
      }
    }
    double slack = 2.0 * t.total_length() / grid;
    CHECK(std::fabs(tree_mass_tail(t, p) - q_mass_tail) <= slack);
    CHECK(tree_mass_beta(t, beta) == doctest::Approx(q_mass_beta).epsilon(0.03));
    CHECK(std::fabs(tree_trim_length(t, x) - q_trim) <= slack);
    CHECK(tree_height_alpha(t, alpha) == doctest::Approx(q_height).epsilon(0.03));
  }
}

TEST_CASE("mc reports are reproducible and honest about degenerate setups") {
  SamplerConfig cfg;
  cfg.steps = 40;
  cfg.weight_grid = 32;
  cfg.seed = 404;
  EstimateReport a = mc_estimate("mass_beta_mean", 1.0, cfg, 400, 1);
  EstimateReport b = mc_estimate("mass_beta_mean", 1.0, cfg, 400, 4);
  CHECK(a.estimate == b.estimate);  // thread count cannot change the result
  CHECK(a.std_error == b.std_error);
  CHECK(a.theory == doctest::Approx(std::sqrt(M_PI / 2.0)).epsilon(1e-12));
  CHECK(a.std_error > 0.0);
  CHECK(a.n_samples == 400);

  EstimateReport smoke = mc_estimate("mass_tail_mean", 0.5, cfg, 50, 1);
  CHECK(std::isfinite(smoke.estimate));
  std::string js = smoke.to_json("{\"tool\":\"sprtree\"}");
  CHECK(js.find("\"estimate\"") != std::string::npos);
  CHECK(js.find("runtime") == std::string::npos);
}

TEST_CASE("estimates drift toward theory as the lattice refines") {
  // two methods, two resolutions; refined runs agree with the coarse ones
  // within joint noise and mostly move toward the targets
  struct Target {
    const char* id;
    double param;
  };
  const Target targets[] = {{"mass_tail_mean", 0.5},
                            {"mass_beta_mean", 1.0},
                            {"trim_length_mean", 1.0},
                            {"height_alpha_mean", 2.0}};
  int improved = 0;
  for (const auto& tgt : targets) {
    double theory = closed_form(tgt.id, tgt.param);
    SamplerConfig coarse;
    coarse.steps = 100;
    coarse.weight_grid = 64;
    coarse.seed = 812;
    SamplerConfig fine = coarse;
    fine.steps = 200;
    EstimateReport rc = mc_estimate(tgt.id, tgt.param, coarse, 3000, 4);
    EstimateReport rf = mc_estimate(tgt.id, tgt.param, fine, 3000, 4);
    SamplerConfig bv = fine;
    bv.method = SamplerMethod::bridge_vervaat;
    EstimateReport rb = mc_estimate(tgt.id, tgt.param, bv, 1500, 4);
    double joint = std::sqrt(rf.std_error * rf.std_error + rb.std_error * rb.std_error);
    CHECK(std::fabs(rf.estimate - rb.estimate) <= 3.0 * joint + 0.05 * theory);
    if (std::fabs(rf.estimate - theory) <= std::fabs(rc.estimate - theory) + rf.std_error)
      ++improved;
  }
  CHECK(improved >= 3);
}

TEST_CASE("split-structure distribution test calibrates") {
  SamplerConfig cfg;
  cfg.steps = 150;
  cfg.seed = 515;
  DistributionReport rep = distribution_test(cfg, 0.2, 800);
  CHECK(rep.qualifying >= 800);
  CHECK(rep.p_rho > 0.01);
  CHECK(rep.p_u > 0.01);
  CHECK(rep.p_independence > 0.01);
  CHECK(rep.control_shuffled_p > 0.01);
  CHECK(rep.control_dependent_p < 0.01);
  CHECK_THROWS_AS(distribution_test(cfg, 0.2, 10), std::invalid_argument);
}

TEST_CASE("pair statistics cannot tell the two copies apart") {
  SamplerConfig cfg;
  cfg.steps = 60;
  cfg.weight_grid = 48;
  cfg.seed = 616;
  ExchangeabilityReport rep = exchangeability_test(cfg, 0.05, 1200);
  CHECK(rep.p_max > 0.01);
  CHECK(rep.p_mean_dist > 0.01);
  CHECK(rep.p_excursion > 0.01);
}

TEST_CASE("sign test sanity") {
  std::vector<double> zeros(100, 0.0);
  CHECK(sign_test_p(zeros) == 1.0);
  std::vector<double> biased(100, 1.0);
  CHECK(sign_test_p(biased) < 0.01);
}
