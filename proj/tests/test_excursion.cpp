#include <cmath>
#include <sstream>

#include "doctest.h"
#include "helpers.hpp"
#include "sprtree/excursion.hpp"

using namespace sprtree;
using testutil::tent;
using testutil::wpath;

TEST_CASE("eval interpolates linearly") {
  Excursion e = tent();
  CHECK(e(0.25) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(e(0.0) == 0.0);
  CHECK(e(1.0) == 0.0);
  CHECK(wpath()(0.375) == doctest::Approx(0.75).epsilon(1e-15));
  CHECK_THROWS_AS(e(-0.1), std::domain_error);
  CHECK_THROWS_AS(e(1.1), std::domain_error);
}

TEST_CASE("eval matches a dense independent interpolator") {
  Rng rng(11);
  for (int rep = 0; rep < 5; ++rep) {
    Excursion e = testutil::random_excursion(20, rng);
    const auto& t = e.times();
    const auto& v = e.values();
    for (std::size_t i = 0; i < e.size(); ++i) CHECK(e(t[i]) == doctest::Approx(v[i]).epsilon(1e-12));
    for (int k = 1; k < 400; ++k) {
      double x = k / 400.0 * e.zeta();
      // reference: scan segments directly
      double ref = 0;
      for (std::size_t i = 0; i + 1 < t.size(); ++i) {
        if (x >= t[i] && x <= t[i + 1]) {
          ref = v[i] + (x - t[i]) / (t[i + 1] - t[i]) * (v[i + 1] - v[i]);
          break;
        }
      }
      CHECK(e(x) == doctest::Approx(ref).epsilon(1e-9));
    }
  }
}

TEST_CASE("canonical form merges collinear breakpoints") {
  Excursion a({0.0, 0.25, 0.5, 1.0}, {0.0, 0.25, 0.5, 0.0});
  CHECK(a.size() == 3);  // the midpoint of the ascent is dropped
  CHECK(approx_equal(a, tent()));
  CHECK_THROWS_AS(Excursion({0.0, 0.5, 1.0}, {0.0, -0.1, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(Excursion({0.0, 1.0}, {0.1, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(Excursion({0.0, 0.4, 0.6, 1.0}, {0.0, 0.5, 0.5, 0.0}), std::invalid_argument);
}

TEST_CASE("straddle on the tent and the W path") {
  Excursion e = tent();
  GammaPoint whole = straddle(e, 0.5, 0.0);
  CHECK(whole.s_lo == 0.0);
  CHECK(whole.s_hi == 1.0);

  GammaPoint w = straddle(wpath(), 0.25, 0.6);
  CHECK(w.s_lo == doctest::Approx(0.15).epsilon(1e-14));
  CHECK(w.s_hi == doctest::Approx(0.45).epsilon(1e-14));

  GammaPoint peak = straddle(wpath(), 0.25, 1.0);
  CHECK(peak.s_lo == 0.25);
  CHECK(peak.s_hi == 0.25);

  CHECK_THROWS_AS(straddle(e, 0.5, 0.75), std::domain_error);
  CHECK_THROWS_AS(straddle(e, 0.0, 0.0), std::domain_error);
}

TEST_CASE("straddle endpoints sit at the level and bound the time") {
  Rng rng(3);
  for (int rep = 0; rep < 200; ++rep) {
    Excursion e = testutil::random_excursion(16, rng);
    double s = rng.uniform(0.05, 0.95);
    double a = rng.uniform01() * e(s);
    GammaPoint gp = straddle(e, s, a);
    CHECK(gp.s_lo <= s);
    CHECK(gp.s_hi >= s);
    CHECK(e(gp.s_lo) == doctest::Approx(a).epsilon(1e-12));
    CHECK(e(gp.s_hi) == doctest::Approx(a).epsilon(1e-12));
  }
}

TEST_CASE("excise splits the W path as expected") {
  Excursion e = wpath();
  GammaPoint gp = straddle(e, 0.25, 0.5);
  CHECK(gp.s_lo == doctest::Approx(0.125).epsilon(1e-15));
  CHECK(gp.s_hi == doctest::Approx(0.5).epsilon(1e-15));
  auto [hat, check] = excise(e, gp);
  Excursion hat_expected({0.0, 0.125, 0.375}, {0.0, 0.5, 0.0});
  Excursion check_expected({0.0, 0.125, 0.375, 0.625}, {0.0, 0.5, 1.0, 0.0});
  CHECK(approx_equal(hat, hat_expected, 1e-12));
  CHECK(approx_equal(check, check_expected, 1e-12));
}

TEST_CASE("excise agrees with the grid-splice oracle") {
  Rng rng(7);
  for (int rep = 0; rep < 50; ++rep) {
    Excursion e = testutil::random_excursion(12, rng);
    ContourTree ct(e);
    GammaPoint gp = ct.sample_gamma(rng);
    auto [hat, check] = excise(e, gp);
    double len = gp.s_hi - gp.s_lo;
    CHECK(hat.zeta() == doctest::Approx(len).epsilon(1e-12));
    CHECK(hat.zeta() + check.zeta() == doctest::Approx(e.zeta()).epsilon(1e-12));
    for (int k = 0; k <= 1000; ++k) {
      double t = k / 1000.0;
      double th = t * len;
      CHECK(hat(th) == doctest::Approx(e(gp.s_lo + th) - gp.level).epsilon(1e-9));
      double tc = t * check.zeta();
      double ref = tc <= gp.s_lo ? e(tc) : e(tc + len);
      CHECK(check(tc) == doctest::Approx(ref).epsilon(1e-9));
    }
  }
}

TEST_CASE("excise error paths") {
  Excursion e = wpath();
  GammaPoint whole = straddle(e, 0.5, 0.0);
  CHECK_THROWS_AS(excise(e, whole), std::domain_error);  // nothing would remain
  GammaPoint degen = straddle(e, 0.25, 1.0);
  CHECK_THROWS_AS(excise(e, degen), std::domain_error);
}

TEST_CASE("rescale scales time by c and height by sqrt(c)") {
  Excursion e = tent();
  CHECK(approx_equal(rescale(e, 1.0), e));
  Excursion big = rescale(e, 4.0);
  CHECK(big.zeta() == doctest::Approx(4.0));
  CHECK(big.max_value() == doctest::Approx(1.0));
  CHECK(approx_equal(rescale(rescale(e, 3.7), 1.0 / 3.7), e, 1e-12));
  CHECK_THROWS_AS(rescale(e, 0.0), std::domain_error);
}

TEST_CASE("insert boundary splices and domain errors") {
  Excursion piece = tent(), host = wpath();
  Excursion at0 = insert(piece, host, 0.0, 0.5);
  Excursion at1 = insert(piece, host, 1.0, 0.5);
  CHECK(at0.zeta() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(at1.zeta() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(at0.values().front() == 0.0);
  CHECK(at0.values().back() == 0.0);
  CHECK_THROWS_AS(insert(piece, host, 0.5, 0.0), std::domain_error);
  CHECK_THROWS_AS(insert(piece, host, 0.5, 1.0), std::domain_error);
  CHECK_THROWS_AS(insert(rescale(piece, 2.0), host, 0.5, 0.5), std::domain_error);
}

TEST_CASE("insert matches the grid-splice oracle") {
  Rng rng(13);
  for (int rep = 0; rep < 30; ++rep) {
    Excursion piece = testutil::random_excursion(10, rng);
    Excursion host = testutil::random_excursion(10, rng);
    double u = rng.uniform01(), rho = rng.uniform(0.05, 0.95);
    Excursion out = insert(piece, host, u, rho);
    CHECK(out.zeta() == doctest::Approx(1.0).epsilon(1e-12));
    double x0 = (1.0 - rho) * u;
    double sq = std::sqrt(1.0 - rho), sp = std::sqrt(rho);
    double base = sq * host(u);
    for (int k = 0; k <= 1000; ++k) {
      double t = k / 1000.0;
      double ref;
      if (t <= x0) {
        ref = sq * host(t / (1.0 - rho));
      } else if (t <= x0 + rho) {
        ref = base + sp * piece((t - x0) / rho);
      } else {
        ref = sq * host((t - rho) / (1.0 - rho));
      }
      CHECK(out(t) == doctest::Approx(ref).epsilon(1e-9));
    }
  }
}

TEST_CASE("excise then insert reproduces the path") {
  Rng rng(17);
  for (int rep = 0; rep < 200; ++rep) {
    Excursion e = testutil::random_excursion(14, rng);
    ContourTree ct(e);
    GammaPoint gp = ct.sample_gamma(rng);
    auto [hat, check] = excise(e, gp);
    Excursion back = insert(rescale(hat, 1.0 / hat.zeta()), rescale(check, 1.0 / check.zeta()),
                            gp.s_lo / check.zeta(), hat.zeta());
    CHECK(approx_equal(back, e, 1e-12));
  }
}

TEST_CASE("level_starts finds component left endpoints") {
  CHECK(level_starts(tent(), 0.25) == std::vector<double>{0.25});
  CHECK(level_starts(tent(), 0.9).empty());

  // independent oracle: dense scan for components of {e > a} starting at a
  Rng rng(23);
  for (int rep = 0; rep < 40; ++rep) {
    Excursion e = testutil::random_excursion(12, rng);
    double a = rng.uniform01() * e.max_value();
    auto starts = level_starts(e, a);
    const int grid = 20000;
    std::vector<double> ref;
    bool inside = false;
    for (int k = 0; k <= grid; ++k) {
      double t = k * e.zeta() / grid;
      bool above = e(t) > a;
      if (above && !inside) {
        double lo = (k > 0) ? (k - 1) * e.zeta() / grid : 0.0, hi = t;
        for (int it = 0; it < 60; ++it) {
          double mid = 0.5 * (lo + hi);
          (e(mid) > a ? hi : lo) = mid;
        }
        ref.push_back(hi);
      }
      inside = above;
    }
    REQUIRE(starts.size() == ref.size());
    for (std::size_t i = 0; i < ref.size(); ++i)
      CHECK(starts[i] == doctest::Approx(ref[i]).epsilon(1e-4));
  }
}

TEST_CASE("level_starts on the W path") {
  auto s = level_starts(wpath(), 0.75);
  REQUIRE(s.size() == 2);
  CHECK(s[0] == doctest::Approx(0.1875).epsilon(1e-14));
  CHECK(s[1] == doctest::Approx(0.625).epsilon(1e-14));
}

TEST_CASE("path_spr at the original spot is the identity") {
  Rng rng(29);
  for (int rep = 0; rep < 100; ++rep) {
    Excursion e = testutil::random_excursion(12, rng);
    ContourTree ct(e);
    GammaPoint gp = ct.sample_gamma(rng);
    Excursion back = path_spr(e, gp, gp.s_lo);
    CHECK(approx_equal(back, e, 1e-12));
  }
}

TEST_CASE("path_spr length conservation and prepend at zero") {
  Excursion e = wpath();
  GammaPoint gp = straddle(e, 0.25, 0.5);
  Excursion moved = path_spr(e, gp, 0.0);
  CHECK(moved.zeta() == doctest::Approx(1.0).epsilon(1e-12));
  // excised tent prepended at level zero
  auto [hat, check] = excise(e, gp);
  for (int k = 0; k <= 1000; ++k) {
    double t = k / 1000.0;
    double ref = t <= hat.zeta() ? hat(t) : check(t - hat.zeta());
    CHECK(moved(t) == doctest::Approx(ref).epsilon(1e-9));
  }

  Rng rng(31);
  for (int rep = 0; rep < 200; ++rep) {
    Excursion ex = testutil::random_excursion(12, rng);
    ContourTree ct(ex);
    GammaPoint g = ct.sample_gamma(rng);
    double zchk = ex.zeta() - (g.s_hi - g.s_lo);
    Excursion out = path_spr(ex, g, rng.uniform01() * zchk);
    CHECK(out.zeta() == doctest::Approx(ex.zeta()).epsilon(1e-12));
  }
}

TEST_CASE("csv round trip is exact") {
  Rng rng(37);
  Excursion e = testutil::random_excursion(25, rng);
  Excursion back = excursion_from_csv_string(to_csv(e));
  REQUIRE(back.size() == e.size());
  for (std::size_t i = 0; i < e.size(); ++i) {
    CHECK(back.times()[i] == e.times()[i]);
    CHECK(back.values()[i] == e.values()[i]);
  }
}
