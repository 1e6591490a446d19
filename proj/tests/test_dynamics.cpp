#include <cmath>
#include <map>
#include <set>

#include "doctest.h"
#include "helpers.hpp"
#include "sprtree/dynamics.hpp"
#include "sprtree/sampler.hpp"
#include "sprtree/stats.hpp"

using namespace sprtree;

namespace {

WeightedTree y_tree() {
  std::vector<WeightAtom> atoms{{PointRef::at_vertex(2), 0.5}, {PointRef::at_vertex(3), 0.5}};
  return WeightedTree(4, {{0, 1, 0.5}, {1, 2, 0.5}, {1, 3, 0.5}}, std::move(atoms), 0);
}

}  // namespace

TEST_CASE("holding times have mean one over the total length") {
  WeightedTree y = y_tree();
  Rng rng(211);
  const int reps = 10000;
  std::vector<double> holds(reps);
  for (int i = 0; i < reps; ++i) holds[i] = spr_jump_step(y, rng).holding_time;
  MeanStderr ms = mean_stderr(holds);
  CHECK(std::fabs(ms.mean - 2.0 / 3.0) <= 3.0 * ms.std_error);
}

TEST_CASE("jumps preserve total length and weights") {
  Rng rng(223);
  SamplerConfig cfg;
  cfg.steps = 30;
  cfg.weight_grid = 16;
  WeightedTree t = sample_crt(cfg, rng);
  double len = t.total_length();
  for (int i = 0; i < 50; ++i) {
    JumpStep s = spr_jump_step(t, rng);
    t = s.next;
    CHECK(t.total_length() == doctest::Approx(len).epsilon(1e-12));
    CHECK(t.weights().size() == 16);
    double mass = 0;
    for (const auto& a : t.weights()) mass += a.mass;
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("single-atom weights pull every regraft to one spot") {
  WeightedTree y(4, {{0, 1, 0.5}, {1, 2, 0.5}, {1, 3, 0.5}},
                 {{PointRef::at_vertex(0), 1.0}}, 0);
  Rng rng(227);
  for (int i = 0; i < 30; ++i) {
    JumpStep s = spr_jump_step(y, rng);
    // every moved subtree hangs at the single atom: the root keeps its place
    CHECK(s.next.total_length() == doctest::Approx(1.5).epsilon(1e-12));
    REQUIRE(s.next.weights().size() == 1);
    CHECK(s.next.weights()[0].at.vertex == 0);
  }
}

TEST_CASE("trajectories record strictly increasing jump times") {
  Rng rng(229);
  SamplerConfig cfg;
  cfg.steps = 40;
  cfg.weight_grid = 32;
  WeightedTree t0 = sample_crt(cfg, rng);
  ChainTrajectory traj = run_chain(t0, 0.4, {1, 3}, rng);
  REQUIRE(!traj.records.empty());
  CHECK(traj.records[0].jump_index == 0);
  for (std::size_t i = 1; i < traj.records.size(); ++i) {
    CHECK(traj.records[i].time > traj.records[i - 1].time);
    CHECK(traj.records[i].total_length ==
          doctest::Approx(traj.records[0].total_length).epsilon(1e-12));
  }
  for (const auto& [idx, snap] : traj.snapshots)
    CHECK(snap.total_length() == doctest::Approx(t0.total_length()).epsilon(1e-12));

  // horizon shorter than any holding time: only the initial record
  WeightedTree y = y_tree();
  Rng tiny(1);
  ChainTrajectory none = run_chain(y, 1e-9, {}, tiny);
  CHECK(none.records.size() == 1);
}

TEST_CASE("topology enumeration counts") {
  CHECK(enumerate_topologies(3).size() == 1);
  CHECK(enumerate_topologies(4).size() == 3);
  CHECK(enumerate_topologies(5).size() == 15);
  CHECK(enumerate_topologies(6).size() == 105);
}

TEST_CASE("cladogram moves stay valid binary topologies") {
  Rng rng(233);
  Cladogram c = Cladogram::random_topology(6, rng);
  for (int i = 0; i < 300; ++i) {
    c = cladogram_spr_step(c, rng);
    CHECK(c.edges.size() == 2 * 6 - 3);
    std::vector<int> deg(c.vertex_count(), 0);
    for (auto [a, b] : c.edges) {
      ++deg[a];
      ++deg[b];
    }
    for (int v = 0; v < c.n_leaves; ++v) CHECK(deg[v] == 1);
    for (int v = c.n_leaves; v < c.vertex_count(); ++v) CHECK(deg[v] == 3);
  }
}

TEST_CASE("three-leaf chain is degenerate") {
  Rng rng(239);
  Cladogram c = Cladogram::star3();
  auto key = topology_key(c);
  for (int i = 0; i < 20; ++i) {
    c = cladogram_spr_step(c, rng);
    CHECK(topology_key(c) == key);
  }
}

TEST_CASE("transition matrix rows, symmetry, irreducibility") {
  for (int n : {4, 5}) {
    auto m = transition_matrix(n);
    std::size_t k = m.size();
    for (std::size_t i = 0; i < k; ++i) {
      double row = 0;
      for (double x : m[i]) row += x;
      CHECK(row == doctest::Approx(1.0).epsilon(1e-14));
      for (std::size_t j = 0; j < k; ++j)
        CHECK(std::fabs(m[i][j] - m[j][i]) <= 1e-14);
    }
  }
  auto m4 = transition_matrix(4);
  for (std::size_t i = 0; i < m4.size(); ++i)
    for (std::size_t j = 0; j < m4.size(); ++j) CHECK(m4[i][j] > 0.0);
}

TEST_CASE("four-leaf occupation is uniform") {
  Rng rng(241);
  Cladogram c = Cladogram::random_topology(4, rng);
  std::map<std::vector<std::uint64_t>, int> counts;
  const int steps = 20000;
  const int batches = 10;
  std::vector<std::vector<double>> batch_freq(3, std::vector<double>());
  auto topos = enumerate_topologies(4);
  std::map<std::vector<std::uint64_t>, int> index;
  for (std::size_t i = 0; i < topos.size(); ++i) index[topology_key(topos[i])] = static_cast<int>(i);
  std::vector<std::vector<int>> batch_counts(batches, std::vector<int>(3, 0));
  for (int b = 0; b < batches; ++b)
    for (int s = 0; s < steps / batches; ++s) {
      c = cladogram_spr_step(c, rng);
      ++batch_counts[b][index.at(topology_key(c))];
    }
  for (int t = 0; t < 3; ++t) {
    std::vector<double> freqs(batches);
    for (int b = 0; b < batches; ++b)
      freqs[b] = batch_counts[b][t] / static_cast<double>(steps / batches);
    MeanStderr ms = mean_stderr(freqs);
    CHECK(std::fabs(ms.mean - 1.0 / 3.0) <= 3.0 * ms.std_error + 0.01);
  }
  (void)counts;
}
