#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "sprtree/rng.hpp"
#include "sprtree/rtree.hpp"

namespace sprtree {

// One move of the jump chain: wait Exponential(total length), cut at a
// length-uniform point, regraft at a weight-distributed point.
struct JumpStep {
  double holding_time = 0;
  WeightedTree next;
};

JumpStep spr_jump_step(const WeightedTree& t, Rng& rng, double time_scale = 1.0);

struct JumpRecord {
  int jump_index = 0;
  double time = 0;
  double mean_dist = 0;
  double height = 0;
  double diameter = 0;
  double total_length = 0;
};

struct ChainTrajectory {
  std::vector<JumpRecord> records;  // index 0 is the initial state
  std::map<int, WeightedTree> snapshots;
  WeightedTree final_tree;
};

// Run until the first jump time past `horizon`. The root point of the
// initial tree is carried through the moves for the height observable.
ChainTrajectory run_chain(const WeightedTree& t0, double horizon,
                          const std::vector<int>& snapshot_indices, Rng& rng,
                          double time_scale = 1.0);

// Leaf-labeled unrooted binary tree topology, no edge lengths. Leaves are
// 0..n_leaves-1; internal vertices follow.
struct Cladogram {
  int n_leaves = 0;
  std::vector<std::pair<int, int>> edges;

  static Cladogram star3();
  static Cladogram random_topology(int n, Rng& rng);
  int vertex_count() const;
};

// Canonical key: the sorted leaf bipartitions of the internal edges.
std::vector<std::uint64_t> topology_key(const Cladogram& c);

// One uniform prune-regraft move: cut edge uniform over edges, pruned side
// by a fair coin, regraft edge uniform over the remaining component, with
// the identity proposal kept as a self-loop.
Cladogram cladogram_spr_step(const Cladogram& c, Rng& rng);

std::vector<Cladogram> enumerate_topologies(int n_leaves);

// Exact single-step transition probabilities between all topologies on
// n <= 6 leaves, rows in enumerate_topologies order.
std::vector<std::vector<double>> transition_matrix(int n_leaves);

}  // namespace sprtree
