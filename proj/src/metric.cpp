#include "sprtree/metric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>

namespace sprtree {

FiniteMetricSpace::FiniteMetricSpace(std::vector<std::vector<double>> dist) : d(std::move(dist)) {
  int n = size();
  for (int i = 0; i < n; ++i) {
    if (static_cast<int>(d[i].size()) != n) throw std::invalid_argument("metric: matrix not square");
    if (d[i][i] != 0.0) throw std::invalid_argument("metric: nonzero diagonal");
    for (int j = 0; j < n; ++j) {
      if (d[i][j] != d[j][i]) throw std::invalid_argument("metric: not symmetric");
      if (d[i][j] < 0) throw std::invalid_argument("metric: negative distance");
    }
  }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        if (d[i][j] > d[i][k] + d[k][j] + 1e-12)
          throw std::invalid_argument("metric: triangle inequality violated");
}

AtomicMeasure::AtomicMeasure(std::vector<double> m) : mass(std::move(m)) {
  double total = 0;
  for (double w : mass) {
    if (w < 0) throw std::invalid_argument("measure: negative mass");
    total += w;
  }
  if (std::fabs(total - 1.0) > 1e-12) throw std::invalid_argument("measure: masses must sum to 1");
}

void check_correspondence(const FiniteMetricSpace& x, const FiniteMetricSpace& y,
                          const Correspondence& r) {
  if (r.pairs.empty()) throw std::invalid_argument("correspondence: empty");
  std::vector<char> cx(x.size(), 0), cy(y.size(), 0);
  for (auto [i, j] : r.pairs) {
    if (i < 0 || i >= x.size() || j < 0 || j >= y.size())
      throw std::invalid_argument("correspondence: index out of range");
    cx[i] = cy[j] = 1;
  }
  for (char c : cx)
    if (!c) throw std::invalid_argument("correspondence: not surjective onto X");
  for (char c : cy)
    if (!c) throw std::invalid_argument("correspondence: not surjective onto Y");
}

double distortion(const FiniteMetricSpace& x, const FiniteMetricSpace& y,
                  const Correspondence& r) {
  check_correspondence(x, y, r);
  double dis = 0;
  for (std::size_t p = 0; p < r.pairs.size(); ++p)
    for (std::size_t q = p; q < r.pairs.size(); ++q) {
      auto [x1, y1] = r.pairs[p];
      auto [x2, y2] = r.pairs[q];
      dis = std::max(dis, std::fabs(x.d[x1][x2] - y.d[y1][y2]));
    }
  return dis;
}

double map_distortion(const FiniteMetricSpace& x, const FiniteMetricSpace& y,
                      const std::vector<int>& f) {
  double dis = 0;
  for (int i = 0; i < x.size(); ++i)
    for (int j = i + 1; j < x.size(); ++j)
      dis = std::max(dis, std::fabs(x.d[i][j] - y.d[f[i]][f[j]]));
  return dis;
}

double net_radius(const FiniteMetricSpace& y, const std::vector<int>& image) {
  double rad = 0;
  for (int j = 0; j < y.size(); ++j) {
    double best = std::numeric_limits<double>::infinity();
    for (int i : image) best = std::min(best, y.d[j][i]);
    rad = std::max(rad, best);
  }
  return rad;
}

namespace {

// Exact minimal distortion over correspondences. A minimal correspondence
// can be taken as graph(f) united with the transpose of graph(g), so the
// search assigns f then g with branch-and-bound pruning.
struct GhSearch {
  const FiniteMetricSpace& X;
  const FiniteMetricSpace& Y;
  std::vector<int> f, g;
  double best = std::numeric_limits<double>::infinity();

  GhSearch(const FiniteMetricSpace& x, const FiniteMetricSpace& y) : X(x), Y(y) {
    f.assign(X.size(), -1);
    g.assign(Y.size(), -1);
  }

  double pair_cost_f(int i, int yi) const {
    double c = 0;
    for (int p = 0; p < i; ++p) c = std::max(c, std::fabs(X.d[p][i] - Y.d[f[p]][yi]));
    return c;
  }

  void search_g(int j, double cur) {
    if (cur >= best) return;
    if (j == Y.size()) {
      best = cur;
      return;
    }
    for (int xj = 0; xj < X.size(); ++xj) {
      double c = cur;
      for (int q = 0; q < j; ++q) c = std::max(c, std::fabs(Y.d[q][j] - X.d[g[q]][xj]));
      for (int i = 0; i < X.size(); ++i) c = std::max(c, std::fabs(X.d[i][xj] - Y.d[f[i]][j]));
      if (c >= best) continue;
      g[j] = xj;
      search_g(j + 1, c);
      g[j] = -1;
    }
  }

  void search_f(int i, double cur) {
    if (cur >= best) return;
    if (i == X.size()) {
      search_g(0, cur);
      return;
    }
    for (int yi = 0; yi < Y.size(); ++yi) {
      double c = std::max(cur, pair_cost_f(i, yi));
      if (c >= best) continue;
      f[i] = yi;
      search_f(i + 1, c);
      f[i] = -1;
    }
  }
};

// nearest-assignment maps in both directions give a valid correspondence
Correspondence heuristic_correspondence(const FiniteMetricSpace& x, const FiniteMetricSpace& y,
                                        int shift) {
  Correspondence r;
  int n = x.size(), m = y.size();
  for (int i = 0; i < n; ++i) r.pairs.push_back({i, (i * m / std::max(1, n) + shift) % m});
  for (int j = 0; j < m; ++j) r.pairs.push_back({(j * n / std::max(1, m) + shift) % n, j});
  return r;
}

double local_search_dis(const FiniteMetricSpace& x, const FiniteMetricSpace& y,
                        Correspondence r) {
  double cur = distortion(x, y, r);
  bool improved = true;
  while (improved) {
    improved = false;
    for (std::size_t p = 0; p < r.pairs.size(); ++p) {
      auto saved = r.pairs[p];
      for (int j = 0; j < y.size(); ++j) {
        r.pairs[p].second = j;
        bool valid = true;
        // keep surjectivity
        std::vector<char> cy(y.size(), 0), cx(x.size(), 0);
        for (auto [a, b] : r.pairs) {
          cx[a] = 1;
          cy[b] = 1;
        }
        for (char c : cy) valid &= (c != 0);
        for (char c : cx) valid &= (c != 0);
        if (!valid) continue;
        double d = distortion(x, y, r);
        if (d < cur - 1e-15) {
          cur = d;
          saved = r.pairs[p];
          improved = true;
        }
      }
      r.pairs[p] = saved;
    }
  }
  return cur;
}

}  // namespace

BoundedValue gh(const FiniteMetricSpace& x, const FiniteMetricSpace& y, long exact_limit) {
  BoundedValue out;
  if (x.size() == 0 || y.size() == 0) throw std::invalid_argument("gh: empty space");
  if (static_cast<long>(x.size()) * y.size() <= exact_limit) {
    GhSearch s(x, y);
    // seed the incumbent with a heuristic so pruning starts tight
    Correspondence r0 = heuristic_correspondence(x, y, 0);
    s.best = distortion(x, y, r0) + 1e-12;
    s.search_f(0, 0.0);
    out.lower = out.upper = 0.5 * s.best;
    out.exact = true;
    return out;
  }
  double up = std::numeric_limits<double>::infinity();
  for (int shift = 0; shift < 3; ++shift)
    up = std::min(up, local_search_dis(x, y, heuristic_correspondence(x, y, shift)));
  out.upper = 0.5 * up;
  // any correspondence must relate every pair in X to some pair in Y
  double lo = 0;
  for (int i = 0; i < x.size(); ++i)
    for (int j = i + 1; j < x.size(); ++j) {
      double bestgap = std::numeric_limits<double>::infinity();
      for (int p = 0; p < y.size(); ++p)
        for (int q = 0; q < y.size(); ++q)
          bestgap = std::min(bestgap, std::fabs(x.d[i][j] - y.d[p][q]));
      lo = std::max(lo, bestgap);
    }
  for (int i = 0; i < y.size(); ++i)
    for (int j = i + 1; j < y.size(); ++j) {
      double bestgap = std::numeric_limits<double>::infinity();
      for (int p = 0; p < x.size(); ++p)
        for (int q = 0; q < x.size(); ++q)
          bestgap = std::min(bestgap, std::fabs(y.d[i][j] - x.d[p][q]));
      lo = std::max(lo, bestgap);
    }
  out.lower = 0.5 * lo;
  out.exact = false;
  return out;
}

namespace {

// Dinic max-flow on the bipartite transport graph.
struct MaxFlow {
  struct Arc {
    int to;
    double cap;
    int rev;
  };
  std::vector<std::vector<Arc>> g;
  std::vector<int> level, it;

  explicit MaxFlow(int n) : g(n), level(n), it(n) {}

  void add(int a, int b, double cap) {
    g[a].push_back({b, cap, static_cast<int>(g[b].size())});
    g[b].push_back({a, 0.0, static_cast<int>(g[a].size()) - 1});
  }

  bool bfs(int s, int t) {
    std::fill(level.begin(), level.end(), -1);
    std::queue<int> q;
    level[s] = 0;
    q.push(s);
    while (!q.empty()) {
      int v = q.front();
      q.pop();
      for (const auto& a : g[v]) {
        if (a.cap > 1e-15 && level[a.to] < 0) {
          level[a.to] = level[v] + 1;
          q.push(a.to);
        }
      }
    }
    return level[t] >= 0;
  }

  double dfs(int v, int t, double f) {
    if (v == t) return f;
    for (int& i = it[v]; i < static_cast<int>(g[v].size()); ++i) {
      Arc& a = g[v][i];
      if (a.cap > 1e-15 && level[a.to] == level[v] + 1) {
        double got = dfs(a.to, t, std::min(f, a.cap));
        if (got > 0) {
          a.cap -= got;
          g[a.to][a.rev].cap += got;
          return got;
        }
      }
    }
    return 0;
  }

  double run(int s, int t) {
    double flow = 0;
    while (bfs(s, t)) {
      std::fill(it.begin(), it.end(), 0);
      for (;;) {
        double f = dfs(s, t, std::numeric_limits<double>::infinity());
        if (f <= 0) break;
        flow += f;
      }
    }
    return flow;
  }
};

// largest coupling mass placeable on pairs with d <= thresh
double coupled_mass(const FiniteMetricSpace& x, const AtomicMeasure& mu, const AtomicMeasure& nu,
                    double thresh) {
  int n = x.size();
  MaxFlow mf(2 * n + 2);
  int s = 2 * n, t = 2 * n + 1;
  for (int i = 0; i < n; ++i) {
    if (mu.mass[i] > 0) mf.add(s, i, mu.mass[i]);
    if (nu.mass[i] > 0) mf.add(n + i, t, nu.mass[i]);
  }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (mu.mass[i] > 0 && nu.mass[j] > 0 && x.d[i][j] <= thresh) mf.add(i, n + j, mu.mass[i]);
  return mf.run(s, t);
}

}  // namespace

bool prohorov_le(const FiniteMetricSpace& x, const AtomicMeasure& mu, const AtomicMeasure& nu,
                 double eps) {
  if (mu.size() != x.size() || nu.size() != x.size())
    throw std::invalid_argument("prohorov: measure size mismatch");
  return 1.0 - coupled_mass(x, mu, nu, eps) <= eps + 1e-12;
}

double prohorov(const FiniteMetricSpace& x, const AtomicMeasure& mu, const AtomicMeasure& nu) {
  if (mu.size() != x.size() || nu.size() != x.size())
    throw std::invalid_argument("prohorov: measure size mismatch");
  std::vector<double> thresh{0.0};
  for (int i = 0; i < x.size(); ++i)
    for (int j = i + 1; j < x.size(); ++j) thresh.push_back(x.d[i][j]);
  std::sort(thresh.begin(), thresh.end());
  thresh.erase(std::unique(thresh.begin(), thresh.end()), thresh.end());
  // unmatched(k) decreases in k, thresh increases: min of max(thresh, unmatched)
  // sits at the crossover, found by binary search on unmatched(k) <= thresh(k)
  auto unmatched = [&](int k) { return 1.0 - coupled_mass(x, mu, nu, thresh[k]); };
  int lo = 0, hi = static_cast<int>(thresh.size()) - 1;
  if (unmatched(hi) > thresh[hi]) return std::max(thresh[hi], unmatched(hi));
  while (lo < hi) {
    int mid = (lo + hi) / 2;
    if (unmatched(mid) <= thresh[mid]) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  double best = std::max(thresh[lo], unmatched(lo));
  if (lo > 0) best = std::min(best, std::max(thresh[lo - 1], unmatched(lo - 1)));
  return best;
}

std::vector<int> isometry_from_correspondence(const FiniteMetricSpace& x,
                                              const FiniteMetricSpace& y, const Correspondence& r,
                                              double eps) {
  double dis = distortion(x, y, r);
  if (!(dis < 2 * eps)) throw std::domain_error("isometry_from_correspondence: distortion >= 2 eps");
  // greedy eps-net of X, first listed point wins
  std::vector<int> net;
  std::vector<char> covered(x.size(), 0);
  for (int i = 0; i < x.size(); ++i) {
    if (covered[i]) continue;
    net.push_back(i);
    for (int j = 0; j < x.size(); ++j)
      if (x.d[i][j] < eps) covered[j] = 1;
  }
  // partner of each net point through the correspondence, first listed
  std::vector<int> partner(net.size(), -1);
  for (std::size_t k = 0; k < net.size(); ++k) {
    for (auto [i, j] : r.pairs) {
      if (i == net[k]) {
        partner[k] = j;
        break;
      }
    }
  }
  // ball partition: x goes to the first net point whose open eps-ball holds it
  std::vector<int> f(x.size(), -1);
  for (int i = 0; i < x.size(); ++i) {
    for (std::size_t k = 0; k < net.size(); ++k) {
      if (x.d[net[k]][i] < eps) {
        f[i] = partner[k];
        break;
      }
    }
  }
  return f;
}

namespace {

AtomicMeasure pushforward(const std::vector<int>& f, const AtomicMeasure& mu, int ysize) {
  std::vector<double> m(ysize, 0.0);
  for (std::size_t i = 0; i < f.size(); ++i) m[f[i]] += mu.mass[i];
  return AtomicMeasure(std::move(m));
}

}  // namespace

std::pair<double, double> pushforward_prohorov_check(const FiniteMetricSpace& x,
                                                     const FiniteMetricSpace& y,
                                                     const std::vector<int>& f,
                                                     const AtomicMeasure& mu,
                                                     const AtomicMeasure& nu) {
  AtomicMeasure fm = pushforward(f, mu, y.size());
  AtomicMeasure fn = pushforward(f, nu, y.size());
  double lhs = prohorov(y, fm, fn);
  double rhs = prohorov(x, mu, nu) + map_distortion(x, y, f);
  return {lhs, rhs};
}

namespace {

// score of a candidate map for the weighted discrepancy: the least eps this
// map certifies in one direction
double map_score(const WeightedSpace& from, const WeightedSpace& to, const std::vector<int>& f) {
  double dis = map_distortion(from.space, to.space, f);
  double rad = net_radius(to.space, f);
  AtomicMeasure push = pushforward(f, from.weight, to.space.size());
  double dp = prohorov(to.space, push, to.weight);
  return std::max({dis, rad, dp});
}

double best_map_exact(const WeightedSpace& from, const WeightedSpace& to, std::vector<int>& best_f) {
  int n = from.space.size(), m = to.space.size();
  std::vector<int> f(n, 0);
  double best = std::numeric_limits<double>::infinity();
  for (;;) {
    double s = map_score(from, to, f);
    if (s < best) {
      best = s;
      best_f = f;
    }
    int k = n - 1;
    while (k >= 0 && f[k] == m - 1) f[k--] = 0;
    if (k < 0) break;
    ++f[k];
  }
  return best;
}

double best_map_local(const WeightedSpace& from, const WeightedSpace& to, std::vector<int>& best_f,
                      int restarts) {
  int n = from.space.size(), m = to.space.size();
  double best = std::numeric_limits<double>::infinity();
  for (int r = 0; r < restarts; ++r) {
    std::vector<int> f(n);
    for (int i = 0; i < n; ++i) f[i] = (i * m / std::max(1, n) + r) % m;
    double cur = map_score(from, to, f);
    bool improved = true;
    while (improved) {
      improved = false;
      for (int i = 0; i < n; ++i) {
        int savedj = f[i];
        for (int j = 0; j < m; ++j) {
          if (j == savedj) continue;
          f[i] = j;
          double s = map_score(from, to, f);
          if (s < cur - 1e-15) {
            cur = s;
            savedj = j;
            improved = true;
          }
        }
        f[i] = savedj;
      }
    }
    if (cur < best) {
      best = cur;
      best_f = f;
    }
  }
  return best;
}

}  // namespace

DeltaResult delta_ghwt(const WeightedSpace& xw, const WeightedSpace& yw, double exact_limit) {
  int n = xw.space.size(), m = yw.space.size();
  if (n == 0 || m == 0) throw std::invalid_argument("delta_ghwt: empty space");
  DeltaResult out;
  double fwd_count = std::pow(static_cast<double>(m), n);
  double bwd_count = std::pow(static_cast<double>(n), m);
  if (fwd_count <= exact_limit && bwd_count <= exact_limit) {
    double sf = best_map_exact(xw, yw, out.f);
    double sg = best_map_exact(yw, xw, out.g);
    out.lower = out.upper = std::max(sf, sg);
    out.exact = true;
    return out;
  }
  double sf = best_map_local(xw, yw, out.f, 3);
  double sg = best_map_local(yw, xw, out.g, 3);
  out.upper = std::max(sf, sg);
  // a map within eps exists only if the unweighted distance allows one
  out.lower = (2.0 / 3.0) * gh(xw.space, yw.space, 16).lower;
  out.exact = false;
  return out;
}

BoundedValue d_ghwt_bounds(const DeltaResult& delta) {
  BoundedValue out;
  out.lower = 0.5 * std::pow(delta.lower, 0.25);
  out.upper = std::pow(delta.upper, 0.25);
  out.exact = delta.exact;
  return out;
}

WeightedSpace discretize_tree(const WeightedTree& t, double eps) {
  std::vector<PointRef> points;
  for (int v = 0; v < t.vertex_count(); ++v) points.push_back(PointRef::at_vertex(v));
  std::vector<double> masses(points.size(), 0.0);
  for (const auto& a : t.weights()) {
    points.push_back(a.at);
    masses.push_back(a.mass);
  }
  if (eps > 0 && t.total_length() > 0) {
    for (const auto& p : eps_net(t, eps / 2.0)) {
      points.push_back(p);
      masses.push_back(0.0);
    }
  }
  int n = static_cast<int>(points.size());
  std::vector<std::vector<double>> d(n, std::vector<double>(n, 0.0));
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) d[i][j] = d[j][i] = t.distance(points[i], points[j]);
  WeightedSpace ws;
  ws.space = FiniteMetricSpace(std::move(d));
  ws.weight = AtomicMeasure(std::move(masses));
  return ws;
}

}  // namespace sprtree
