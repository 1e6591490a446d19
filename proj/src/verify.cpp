#include "sprtree/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <queue>
#include <stdexcept>
#include <thread>

#include "json.hpp"
#include "sprtree/stats.hpp"

namespace sprtree {

double riemann_zeta_checked(double alpha) {
  if (!(alpha > 1)) throw std::domain_error("zeta: needs alpha > 1");
  return std::riemann_zeta(alpha);
}

namespace {

// sum f(n) for n >= 1, stopping once a term drops below 1e-14 of the total
template <typename F>
double tail_series(F term) {
  double sum = 0;
  for (int n = 1; n < 10000; ++n) {
    double t = term(n);
    sum += t;
    if (std::fabs(t) < 1e-14 * std::fabs(sum) && n >= 3) break;
  }
  return sum;
}

double simpson(const std::function<double(double)>& f, double a, double b, int panels) {
  double h = (b - a) / panels;
  double s = f(a) + f(b);
  for (int i = 1; i < panels; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

}  // namespace

double closed_form(const std::string& id, double param) {
  if (id == "excursion_max_tail") {
    double x = param;
    if (!(x > 0)) throw std::domain_error("excursion_max_tail: x > 0 required");
    return tail_series([x](int n) {
      double q = 2.0 * n * n * x * x;
      return 2.0 * (2.0 * q - 1.0) * std::exp(-q);
    });
  }
  if (id == "straddle_height_tail") {
    double x = param;
    if (!(x > 0)) throw std::domain_error("straddle_height_tail: x > 0 required");
    return tail_series([x](int n) { return 2.0 * n * x * std::exp(-2.0 * n * n * x * x); });
  }
  if (id == "straddle_length_tail") {
    double p = param;
    if (!(p > 0 && p <= 1)) throw std::domain_error("straddle_length_tail: p in (0,1] required");
    return std::sqrt((1.0 - p) / (2.0 * M_PI * p));
  }
  if (id == "trim_length_mean") {
    double x = param;
    if (!(x > 0)) throw std::domain_error("trim_length_mean: x > 0 required");
    return tail_series([x](int n) { return 2.0 * n * x * std::exp(-0.5 * n * n * x * x); });
  }
  if (id == "height_alpha_mean") {
    double a = param;
    if (!(a > 1)) throw std::domain_error("height_alpha_mean: alpha > 1 required");
    return std::pow(2.0, 0.5 * (a + 1.0)) * a * std::tgamma(0.5 * (a + 1.0)) *
           riemann_zeta_checked(a);
  }
  if (id == "mass_tail_mean") {
    double p = param;
    if (!(p > 0 && p <= 1)) throw std::domain_error("mass_tail_mean: p in (0,1] required");
    return std::sqrt(2.0 * (1.0 - p) / (M_PI * p));
  }
  if (id == "mass_beta_mean") {
    double b = param;
    if (!(b > 0.5)) throw std::domain_error("mass_beta_mean: beta > 1/2 required");
    return std::tgamma(b - 0.5) / (std::sqrt(2.0) * std::tgamma(b));
  }
  if (id == "rho_density_norm") {
    double p0 = param;
    if (!(p0 > 0 && p0 < 1)) throw std::domain_error("rho_density_norm: p0 in (0,1) required");
    // integrable endpoint singularity at 1: substitute 1 - rho = s^2
    auto g = [](double s) { return 2.0 / std::pow(1.0 - s * s, 1.5); };
    return simpson(g, 0.0, std::sqrt(1.0 - p0), 1 << 16);
  }
  throw std::invalid_argument("closed_form: unknown id " + id);
}

namespace {

// tree with every atom location materialized as a vertex, plus per-vertex
// atom mass
struct AtomizedTree {
  int n = 0;
  std::vector<Edge> edges;
  std::vector<double> vmass;
  std::vector<int> par, pedge, order;

  explicit AtomizedTree(const WeightedTree& t) {
    n = t.vertex_count();
    edges = t.edges();
    std::vector<std::pair<PointRef, double>> atoms;
    for (const auto& a : t.weights()) atoms.push_back({a.at, a.mass});
    // split edges at atom locations; later atoms are remapped as splits happen
    for (auto& [ref, mass] : atoms) {
      (void)mass;
      if (ref.is_vertex()) continue;
      int eid = ref.edge;
      double off = ref.offset;
      Edge e = edges[eid];
      int m = n++;
      edges[eid] = {e.a, m, off};
      int upper = static_cast<int>(edges.size());
      edges.push_back({m, e.b, e.len - off});
      for (auto& [r2, m2] : atoms) {
        (void)m2;
        if (r2.is_vertex() || r2.edge != eid) continue;
        if (r2.offset == off) {
          r2 = PointRef::at_vertex(m);
        } else if (r2.offset > off) {
          r2 = PointRef::on_edge(upper, r2.offset - off);
        }
      }
    }
    vmass.assign(n, 0.0);
    for (const auto& [ref, mass] : atoms) vmass[ref.vertex] += mass;
    // rooted arrays from vertex 0
    std::vector<std::vector<std::pair<int, int>>> adj(n);
    for (std::size_t i = 0; i < edges.size(); ++i) {
      adj[edges[i].a].push_back({edges[i].b, static_cast<int>(i)});
      adj[edges[i].b].push_back({edges[i].a, static_cast<int>(i)});
    }
    par.assign(n, -2);
    pedge.assign(n, -1);
    order.reserve(n);
    par[0] = -1;
    std::queue<int> q;
    q.push(0);
    while (!q.empty()) {
      int v = q.front();
      q.pop();
      order.push_back(v);
      for (auto [w, eid] : adj[v]) {
        if (par[w] != -2) continue;
        par[w] = v;
        pedge[w] = eid;
        q.push(w);
      }
    }
    adj_ = std::move(adj);
  }

  // per edge: (child-side mass, extent beyond the child away from the edge,
  // extent beyond the parent away from the edge)
  struct EdgeData {
    double child_mass = 0;
    double ext_child = 0;
    double ext_parent = 0;
    double len = 0;
  };

  std::vector<EdgeData> edge_data() const {
    std::vector<double> sub(vmass);
    std::vector<double> down(n, 0.0), best1(n, 0.0), best2(n, 0.0);
    std::vector<int> arg1(n, -1);
    for (int i = n - 1; i >= 0; --i) {
      int v = order[i];
      if (par[v] < 0) continue;
      sub[par[v]] += sub[v];
      double cand = edges[pedge[v]].len + down[v];
      int p = par[v];
      if (cand > best1[p]) {
        best2[p] = best1[p];
        best1[p] = cand;
        arg1[p] = v;
      } else if (cand > best2[p]) {
        best2[p] = cand;
      }
      down[p] = std::max(down[p], cand);
    }
    std::vector<double> up(n, 0.0);
    for (int v : order) {
      if (par[v] < 0) continue;
      int p = par[v];
      double sibling = (arg1[p] == v) ? best2[p] : best1[p];
      up[v] = edges[pedge[v]].len + std::max(up[p], sibling);
    }
    std::vector<EdgeData> out(edges.size());
    for (std::size_t i = 0; i < edges.size(); ++i) {
      const Edge& e = edges[i];
      int child = (par[e.b] == e.a) ? e.b : e.a;
      int parent = (child == e.b) ? e.a : e.b;
      double sibling = (arg1[parent] == child) ? best2[parent] : best1[parent];
      out[i].child_mass = sub[child];
      out[i].ext_child = down[child];
      out[i].ext_parent = std::max(up[parent], sibling);
      out[i].len = e.len;
    }
    return out;
  }

 private:
  std::vector<std::vector<std::pair<int, int>>> adj_;
};

}  // namespace

double tree_mass_tail(const WeightedTree& t, double p) {
  AtomizedTree at(t);
  double total = 0;
  for (const auto& ed : at.edge_data()) {
    double mc = ed.child_mass, mp = 1.0 - mc;
    total += ed.len * (mp * (mc > p ? 1.0 : 0.0) + mc * (mp > p ? 1.0 : 0.0));
  }
  return total;
}

double tree_mass_beta(const WeightedTree& t, double beta) {
  AtomizedTree at(t);
  double total = 0;
  for (const auto& ed : at.edge_data()) {
    double mc = ed.child_mass, mp = 1.0 - mc;
    total += ed.len * (mp * std::pow(mc, beta) + mc * std::pow(mp, beta));
  }
  return total;
}

double tree_trim_length(const WeightedTree& t, double x) {
  AtomizedTree at(t);
  double total = 0;
  for (const auto& ed : at.edge_data()) {
    double mc = ed.child_mass, mp = 1.0 - mc;
    total += mp * std::clamp(ed.len + ed.ext_child - x, 0.0, ed.len);
    total += mc * std::clamp(ed.len + ed.ext_parent - x, 0.0, ed.len);
  }
  return total;
}

double tree_height_alpha(const WeightedTree& t, double alpha) {
  AtomizedTree at(t);
  double total = 0;
  double a1 = alpha + 1.0;
  for (const auto& ed : at.edge_data()) {
    double mc = ed.child_mass, mp = 1.0 - mc;
    total += mp * (std::pow(ed.len + ed.ext_child, a1) - std::pow(ed.ext_child, a1)) / a1;
    total += mc * (std::pow(ed.len + ed.ext_parent, a1) - std::pow(ed.ext_parent, a1)) / a1;
  }
  return total;
}

namespace {

// per-sample value of the estimated functional
double sample_value(const std::string& id, double param, const SamplerConfig& cfg, Rng& rng) {
  if (id == "excursion_max_tail") {
    Excursion e = sample_excursion(cfg, rng);
    return e.max_value() > param ? 1.0 : 0.0;
  }
  if (id == "straddle_height_tail") {
    ContourTree ct(sample_excursion(cfg, rng));
    return ct.gamma_height_tail_mass(param);
  }
  if (id == "straddle_length_tail") {
    ContourTree ct(sample_excursion(cfg, rng));
    return ct.gamma_length_tail_mass(param);
  }
  // the remaining targets live on the tree of the doubled path
  WeightedTree t = sample_crt(cfg, rng);
  if (id == "mass_tail_mean") return tree_mass_tail(t, param);
  if (id == "mass_beta_mean") return tree_mass_beta(t, param);
  if (id == "trim_length_mean") return tree_trim_length(t, param);
  if (id == "height_alpha_mean") return tree_height_alpha(t, param);
  throw std::invalid_argument("mc_estimate: unknown id " + id);
}

std::string param_name(const std::string& id) {
  if (id == "excursion_max_tail" || id == "straddle_height_tail" || id == "trim_length_mean")
    return "x";
  if (id == "straddle_length_tail" || id == "mass_tail_mean") return "p";
  if (id == "height_alpha_mean") return "alpha";
  if (id == "mass_beta_mean") return "beta";
  return "p0";
}

}  // namespace

EstimateReport mc_estimate(const std::string& id, double param, const SamplerConfig& cfg,
                           std::size_t n_samples, int threads) {
  if (n_samples < 2) throw std::invalid_argument("mc_estimate: need at least 2 samples");
  auto t0 = std::chrono::steady_clock::now();
  std::vector<double> values(n_samples, 0.0);
  auto worker = [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) {
      Rng rng(cfg.seed, i);  // replica stream i of the master seed
      values[i] = sample_value(id, param, cfg, rng);
    }
  };
  if (threads <= 1) {
    worker(0, n_samples);
  } else {
    std::vector<std::thread> pool;
    std::size_t chunk = (n_samples + threads - 1) / threads;
    for (int k = 0; k < threads; ++k) {
      std::size_t lo = k * chunk, hi = std::min(n_samples, lo + chunk);
      if (lo >= hi) break;
      pool.emplace_back(worker, lo, hi);
    }
    for (auto& th : pool) th.join();
  }
  MeanStderr ms = mean_stderr(values);
  EstimateReport r;
  r.id = id;
  r.params[param_name(id)] = param;
  r.estimate = ms.mean;
  r.std_error = ms.std_error;
  r.n_samples = n_samples;
  r.cfg = cfg;
  r.theory = closed_form(id, param);
  r.z_score = (r.estimate - r.theory) / r.std_error;
  r.pass = std::fabs(r.z_score) <= r.z_threshold;
  r.runtime_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

namespace {

nlohmann::ordered_json cfg_json(const SamplerConfig& cfg) {
  return {{"steps", cfg.steps},
          {"weight_grid", cfg.weight_grid},
          {"seed", cfg.seed},
          {"method", to_string(cfg.method)}};
}

}  // namespace

std::string EstimateReport::to_json(const std::string& meta_json) const {
  nlohmann::ordered_json j;
  if (!meta_json.empty()) j["meta"] = nlohmann::ordered_json::parse(meta_json);
  j["id"] = id;
  j["params"] = params;
  j["estimate"] = estimate;
  j["std_error"] = std_error;
  j["n_samples"] = n_samples;
  j["sampler"] = cfg_json(cfg);
  j["theory"] = theory;
  j["z_score"] = z_score;
  j["z_threshold"] = z_threshold;
  j["verdict"] = pass ? "pass" : "fail";
  return j.dump(2) + "\n";
}

DistributionReport distribution_test(const SamplerConfig& cfg, double p0,
                                     std::size_t n_qualifying) {
  if (n_qualifying < 500) throw std::invalid_argument("distribution_test: too few samples");
  std::vector<double> rho, u, emax, weight;
  std::size_t stream = 0;
  std::size_t attempts_limit = n_qualifying * 50;
  while (rho.size() < n_qualifying && stream < attempts_limit) {
    Rng rng(cfg.seed, stream++);
    Excursion e = sample_excursion(cfg, rng);
    ContourTree ct(e);
    double w = ct.gamma_length_tail_mass(p0);
    if (!(w > 0)) continue;
    GammaPoint gp = ct.sample_gamma_qualifying(p0, rng);
    auto [hat, check] = excise(e, gp);
    double r = hat.zeta();
    rho.push_back(r);
    u.push_back(gp.s_lo / check.zeta());
    emax.push_back(hat.max_value() / std::sqrt(r));  // unit-rescaled peak
    weight.push_back(w);
  }
  if (rho.size() < n_qualifying)
    throw std::runtime_error("distribution_test: could not collect qualifying samples");

  DistributionReport rep;
  rep.qualifying = rho.size();
  const double norm = 2.0 * std::sqrt((1.0 - p0) / p0);
  auto rho_cdf = [p0, norm](double r) {
    if (r <= p0) return 0.0;
    if (r >= 1) return 1.0;
    return (2.0 * std::sqrt((1.0 - p0) / p0) - 2.0 * std::sqrt((1.0 - r) / r)) / norm;
  };
  auto max_cdf = [](double x) {
    if (x <= 0) return 0.0;
    return 1.0 - closed_form("excursion_max_tail", x);
  };
  rep.p_rho = ks_test_weighted(rho, weight, rho_cdf).p_value;
  rep.p_u = ks_test_weighted(u, weight, [](double x) { return std::clamp(x, 0.0, 1.0); }).p_value;
  rep.p_independence = chi2_independence_p(rho, emax, weight, 4);
  rep.p_max = ks_test_weighted(emax, weight, max_cdf).p_value;

  // harness calibration: a shuffled partner must pass, a dependent one must fail
  {
    std::vector<double> shuffled = emax;
    Rng shuffle_rng(cfg.seed, attempts_limit + 1);
    for (std::size_t i = shuffled.size(); i > 1; --i)
      std::swap(shuffled[i - 1], shuffled[shuffle_rng.uniform_int(static_cast<int>(i))]);
    rep.control_shuffled_p = chi2_independence_p(rho, shuffled, weight, 4);
    std::vector<double> dependent(rho.size());
    for (std::size_t i = 0; i < rho.size(); ++i)
      dependent[i] = rho[i] + 0.01 * shuffled[i];
    rep.control_dependent_p = chi2_independence_p(rho, dependent, weight, 4);
  }
  return rep;
}

std::string DistributionReport::to_json(const std::string& meta_json) const {
  nlohmann::ordered_json j;
  if (!meta_json.empty()) j["meta"] = nlohmann::ordered_json::parse(meta_json);
  j["qualifying"] = qualifying;
  j["p_rho"] = p_rho;
  j["p_u"] = p_u;
  j["p_independence"] = p_independence;
  j["p_max"] = p_max;
  j["control_shuffled_p"] = control_shuffled_p;
  j["control_dependent_p"] = control_dependent_p;
  return j.dump(2) + "\n";
}

namespace {

// length of the longest component of {e > max(e)/2}
double largest_high_component(const Excursion& e) {
  const double a = e.max_value() / 2.0;
  const auto& t = e.times();
  const auto& v = e.values();
  auto cross = [&](std::size_t j) {
    return t[j] + (a - v[j]) * (t[j + 1] - t[j]) / (v[j + 1] - v[j]);
  };
  double best = 0, start = 0;
  bool inside = false;
  for (std::size_t j = 0; j + 1 < t.size(); ++j) {
    if (!inside && v[j + 1] > a) {
      start = (v[j] == a) ? t[j] : (v[j] < a ? cross(j) : t[j]);
      inside = true;
    }
    if (inside && v[j + 1] <= a) {
      double end = (v[j + 1] == a) ? t[j + 1] : cross(j);
      best = std::max(best, end - start);
      inside = false;
    }
  }
  return best;
}

}  // namespace

ExchangeabilityReport exchangeability_test(const SamplerConfig& cfg, double rho_min,
                                           std::size_t n_pairs) {
  std::vector<double> d_max(n_pairs), d_mean(n_pairs), d_exc(n_pairs);
  for (std::size_t i = 0; i < n_pairs; ++i) {
    Rng rng(cfg.seed, i);
    auto [first, second] = sample_symmetric_pair(cfg, rho_min, rng);
    d_max[i] = first.max_value() - second.max_value();
    WeightedTree t1 = tree_from_excursion(first, cfg.weight_grid);
    WeightedTree t2 = tree_from_excursion(second, cfg.weight_grid);
    d_mean[i] = mean_dist(t1) - mean_dist(t2);
    d_exc[i] = largest_high_component(first) - largest_high_component(second);
  }
  ExchangeabilityReport rep;
  rep.n_pairs = n_pairs;
  rep.p_max = sign_test_p(d_max);
  rep.p_mean_dist = sign_test_p(d_mean);
  rep.p_excursion = sign_test_p(d_exc);
  return rep;
}

std::string ExchangeabilityReport::to_json(const std::string& meta_json) const {
  nlohmann::ordered_json j;
  if (!meta_json.empty()) j["meta"] = nlohmann::ordered_json::parse(meta_json);
  j["n_pairs"] = n_pairs;
  j["p_max"] = p_max;
  j["p_mean_dist"] = p_mean_dist;
  j["p_excursion"] = p_excursion;
  return j.dump(2) + "\n";
}

}  // namespace sprtree
