#include "sprtree/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sprtree {

SamplerMethod method_from_string(const std::string& s) {
  if (s == "dyck") return SamplerMethod::dyck;
  if (s == "bridge-vervaat") return SamplerMethod::bridge_vervaat;
  throw std::invalid_argument("unknown sampler method: " + s);
}

std::string to_string(SamplerMethod m) {
  return m == SamplerMethod::dyck ? "dyck" : "bridge-vervaat";
}

namespace {

Excursion dyck_excursion(int n, Rng& rng) {
  // Uniform strictly positive lattice excursion of 2n steps. A uniform
  // arrangement of n-1 up and n down steps has exactly one cyclic rotation
  // whose walk stays nonnegative until the final step (rotate just past the
  // first minimum of the prefix sums); lifting that walk by one unit and
  // closing the ends gives the excursion, with equal fiber sizes so the
  // output is exactly uniform.
  const int L = 2 * n - 1;
  std::vector<signed char> steps(L);
  {
    int ups = n - 1, downs = n;
    for (int i = 0; i < L; ++i) {
      int remaining = ups + downs;
      bool up = rng.uniform01() * remaining < ups;
      steps[i] = up ? 1 : -1;
      if (up) {
        --ups;
      } else {
        --downs;
      }
    }
  }
  int w = 0, minw = 0, argmin = 0;
  for (int i = 1; i <= L; ++i) {
    w += steps[i - 1];
    if (w < minw) {
      minw = w;
      argmin = i;
    }
  }
  const double scale = 1.0 / std::sqrt(2.0 * n);
  std::vector<double> t(2 * n + 1), v(2 * n + 1);
  t[0] = 0.0;
  v[0] = 0.0;
  int r = 0;
  for (int i = 1; i < 2 * n; ++i) {
    t[i] = static_cast<double>(i) / (2 * n);
    v[i] = (1 + r) * scale;
    r += steps[(argmin + i - 1) % L];
  }
  t[2 * n] = 1.0;
  v[2 * n] = 0.0;
  return Excursion(std::move(t), std::move(v));
}

Excursion bridge_vervaat_excursion(int n, Rng& rng) {
  for (int attempt = 0; attempt < 64; ++attempt) {
    int steps = 2 * n;
    std::vector<double> w(steps + 1, 0.0);
    double scale = 1.0 / std::sqrt(static_cast<double>(steps));
    for (int i = 1; i <= steps; ++i) w[i] = w[i - 1] + rng.normal() * scale;
    // bridge, then rotate at the argmin
    std::vector<double> b(steps + 1);
    for (int i = 0; i <= steps; ++i)
      b[i] = w[i] - (static_cast<double>(i) / steps) * w[steps];
    int argmin = 0;
    for (int i = 1; i < steps; ++i)
      if (b[i] < b[argmin]) argmin = i;
    std::vector<double> t(steps + 1), v(steps + 1);
    bool ok = true;
    for (int i = 0; i <= steps; ++i) {
      t[i] = static_cast<double>(i) / steps;
      v[i] = b[(argmin + i) % steps] - b[argmin];
      if (i > 0 && i < steps && v[i] <= 0.0) ok = false;
    }
    v[0] = 0.0;
    v[steps] = 0.0;
    if (!ok) continue;  // interior tie with the minimum; vanishing probability
    return Excursion(std::move(t), std::move(v));
  }
  throw std::runtime_error("bridge_vervaat: could not produce a positive path");
}

}  // namespace

Excursion sample_excursion(const SamplerConfig& cfg, Rng& rng) {
  if (cfg.steps < 1) throw std::invalid_argument("sample_excursion: steps must be >= 1");
  switch (cfg.method) {
    case SamplerMethod::dyck:
      return dyck_excursion(cfg.steps, rng);
    case SamplerMethod::bridge_vervaat:
      return bridge_vervaat_excursion(cfg.steps, rng);
  }
  throw std::logic_error("sample_excursion: unreachable");
}

WeightedTree sample_crt(const SamplerConfig& cfg, Rng& rng) {
  Excursion e = sample_excursion(cfg, rng);
  return tree_from_excursion(scale_heights(e, 2.0), cfg.weight_grid);
}

GammaPoint sample_gamma_point(const Excursion& e, Rng& rng) {
  ContourTree ct(e);
  return ct.sample_gamma(rng);
}

Decomposition decompose(const Excursion& e, const GammaPoint& gp) {
  if (std::fabs(e.zeta() - 1.0) > 1e-9)
    throw std::domain_error("decompose: excursion must have unit length");
  auto [hat, check] = excise(e, gp);
  Decomposition d;
  d.rho = hat.zeta();
  d.hat_unit = rescale(hat, 1.0 / hat.zeta());
  d.check_unit = rescale(check, 1.0 / check.zeta());
  d.u = gp.s_lo / check.zeta();
  return d;
}

Excursion reassemble(const Decomposition& d) {
  return insert(d.hat_unit, d.check_unit, d.u, d.rho);
}

double sample_rho(double rho_min, Rng& rng) {
  if (!(rho_min > 0 && rho_min < 1)) throw std::invalid_argument("sample_rho: rho_min outside (0,1)");
  // integral of the density from p to 1 is 2 sqrt((1-p)/p); invert the
  // truncated CDF in closed form
  double y0 = std::sqrt((1.0 - rho_min) / rho_min);
  double y = (1.0 - rng.uniform01()) * y0;
  return 1.0 / (1.0 + y * y);
}

std::pair<Excursion, Excursion> sample_symmetric_pair(const SamplerConfig& cfg, double rho_min,
                                                      Rng& rng) {
  Excursion piece = sample_excursion(cfg, rng);
  Excursion host = sample_excursion(cfg, rng);
  double u = rng.uniform01();
  double v = rng.uniform01();
  double rho = sample_rho(rho_min, rng);
  return {insert(piece, host, u, rho), insert(piece, host, v, rho)};
}

}  // namespace sprtree
