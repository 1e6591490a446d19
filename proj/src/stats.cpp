#include "sprtree/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace sprtree {

double pairwise_sum(const std::vector<double>& xs) {
  std::function<double(std::size_t, std::size_t)> rec = [&](std::size_t lo, std::size_t hi) {
    if (hi - lo <= 8) {
      double s = 0;
      for (std::size_t i = lo; i < hi; ++i) s += xs[i];
      return s;
    }
    std::size_t mid = lo + (hi - lo) / 2;
    return rec(lo, mid) + rec(mid, hi);
  };
  return xs.empty() ? 0.0 : rec(0, xs.size());
}

MeanStderr mean_stderr(const std::vector<double>& xs) {
  MeanStderr r;
  r.n = xs.size();
  if (r.n == 0) return r;
  r.mean = pairwise_sum(xs) / static_cast<double>(r.n);
  if (r.n < 2) return r;
  std::vector<double> sq(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) sq[i] = (xs[i] - r.mean) * (xs[i] - r.mean);
  double var = pairwise_sum(sq) / static_cast<double>(r.n - 1);
  r.std_error = std::sqrt(var / static_cast<double>(r.n));
  return r;
}

double kolmogorov_q(double lambda) {
  if (lambda <= 0) return 1.0;
  double sum = 0;
  for (int k = 1; k <= 101; ++k) {
    double term = 2.0 * std::exp(-2.0 * k * k * lambda * lambda);
    if (k % 2 == 0) term = -term;
    sum += term;
    if (std::fabs(term) < 1e-16) break;
  }
  return std::clamp(sum, 0.0, 1.0);
}

namespace {

KsResult ks_impl(std::vector<double> values, std::vector<double> weights,
                 const std::function<double(double)>& cdf) {
  if (values.empty()) throw std::invalid_argument("ks: no samples");
  std::vector<std::size_t> idx(values.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return values[a] < values[b]; });
  double wsum = 0, wsq = 0;
  for (double w : weights) {
    wsum += w;
    wsq += w * w;
  }
  double d = 0;
  double acc = 0;
  for (std::size_t k = 0; k < idx.size(); ++k) {
    double x = values[idx[k]];
    double f = cdf(x);
    d = std::max(d, std::fabs(acc / wsum - f));
    acc += weights[idx[k]];
    d = std::max(d, std::fabs(acc / wsum - f));
  }
  KsResult r;
  r.statistic = d;
  r.n_effective = wsum * wsum / wsq;
  double sn = std::sqrt(r.n_effective);
  r.p_value = kolmogorov_q(d * (sn + 0.12 + 0.11 / sn));
  return r;
}

}  // namespace

KsResult ks_test(std::vector<double> values, const std::function<double(double)>& cdf) {
  std::vector<double> w(values.size(), 1.0);
  return ks_impl(std::move(values), std::move(w), cdf);
}

KsResult ks_test_weighted(std::vector<double> values, std::vector<double> weights,
                          const std::function<double(double)>& cdf) {
  if (values.size() != weights.size()) throw std::invalid_argument("ks: weight size mismatch");
  return ks_impl(std::move(values), std::move(weights), cdf);
}

double gamma_q(double a, double x) {
  if (x < 0 || a <= 0) throw std::domain_error("gamma_q: bad arguments");
  if (x == 0) return 1.0;
  if (x < a + 1.0) {
    // lower series
    double ap = a, sum = 1.0 / a, del = sum;
    for (int i = 0; i < 500; ++i) {
      ap += 1.0;
      del *= x / ap;
      sum += del;
      if (std::fabs(del) < std::fabs(sum) * 1e-16) break;
    }
    double p = sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
    return 1.0 - p;
  }
  // continued fraction (modified Lentz)
  double b = x + 1.0 - a, c = 1e300, d = 1.0 / b, h = d;
  for (int i = 1; i <= 500; ++i) {
    double an = -static_cast<double>(i) * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < 1e-300) d = 1e-300;
    c = b + an / c;
    if (std::fabs(c) < 1e-300) c = 1e-300;
    d = 1.0 / d;
    double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < 1e-16) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

double chi2_sf(double x, int dof) { return gamma_q(0.5 * dof, 0.5 * x); }

namespace {

std::vector<int> weighted_quantile_bins(const std::vector<double>& v,
                                        const std::vector<double>& w, int bins) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return v[a] < v[b]; });
  double total = 0;
  for (double x : w) total += x;
  std::vector<int> bin(v.size(), 0);
  double acc = 0;
  for (std::size_t k = 0; k < idx.size(); ++k) {
    int b = std::min(bins - 1, static_cast<int>(acc / total * bins));
    bin[idx[k]] = b;
    acc += w[idx[k]];
  }
  return bin;
}

}  // namespace

double chi2_independence_p(const std::vector<double>& a, const std::vector<double>& b,
                           const std::vector<double>& weights, int bins) {
  if (a.size() != b.size() || a.size() != weights.size())
    throw std::invalid_argument("chi2: size mismatch");
  auto ba = weighted_quantile_bins(a, weights, bins);
  auto bb = weighted_quantile_bins(b, weights, bins);
  std::vector<std::vector<double>> cell(bins, std::vector<double>(bins, 0.0));
  double total = 0, wsq = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    cell[ba[i]][bb[i]] += weights[i];
    total += weights[i];
    wsq += weights[i] * weights[i];
  }
  double neff = total * total / wsq;
  double chi2 = 0;
  for (int i = 0; i < bins; ++i) {
    double ri = 0;
    for (int j = 0; j < bins; ++j) ri += cell[i][j];
    for (int j = 0; j < bins; ++j) {
      double cj = 0;
      for (int k = 0; k < bins; ++k) cj += cell[k][j];
      double pij = cell[i][j] / total;
      double expected = (ri / total) * (cj / total);
      if (expected > 0) chi2 += neff * (pij - expected) * (pij - expected) / expected;
    }
  }
  return chi2_sf(chi2, (bins - 1) * (bins - 1));
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double sign_test_p(const std::vector<double>& diffs) {
  long pos = 0, neg = 0;
  for (double d : diffs) {
    if (d > 0) ++pos;
    if (d < 0) ++neg;
  }
  long n = pos + neg;
  if (n == 0) return 1.0;
  double z = (std::fabs(pos - 0.5 * n) - 0.5) / std::sqrt(0.25 * n);
  if (z < 0) z = 0;
  return std::clamp(2.0 * (1.0 - normal_cdf(z)), 0.0, 1.0);
}

}  // namespace sprtree
