#pragma once

#include <functional>
#include <vector>

namespace sprtree {

// numerically order-stabilized sum
double pairwise_sum(const std::vector<double>& xs);

struct MeanStderr {
  double mean = 0;
  double std_error = 0;
  std::size_t n = 0;
};

MeanStderr mean_stderr(const std::vector<double>& xs);

// complement of the Kolmogorov limit law, Q(lambda) = 2 sum (-1)^{k-1} e^{-2k^2 lambda^2}
double kolmogorov_q(double lambda);

struct KsResult {
  double statistic = 0;
  double p_value = 1;
  double n_effective = 0;
};

// one-sample KS against a cdf; weights optional (p-value via the effective
// sample size (sum w)^2 / sum w^2)
KsResult ks_test(std::vector<double> values, const std::function<double(double)>& cdf);
KsResult ks_test_weighted(std::vector<double> values, std::vector<double> weights,
                          const std::function<double(double)>& cdf);

// upper regularized incomplete gamma Q(a, x)
double gamma_q(double a, double x);

double chi2_sf(double x, int dof);

// independence test between two samples by binning each into `bins`
// weighted quantile cells
double chi2_independence_p(const std::vector<double>& a, const std::vector<double>& b,
                           const std::vector<double>& weights, int bins);

// two-sided sign test on paired differences; ties dropped
double sign_test_p(const std::vector<double>& diffs);

double normal_cdf(double x);

}  // namespace sprtree
