#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "pif/stepfn.hpp"

namespace pif {

/// Pointwise mean of one or more step functions.
StepFunction mean_pif(std::span<const StepFunction> fs);

/// Sample variance of the 1-norms around `y`: (1/(n-1)) sum (||f_j||_1 - y)^2.
double norm_variance(std::span<const StepFunction> fs, double y);

struct ZTestResult {
  double z = 0.0;
  double p_value = 1.0;  // two-sided
  bool reject = false;
  double critical = 0.0;  // upper critical value; the lower one is -critical
  double y1 = 0.0;
  double y2 = 0.0;
  double s1_sq = 0.0;
  double s2_sq = 0.0;
  std::size_t n = 0;
};

/// Two-sample z-test on the 1-norms of the mean PIFs of two equally sized samples.
ZTestResult two_sample_z_test(std::span<const StepFunction> fs1, std::span<const StepFunction> fs2, double alpha);

/// Same test from summary statistics.
ZTestResult z_test_from_summary(double y1, double s1_sq, double y2, double s2_sq, std::size_t n, double alpha);

/// Two-sided standard normal tail probability 2 * P(Z > |z|).
double two_sided_p_value(double z);
/// Upper quantile of the standard normal: x with P(Z > x) = q.
double normal_upper_quantile(double q);

/// Empirical quantile with linear interpolation between order statistics
/// (position q * (n - 1) in the sorted sample).
double empirical_quantile(std::vector<double> sample, double q);

using Statistic = std::function<double(std::span<const double>)>;
double sample_mean(std::span<const double> xs);

struct BootstrapOptions {
  std::size_t workers = 1;  // replicate-level threads; results do not depend on it
};

/// Percentile bootstrap interval (alpha and 1 - alpha quantiles of B replicates).
std::pair<double, double> bootstrap_percentile(std::span<const double> samples, std::size_t replicates, double alpha,
                                               std::uint64_t seed, const Statistic& statistic = sample_mean,
                                               const BootstrapOptions& options = {});

struct ConfidenceBand {
  StepFunction mean;
  StepFunction lower;
  StepFunction upper;
  double alpha = 0.0;
  double theta_hat = 0.0;  // (1 - alpha) quantile of sqrt(n) * sup |P*_n - P_n|
  std::size_t n = 0;

  /// True when lower(x) <= g(x) <= upper(x) for every x.
  bool contains(const StepFunction& g) const;
};

/// Bootstrap confidence band [P_n - theta/sqrt(n), P_n + theta/sqrt(n)] on the
/// support of the mean P_n.
ConfidenceBand confidence_band(std::span<const StepFunction> fs, std::size_t replicates, double alpha,
                               std::uint64_t seed, const BootstrapOptions& options = {});

}  // namespace pif
