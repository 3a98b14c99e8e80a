#include "pif/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>

#include <boost/math/distributions/normal.hpp>

#include "pif/errors.hpp"
#include "pif/rng.hpp"

namespace pif {

namespace {

// Union of all breakpoints; every input is constant on each cell [grid[k], grid[k+1]).
std::vector<double> union_grid(std::span<const StepFunction> fs) {
  std::vector<double> grid;
  for (const auto& f : fs) grid.insert(grid.end(), f.breakpoints().begin(), f.breakpoints().end());
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

// Values of f on the cells of `grid` (which must contain f's breakpoints).
void sample_on_grid(const StepFunction& f, const std::vector<double>& grid, double* out) {
  const auto xs = f.breakpoints();
  const auto vs = f.values();
  const std::size_t cells = grid.empty() ? 0 : grid.size() - 1;
  std::fill(out, out + cells, 0.0);
  if (vs.empty()) return;
  std::size_t k = static_cast<std::size_t>(std::lower_bound(grid.begin(), grid.end(), xs.front()) - grid.begin());
  for (std::size_t i = 0; i < vs.size(); ++i) {
    while (k < cells && grid[k] < xs[i + 1]) out[k++] = vs[i];
  }
}

template <typename Body>
void parallel_for(std::size_t count, std::size_t workers, Body body) {
  workers = std::max<std::size_t>(1, std::min(workers, count));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([=, &body] {
      for (std::size_t i = w; i < count; i += workers) body(i);
    });
  }
  for (auto& t : pool) t.join();
}

void check_alpha(double alpha, double upper) {
  if (!(alpha > 0.0 && alpha < upper)) throw ArgumentError("alpha out of range");
}

}  // namespace

StepFunction mean_pif(std::span<const StepFunction> fs) {
  if (fs.empty()) throw ArgumentError("mean of an empty sample");
  const auto grid = union_grid(fs);
  if (grid.size() < 2) return {};
  const std::size_t cells = grid.size() - 1;
  std::vector<double> sum(cells, 0.0);
  std::vector<double> row(cells);
  for (const auto& f : fs) {
    sample_on_grid(f, grid, row.data());
    for (std::size_t k = 0; k < cells; ++k) sum[k] += row[k];
  }
  const double n = static_cast<double>(fs.size());
  for (double& v : sum) v /= n;
  return StepFunction(grid, std::move(sum));
}

double norm_variance(std::span<const StepFunction> fs, double y) {
  if (fs.size() < 2) throw ArgumentError("variance needs at least two samples");
  double acc = 0.0;
  for (const auto& f : fs) {
    const double d = lp_norm(f, 1.0) - y;
    acc += d * d;
  }
  return acc / static_cast<double>(fs.size() - 1);
}

double two_sided_p_value(double z) {
  if (std::isnan(z)) return std::numeric_limits<double>::quiet_NaN();
  return std::erfc(std::abs(z) / std::sqrt(2.0));
}

double normal_upper_quantile(double q) {
  if (!(q > 0.0 && q < 1.0)) throw ArgumentError("quantile level must lie in (0, 1)");
  const boost::math::normal_distribution<double> standard;
  return boost::math::quantile(boost::math::complement(standard, q));
}

ZTestResult z_test_from_summary(double y1, double s1_sq, double y2, double s2_sq, std::size_t n, double alpha) {
  check_alpha(alpha, 1.0);
  if (n < 2) throw ArgumentError("z-test needs at least two samples per group");
  ZTestResult r;
  r.y1 = y1;
  r.y2 = y2;
  r.s1_sq = s1_sq;
  r.s2_sq = s2_sq;
  r.n = n;
  r.critical = normal_upper_quantile(alpha / 2.0);
  const double nn = static_cast<double>(n);
  const double se = std::sqrt(s1_sq / nn + s2_sq / nn);
  const double diff = y1 - y2;
  if (se == 0.0) {
    r.z = diff == 0.0 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), diff);
    r.p_value = diff == 0.0 ? 1.0 : 0.0;
  } else {
    r.z = diff / se;
    r.p_value = two_sided_p_value(r.z);
  }
  r.reject = std::abs(r.z) > r.critical;
  return r;
}

ZTestResult two_sample_z_test(std::span<const StepFunction> fs1, std::span<const StepFunction> fs2, double alpha) {
  if (fs1.size() != fs2.size()) throw ArgumentError("z-test samples must have equal size");
  if (fs1.size() < 2) throw ArgumentError("z-test needs at least two samples per group");
  const double y1 = lp_norm(mean_pif(fs1), 1.0);
  const double y2 = lp_norm(mean_pif(fs2), 1.0);
  return z_test_from_summary(y1, norm_variance(fs1, y1), y2, norm_variance(fs2, y2), fs1.size(), alpha);
}

double empirical_quantile(std::vector<double> sample, double q) {
  if (sample.empty()) throw ArgumentError("quantile of an empty sample");
  if (!(q >= 0.0 && q <= 1.0)) throw ArgumentError("quantile level must lie in [0, 1]");
  std::sort(sample.begin(), sample.end());
  const double pos = q * static_cast<double>(sample.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sample.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  if (frac == 0.0) return sample[lo];
  return sample[lo] + frac * (sample[hi] - sample[lo]);
}

double sample_mean(std::span<const double> xs) {
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

std::pair<double, double> bootstrap_percentile(std::span<const double> samples, std::size_t replicates, double alpha,
                                               std::uint64_t seed, const Statistic& statistic,
                                               const BootstrapOptions& options) {
  if (samples.empty()) throw ArgumentError("bootstrap of an empty sample");
  if (replicates < 100) throw ArgumentError("bootstrap needs at least 100 replicates");
  check_alpha(alpha, 0.5);
  const std::size_t n = samples.size();
  std::vector<double> stats(replicates);
  parallel_for(replicates, options.workers, [&](std::size_t b) {
    CounterRng rng(seed, b);
    std::vector<double> resample(n);
    for (auto& x : resample) x = samples[rng.below(n)];
    stats[b] = statistic(resample);
  });
  return {empirical_quantile(stats, alpha), empirical_quantile(stats, 1.0 - alpha)};
}

bool ConfidenceBand::contains(const StepFunction& g) const {
  bool ok = true;
  merge_intervals(lower, g, [&ok](double, double, double l, double v) { ok = ok && l <= v; });
  merge_intervals(g, upper, [&ok](double, double, double v, double u) { ok = ok && v <= u; });
  return ok;
}

ConfidenceBand confidence_band(std::span<const StepFunction> fs, std::size_t replicates, double alpha,
                               std::uint64_t seed, const BootstrapOptions& options) {
  if (fs.size() < 2) throw ArgumentError("confidence band needs at least two functions");
  if (replicates < 100) throw ArgumentError("bootstrap needs at least 100 replicates");
  check_alpha(alpha, 1.0);
  const std::size_t n = fs.size();

  ConfidenceBand band;
  band.alpha = alpha;
  band.n = n;
  band.mean = mean_pif(fs);
  const auto grid = union_grid(fs);
  if (grid.size() < 2) {
    return band;
  }
  const std::size_t cells = grid.size() - 1;
  std::vector<double> dense(n * cells);
  for (std::size_t j = 0; j < n; ++j) sample_on_grid(fs[j], grid, dense.data() + j * cells);
  std::vector<double> center(cells);
  sample_on_grid(band.mean, grid, center.data());

  const double root_n = std::sqrt(static_cast<double>(n));
  std::vector<double> theta(replicates);
  parallel_for(replicates, options.workers, [&](std::size_t b) {
    CounterRng rng(seed, b);
    std::vector<std::size_t> counts(n, 0);
    for (std::size_t k = 0; k < n; ++k) ++counts[rng.below(n)];
    std::vector<double> acc(cells, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      if (counts[j] == 0) continue;
      const double c = static_cast<double>(counts[j]);
      const double* row = dense.data() + j * cells;
      for (std::size_t k = 0; k < cells; ++k) acc[k] += c * row[k];
    }
    double sup = 0.0;
    for (std::size_t k = 0; k < cells; ++k) {
      sup = std::max(sup, std::abs(acc[k] / static_cast<double>(n) - center[k]));
    }
    theta[b] = root_n * sup;
  });
  band.theta_hat = empirical_quantile(theta, 1.0 - alpha);

  const double half_width = band.theta_hat / root_n;
  std::vector<double> lo(cells);
  std::vector<double> hi(cells);
  for (std::size_t k = 0; k < cells; ++k) {
    lo[k] = center[k] - half_width;
    hi[k] = center[k] + half_width;
  }
  band.lower = StepFunction(grid, std::move(lo));
  band.upper = StepFunction(grid, std::move(hi));
  return band;
}

}  // namespace pif
