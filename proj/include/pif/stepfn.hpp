#pragma once

#include <iosfwd>
#include <span>
#include <vector>

namespace pif {

/// Piecewise-constant function of one real variable in canonical form.
///
/// The function equals `values()[i]` on the half-open interval
/// `[breakpoints()[i], breakpoints()[i+1])` and 0 outside
/// `[breakpoints().front(), breakpoints().back())`. Canonical form means no two
/// adjacent intervals carry the same value and neither end interval carries 0,
/// so two functions are equal iff their representations are equal.
class StepFunction {
 public:
  StepFunction() = default;

  /// Builds from `breakpoints` (strictly increasing, finite) and one value per
  /// interval. Throws ArgumentError on malformed input; the result is canonicalized.
  StepFunction(std::vector<double> breakpoints, std::vector<double> values);

  /// Indicator of [lo, hi) scaled by `value`.
  static StepFunction indicator(double lo, double hi, double value = 1.0);

  std::span<const double> breakpoints() const noexcept { return breakpoints_; }
  std::span<const double> values() const noexcept { return values_; }
  std::size_t interval_count() const noexcept { return values_.size(); }
  bool empty() const noexcept { return values_.empty(); }

  /// Right-continuous evaluation. Throws ArgumentError for non-finite x.
  double operator()(double x) const;

  friend bool operator==(const StepFunction&, const StepFunction&) = default;

 private:
  void canonicalize();

  std::vector<double> breakpoints_;
  std::vector<double> values_;
};

double evaluate(const StepFunction& f, double x);

/// a*f + b*g in one merge over the union of breakpoints.
StepFunction linear_combine(double a, const StepFunction& f, double b, const StepFunction& g);

/// |f|^p intervalwise, p >= 1.
StepFunction abs_pow(const StepFunction& f, double p);

double integrate(const StepFunction& f);

/// (integral of |f|^p)^(1/p), p >= 1.
double lp_norm(const StepFunction& f, double p);

/// max |f - g| over the real line.
double sup_abs_difference(const StepFunction& f, const StepFunction& g);

/// Visits the merged partition of f and g: `visit(lo, hi, f_value, g_value)`
/// is called for each interval of the union breakpoint set covering
/// [min start, max end). Linear in the total breakpoint count.
template <typename Visit>
void merge_intervals(const StepFunction& f, const StepFunction& g, Visit&& visit) {
  const auto fx = f.breakpoints();
  const auto gx = g.breakpoints();
  const auto fv = f.values();
  const auto gv = g.values();
  std::size_t i = 0;  // next unread breakpoint of f
  std::size_t j = 0;
  double f_cur = 0.0;
  double g_cur = 0.0;
  bool started = false;
  double lo = 0.0;
  while (i < fx.size() || j < gx.size()) {
    double x;
    if (j >= gx.size() || (i < fx.size() && fx[i] < gx[j])) {
      x = fx[i];
    } else {
      x = gx[j];
    }
    if (started && x > lo) visit(lo, x, f_cur, g_cur);
    if (i < fx.size() && fx[i] == x) {
      f_cur = i < fv.size() ? fv[i] : 0.0;
      ++i;
    }
    if (j < gx.size() && gx[j] == x) {
      g_cur = j < gv.size() ? gv[j] : 0.0;
      ++j;
    }
    lo = x;
    started = true;
  }
}

/// Text format: one `x value` pair per line, ascending x; the value holds on
/// [x_i, x_{i+1}); the last line's value is written as 0 and ignored on read.
/// `#` lines are comments.
StepFunction read_step_function(std::istream& in);
void write_step_function(std::ostream& out, const StepFunction& f);

}  // namespace pif
