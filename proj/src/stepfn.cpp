#include "pif/stepfn.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <string>

#include "pif/errors.hpp"
#include "pif/text.hpp"

namespace pif {

StepFunction::StepFunction(std::vector<double> breakpoints, std::vector<double> values)
    : breakpoints_(std::move(breakpoints)), values_(std::move(values)) {
  if (breakpoints_.empty() && values_.empty()) return;
  if (breakpoints_.size() != values_.size() + 1) {
    throw ArgumentError("step function needs exactly one value per interval");
  }
  for (std::size_t i = 0; i < breakpoints_.size(); ++i) {
    if (!std::isfinite(breakpoints_[i])) throw ArgumentError("step function breakpoints must be finite");
    if (i > 0 && !(breakpoints_[i - 1] < breakpoints_[i])) {
      throw ArgumentError("step function breakpoints must be strictly increasing");
    }
  }
  for (double v : values_) {
    if (!std::isfinite(v)) throw ArgumentError("step function values must be finite");
  }
  canonicalize();
}

StepFunction StepFunction::indicator(double lo, double hi, double value) {
  return StepFunction({lo, hi}, {value});
}

void StepFunction::canonicalize() {
  // Drop breakpoints between equal neighbours, then trim zero ends.
  std::size_t out = 0;
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (out > 0 && values_[out - 1] == values_[i]) continue;
    breakpoints_[out] = breakpoints_[i];
    values_[out] = values_[i];
    ++out;
  }
  if (out == 0) {
    breakpoints_.clear();
    values_.clear();
    return;
  }
  breakpoints_[out] = breakpoints_.back();
  breakpoints_.resize(out + 1);
  values_.resize(out);

  std::size_t first = 0;
  while (first < values_.size() && values_[first] == 0.0) ++first;
  std::size_t last = values_.size();
  while (last > first && values_[last - 1] == 0.0) --last;
  if (first == last) {
    breakpoints_.clear();
    values_.clear();
    return;
  }
  values_ = std::vector<double>(values_.begin() + static_cast<std::ptrdiff_t>(first),
                                values_.begin() + static_cast<std::ptrdiff_t>(last));
  breakpoints_ = std::vector<double>(breakpoints_.begin() + static_cast<std::ptrdiff_t>(first),
                                     breakpoints_.begin() + static_cast<std::ptrdiff_t>(last) + 1);
}

double StepFunction::operator()(double x) const {
  if (!std::isfinite(x)) throw ArgumentError("evaluation point must be finite");
  if (values_.empty() || x < breakpoints_.front() || x >= breakpoints_.back()) return 0.0;
  // First breakpoint strictly greater than x; the interval starts one before it.
  const auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), x);
  return values_[static_cast<std::size_t>(it - breakpoints_.begin()) - 1];
}

double evaluate(const StepFunction& f, double x) { return f(x); }

namespace {

template <typename Op>
StepFunction combine(const StepFunction& f, const StepFunction& g, Op op) {
  std::vector<double> xs;
  std::vector<double> vs;
  xs.reserve(f.breakpoints().size() + g.breakpoints().size());
  vs.reserve(xs.capacity());
  merge_intervals(f, g, [&](double lo, double hi, double a, double b) {
    if (xs.empty()) xs.push_back(lo);
    xs.push_back(hi);
    vs.push_back(op(a, b));
  });
  return StepFunction(std::move(xs), std::move(vs));
}

void require_exponent(double p) {
  if (!(p >= 1.0) || !std::isfinite(p)) throw ArgumentError("exponent p must be a finite value >= 1");
}

double pow_abs(double v, double p) {
  const double a = std::abs(v);
  if (p == 1.0) return a;
  if (p == 2.0) return a * a;
  return std::pow(a, p);
}

}  // namespace

StepFunction linear_combine(double a, const StepFunction& f, double b, const StepFunction& g) {
  if (!std::isfinite(a) || !std::isfinite(b)) throw ArgumentError("coefficients must be finite");
  return combine(f, g, [a, b](double x, double y) { return a * x + b * y; });
}

StepFunction abs_pow(const StepFunction& f, double p) {
  require_exponent(p);
  std::vector<double> xs(f.breakpoints().begin(), f.breakpoints().end());
  std::vector<double> vs;
  vs.reserve(f.values().size());
  for (double v : f.values()) vs.push_back(pow_abs(v, p));
  return StepFunction(std::move(xs), std::move(vs));
}

double integrate(const StepFunction& f) {
  const auto xs = f.breakpoints();
  const auto vs = f.values();
  double sum = 0.0;
  for (std::size_t i = 0; i < vs.size(); ++i) sum += vs[i] * (xs[i + 1] - xs[i]);
  return sum;
}

double lp_norm(const StepFunction& f, double p) {
  require_exponent(p);
  const auto xs = f.breakpoints();
  const auto vs = f.values();
  double sum = 0.0;
  for (std::size_t i = 0; i < vs.size(); ++i) sum += pow_abs(vs[i], p) * (xs[i + 1] - xs[i]);
  if (p == 1.0) return sum;
  if (p == 2.0) return std::sqrt(sum);
  return std::pow(sum, 1.0 / p);
}

double sup_abs_difference(const StepFunction& f, const StepFunction& g) {
  double best = 0.0;
  merge_intervals(f, g, [&best](double, double, double a, double b) { best = std::max(best, std::abs(a - b)); });
  return best;
}

StepFunction read_step_function(std::istream& in) {
  std::vector<double> xs;
  std::vector<double> vs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto body = text::trim(line);
    if (body.empty() || body.front() == '#') continue;
    const auto fields = text::split_fields(body);
    if (fields.size() != 2) throw ParseError("expected 'x value'", line_no);
    const double x = text::parse_real(fields[0], line_no);
    const double v = text::parse_real(fields[1], line_no);
    if (!std::isfinite(x) || !std::isfinite(v)) throw ParseError("step function entries must be finite", line_no);
    if (!xs.empty() && !(xs.back() < x)) throw ParseError("abscissae must be strictly increasing", line_no);
    xs.push_back(x);
    vs.push_back(v);
  }
  if (xs.size() < 2) return {};
  vs.pop_back();
  return StepFunction(std::move(xs), std::move(vs));
}

void write_step_function(std::ostream& out, const StepFunction& f) {
  const auto xs = f.breakpoints();
  const auto vs = f.values();
  for (std::size_t i = 0; i < xs.size(); ++i) {
    out << text::format_real(xs[i]) << ' ' << text::format_real(i < vs.size() ? vs[i] : 0.0) << '\n';
  }
}

}  // namespace pif
