#include "pif/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <string>
#include <thread>

#include "pif/errors.hpp"
#include "pif/text.hpp"

namespace pif {

SymmetricMatrix SymmetricMatrix::submatrix(const std::vector<std::size_t>& index) const {
  SymmetricMatrix out(index.size());
  for (std::size_t i = 0; i < index.size(); ++i) {
    for (std::size_t j = 0; j <= i; ++j) out.set(i, j, (*this)(index[i], index[j]));
  }
  return out;
}

double pif_distance(const StepFunction& f, const StepFunction& g, double p) {
  if (!(p >= 1.0) || !std::isfinite(p)) throw ArgumentError("exponent p must be a finite value >= 1");
  double sum = 0.0;
  if (p == 1.0) {
    merge_intervals(f, g, [&sum](double lo, double hi, double a, double b) { sum += std::abs(a - b) * (hi - lo); });
    return sum;
  }
  if (p == 2.0) {
    merge_intervals(f, g, [&sum](double lo, double hi, double a, double b) { sum += (a - b) * (a - b) * (hi - lo); });
    return std::sqrt(sum);
  }
  merge_intervals(f, g, [&sum, p](double lo, double hi, double a, double b) {
    sum += std::pow(std::abs(a - b), p) * (hi - lo);
  });
  return std::pow(sum, 1.0 / p);
}

namespace {

void check_kernel_exponent(double p) {
  if (p != 1.0 && p != 2.0) throw ArgumentError("kernel exponent must be 1 or 2");
}

}  // namespace

double pif_kernel(const PersistenceDiagram& a, const PersistenceDiagram& b, double p, const EssentialPolicy& policy) {
  check_kernel_exponent(p);
  return -pif_distance(to_pif(a, policy), to_pif(b, policy), p);
}

std::size_t default_worker_count() {
  return std::max(1u, std::thread::hardware_concurrency());
}

SymmetricMatrix pairwise_matrix(const std::vector<StepFunction>& pifs, double p, MatrixKind kind,
                                std::size_t workers) {
  if (pifs.empty()) throw ArgumentError("pairwise matrix of an empty corpus");
  if (kind == MatrixKind::Kernel) check_kernel_exponent(p);
  const std::size_t n = pifs.size();
  const double sign = kind == MatrixKind::Kernel ? -1.0 : 1.0;
  SymmetricMatrix m(n);
  // Rows are independent; each worker owns a fixed stride of rows.
  workers = std::max<std::size_t>(1, std::min(workers, n));
  auto fill_rows = [&](std::size_t first) {
    for (std::size_t i = first; i < n; i += workers) {
      for (std::size_t j = 0; j < i; ++j) m.set(i, j, sign * pif_distance(pifs[i], pifs[j], p));
    }
  };
  if (workers == 1) {
    fill_rows(0);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(fill_rows, w);
    for (auto& t : pool) t.join();
  }
  return m;
}

SymmetricMatrix pairwise_matrix(const std::vector<PersistenceDiagram>& corpus, double p, MatrixKind kind,
                                const EssentialPolicy& policy, std::size_t workers) {
  if (corpus.empty()) throw ArgumentError("pairwise matrix of an empty corpus");
  std::vector<StepFunction> pifs;
  pifs.reserve(corpus.size());
  for (const auto& d : corpus) pifs.push_back(to_pif(d, policy));
  return pairwise_matrix(pifs, p, kind, workers);
}

std::vector<std::size_t> solve_assignment(const std::vector<double>& cost, std::size_t n) {
  // Shortest augmenting path Hungarian method with potentials, O(n^3).
  // Rows and columns are 1-based internally; index 0 is a sentinel column.
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0);
  std::vector<double> v(n + 1, 0.0);
  std::vector<std::size_t> match(n + 1, 0);  // column -> row
  std::vector<std::size_t> way(n + 1, 0);
  for (std::size_t row = 1; row <= n; ++row) {
    match[0] = row;
    std::size_t col0 = 0;
    std::vector<double> min_v(n + 1, inf);
    std::vector<char> used(n + 1, 0);
    do {
      used[col0] = 1;
      const std::size_t r = match[col0];
      double delta = inf;
      std::size_t col1 = 0;
      for (std::size_t c = 1; c <= n; ++c) {
        if (used[c]) continue;
        const double cur = cost[(r - 1) * n + (c - 1)] - u[r] - v[c];
        if (cur < min_v[c]) {
          min_v[c] = cur;
          way[c] = col0;
        }
        if (min_v[c] < delta) {
          delta = min_v[c];
          col1 = c;
        }
      }
      for (std::size_t c = 0; c <= n; ++c) {
        if (used[c]) {
          u[match[c]] += delta;
          v[c] -= delta;
        } else {
          min_v[c] -= delta;
        }
      }
      col0 = col1;
    } while (match[col0] != 0);
    do {
      const std::size_t col1 = way[col0];
      match[col0] = match[col1];
      col0 = col1;
    } while (col0 != 0);
  }
  std::vector<std::size_t> assignment(n, 0);
  for (std::size_t c = 1; c <= n; ++c) assignment[match[c] - 1] = c - 1;
  return assignment;
}

double wasserstein_distance(const PersistenceDiagram& a, const PersistenceDiagram& b, double p) {
  if (!(p >= 1.0) || !std::isfinite(p)) throw ArgumentError("exponent p must be a finite value >= 1");
  if (a.has_essential() || b.has_essential()) {
    throw PreconditionError("Wasserstein distance needs finite diagrams");
  }
  const std::size_t na = a.size();
  const std::size_t nb = b.size();
  if (na + nb > kWassersteinBudget) {
    throw CapacityError("Wasserstein solver budget exceeded: " + std::to_string(na + nb) + " > " +
                        std::to_string(kWassersteinBudget) + " points");
  }
  const std::size_t n = na + nb;
  if (n == 0) return 0.0;
  auto powp = [p](double x) { return p == 1.0 ? x : (p == 2.0 ? x * x : std::pow(x, p)); };
  auto to_diagonal = [](const PersistencePair& q) { return (q.death - q.birth) / 2.0; };
  // Rows: points of a, then diagonal copies of b's points.
  // A point may only use its own diagonal copy; diagonal-diagonal links are free.
  const double forbidden = std::numeric_limits<double>::infinity();
  // Columns: points of b, then diagonal copies of a's points.
  std::vector<double> cost(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      double c = 0.0;
      if (i < na && j < nb) {
        const auto& x = a.pairs()[i];
        const auto& y = b.pairs()[j];
        c = powp(std::max(std::abs(x.birth - y.birth), std::abs(x.death - y.death)));
      } else if (i < na) {
        c = j - nb == i ? powp(to_diagonal(a.pairs()[i])) : forbidden;
      } else if (j < nb) {
        c = i - na == j ? powp(to_diagonal(b.pairs()[j])) : forbidden;
      }
      cost[i * n + j] = c;
    }
  }
  const auto assignment = solve_assignment(cost, n);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) total += cost[i * n + assignment[i]];
  if (p == 1.0) return total;
  if (p == 2.0) return std::sqrt(total);
  return std::pow(total, 1.0 / p);
}

void write_matrix(std::ostream& out, const SymmetricMatrix& m) {
  out << m.size() << '\n';
  for (std::size_t i = 0; i < m.size(); ++i) {
    for (std::size_t j = 0; j < m.size(); ++j) {
      if (j > 0) out << ' ';
      out << text::format_real(m(i, j));
    }
    out << '\n';
  }
}

void write_matrix_triplets(std::ostream& out, const SymmetricMatrix& m) {
  for (std::size_t i = 0; i < m.size(); ++i) {
    for (std::size_t j = 0; j < m.size(); ++j) out << i << ' ' << j << ' ' << text::format_real(m(i, j)) << '\n';
  }
}

SymmetricMatrix read_matrix(std::istream& in) {
  std::vector<std::pair<std::size_t, std::vector<std::string>>> lines;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto body = text::trim(line);
    if (body.empty() || body.front() == '#') continue;
    std::vector<std::string> fields;
    for (auto f : text::split_fields(body)) fields.emplace_back(f);
    lines.emplace_back(line_no, std::move(fields));
  }
  if (lines.empty()) throw ParseError("empty matrix input", line_no == 0 ? 1 : line_no);

  const double tol = 0.0;
  if (lines.front().second.size() == 3) {
    std::map<std::pair<std::size_t, std::size_t>, double> entries;
    std::size_t n = 0;
    for (const auto& [no, f] : lines) {
      if (f.size() != 3) throw ParseError("expected 'i j value'", no);
      const auto i = text::parse_integer(f[0], no);
      const auto j = text::parse_integer(f[1], no);
      if (i < 0 || j < 0) throw ParseError("matrix indices must be nonnegative", no);
      const double v = text::parse_real(f[2], no);
      entries[{static_cast<std::size_t>(i), static_cast<std::size_t>(j)}] = v;
      n = std::max(n, static_cast<std::size_t>(std::max(i, j)) + 1);
    }
    SymmetricMatrix m(n);
    for (const auto& [ij, v] : entries) {
      const auto [i, j] = ij;
      const auto mirror = entries.find({j, i});
      if (mirror != entries.end() && std::abs(mirror->second - v) > tol) {
        throw ValidationError("matrix is not symmetric at (" + std::to_string(i) + ", " + std::to_string(j) + ")");
      }
      m.set(i, j, v);
    }
    return m;
  }

  const auto& head = lines.front();
  if (head.second.size() != 1) throw ParseError("expected matrix size", head.first);
  const auto n_signed = text::parse_integer(head.second[0], head.first);
  if (n_signed < 0) throw ParseError("matrix size must be nonnegative", head.first);
  const auto n = static_cast<std::size_t>(n_signed);
  if (lines.size() != n + 1) {
    throw ParseError("expected " + std::to_string(n) + " matrix rows", lines.back().first);
  }
  std::vector<double> dense(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& [no, f] = lines[i + 1];
    if (f.size() != n) throw ParseError("expected " + std::to_string(n) + " values", no);
    for (std::size_t j = 0; j < n; ++j) dense[i * n + j] = text::parse_real(f[j], no);
  }
  SymmetricMatrix m(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      if (std::abs(dense[i * n + j] - dense[j * n + i]) > tol) {
        throw ValidationError("matrix is not symmetric at (" + std::to_string(i) + ", " + std::to_string(j) + ")",
                              lines[i + 1].first);
      }
      m.set(i, j, dense[i * n + j]);
    }
  }
  return m;
}

}  // namespace pif
