#pragma once

#include <cstddef>
#include <iosfwd>
#include <vector>

#include "pif/diagram.hpp"
#include "pif/stepfn.hpp"

namespace pif {

/// Dense symmetric matrix stored as a row-major lower triangle.
class SymmetricMatrix {
 public:
  SymmetricMatrix() = default;
  explicit SymmetricMatrix(std::size_t n, double fill = 0.0) : n_(n), data_(n * (n + 1) / 2, fill) {}

  std::size_t size() const noexcept { return n_; }
  double operator()(std::size_t i, std::size_t j) const { return data_[offset(i, j)]; }
  void set(std::size_t i, std::size_t j, double value) { data_[offset(i, j)] = value; }

  /// Principal submatrix on `index` (rows and columns in the given order).
  SymmetricMatrix submatrix(const std::vector<std::size_t>& index) const;

  friend bool operator==(const SymmetricMatrix&, const SymmetricMatrix&) = default;

 private:
  std::size_t offset(std::size_t i, std::size_t j) const noexcept {
    if (i < j) std::swap(i, j);
    return i * (i + 1) / 2 + j;
  }
  std::size_t n_ = 0;
  std::vector<double> data_;
};

/// (integral |f - g|^p)^(1/p), single merge pass. p >= 1.
double pif_distance(const StepFunction& f, const StepFunction& g, double p);

/// -pif_distance of the two PIFs, p in {1, 2}.
double pif_kernel(const PersistenceDiagram& a, const PersistenceDiagram& b, double p, const EssentialPolicy& policy);

enum class MatrixKind { Distance, Kernel };

std::size_t default_worker_count();

/// Pairwise distance or kernel matrix; PIFs are built once per diagram.
SymmetricMatrix pairwise_matrix(const std::vector<PersistenceDiagram>& corpus, double p, MatrixKind kind,
                                const EssentialPolicy& policy, std::size_t workers = 1);
SymmetricMatrix pairwise_matrix(const std::vector<StepFunction>& pifs, double p, MatrixKind kind,
                                std::size_t workers = 1);

/// Largest combined diagram size the exact Wasserstein solver accepts.
inline constexpr std::size_t kWassersteinBudget = 512;

/// Exact p-Wasserstein distance with L-infinity ground metric and diagonal
/// matching, via the Hungarian algorithm on the augmented bipartite graph.
/// Throws CapacityError when |a| + |b| exceeds the budget, PreconditionError
/// on essential pairs.
double wasserstein_distance(const PersistenceDiagram& a, const PersistenceDiagram& b, double p);

/// Minimum-cost perfect assignment on a square cost matrix (row-major).
/// Returns the column assigned to each row.
std::vector<std::size_t> solve_assignment(const std::vector<double>& cost, std::size_t n);

/// Dense text form: `n`, then n rows of n values (17 significant digits).
void write_matrix(std::ostream& out, const SymmetricMatrix& m);
/// Triplet text form: `i j value` per line, 0-indexed, every ordered pair.
void write_matrix_triplets(std::ostream& out, const SymmetricMatrix& m);
/// Reads either form; detects triplets by a first line with three fields.
/// Throws ParseError on malformed input, ValidationError if not symmetric.
SymmetricMatrix read_matrix(std::istream& in);

}  // namespace pif
