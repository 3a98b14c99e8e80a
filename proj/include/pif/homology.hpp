#pragma once

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "pif/diagram.hpp"

namespace pif {

using Point = std::vector<double>;
using VertexId = std::size_t;

struct Simplex {
  std::vector<VertexId> vertices;  // strictly increasing
  double value = 0.0;

  std::size_t dimension() const noexcept { return vertices.size() - 1; }
  friend bool operator==(const Simplex&, const Simplex&) = default;
};

/// Total order used for filtrations: value, then dimension, then vertex tuple.
bool filtration_less(const Simplex& a, const Simplex& b);

/// Simplices in a face-respecting order with non-decreasing values. Boundary
/// faces are resolved to filtration indices once, at construction.
class Filtration {
 public:
  Filtration() = default;

  /// Takes `simplices` in the given order. Throws ArgumentError if a simplex is
  /// malformed, a value decreases, or a face is missing or appears later.
  explicit Filtration(std::vector<Simplex> simplices);

  /// Sorts by `filtration_less` first, then validates as above.
  static Filtration sorted(std::vector<Simplex> simplices);

  const std::vector<Simplex>& simplices() const noexcept { return simplices_; }
  const Simplex& operator[](std::size_t i) const { return simplices_[i]; }
  std::size_t size() const noexcept { return simplices_.size(); }
  bool empty() const noexcept { return simplices_.empty(); }

  /// Filtration indices of the codimension-1 faces of simplex i, ascending.
  const std::vector<std::size_t>& boundary(std::size_t i) const { return boundaries_[i]; }

  /// Highest simplex dimension, or nullopt for an empty filtration.
  std::optional<std::size_t> max_dimension() const noexcept;
  std::size_t vertex_count() const noexcept { return vertex_count_; }
  std::size_t count_of_dimension(std::size_t dim) const;

 private:
  std::vector<Simplex> simplices_;
  std::vector<std::vector<std::size_t>> boundaries_;
  std::size_t vertex_count_ = 0;
};

/// Undirected simple graph with optional edge weights.
class Graph {
 public:
  using Edge = std::pair<VertexId, VertexId>;

  Graph() = default;
  /// Edges are stored with the smaller endpoint first. Throws ArgumentError on
  /// self-loops, duplicate edges, out-of-range ids, or a weight count mismatch.
  Graph(std::size_t vertex_count, std::vector<Edge> edges, std::optional<std::vector<double>> weights = std::nullopt);

  std::size_t vertex_count() const noexcept { return vertex_count_; }
  const std::vector<Edge>& edges() const noexcept { return edges_; }
  const std::optional<std::vector<double>>& weights() const noexcept { return weights_; }
  std::vector<std::size_t> degrees() const;

 private:
  std::size_t vertex_count_ = 0;
  std::vector<Edge> edges_;
  std::optional<std::vector<double>> weights_;
};

/// Vietoris-Rips filtration: all simplices up to `max_dim` whose pairwise
/// Euclidean distances are <= eps_max, valued by their diameter.
Filtration rips_filtration(const std::vector<Point>& points, double eps_max, std::size_t max_dim);

/// Vertex value = degree; edge value = max endpoint degree.
Filtration degree_filtration(const Graph& g);

/// Edge value = weight (or max_weight - weight when `invert`); vertex value =
/// min incident edge value, 0 for isolated vertices.
Filtration weight_filtration(const Graph& g, bool invert);

/// Simplex-level persistence pairing over Z/2.
struct PersistencePairing {
  struct Pair {
    std::size_t dimension;  // homology dimension of the class
    std::size_t birth;      // filtration index of the creator
    std::size_t death;      // filtration index of the destroyer
  };
  struct Essential {
    std::size_t dimension;
    std::size_t birth;
  };
  std::vector<Pair> pairs;
  std::vector<Essential> essential;
};

PersistencePairing compute_pairing(const Filtration& f, std::size_t max_hom_dim);

/// Diagrams for dimensions 0..max_hom_dim. Dimension 0 uses union-find with the
/// elder rule; higher dimensions use column reduction with clearing.
std::vector<PersistenceDiagram> compute_persistence(const Filtration& f, std::size_t max_hom_dim);

/// Brute-force Betti numbers of the subcomplex {value <= eps} by Gaussian
/// elimination of the Z/2 boundary matrices.
std::vector<std::size_t> betti_numbers(const Filtration& f, double eps, std::size_t max_hom_dim);

}  // namespace pif
