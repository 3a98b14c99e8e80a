#include "pif/homology.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <unordered_map>

#include "pif/errors.hpp"

namespace pif {

namespace {

struct VertexTupleHash {
  std::size_t operator()(const std::vector<VertexId>& v) const noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (auto x : v) {
      h ^= static_cast<std::uint64_t>(x) + 0x9E3779B97F4A7C15ULL + (h << 6) + (h >> 2);
    }
    return static_cast<std::size_t>(h);
  }
};

}  // namespace

bool filtration_less(const Simplex& a, const Simplex& b) {
  if (a.value != b.value) return a.value < b.value;
  if (a.vertices.size() != b.vertices.size()) return a.vertices.size() < b.vertices.size();
  return a.vertices < b.vertices;
}

Filtration::Filtration(std::vector<Simplex> simplices) : simplices_(std::move(simplices)) {
  std::unordered_map<std::vector<VertexId>, std::size_t, VertexTupleHash> index;
  index.reserve(simplices_.size());
  boundaries_.resize(simplices_.size());
  for (std::size_t i = 0; i < simplices_.size(); ++i) {
    const auto& s = simplices_[i];
    if (s.vertices.empty()) throw ArgumentError("simplex " + std::to_string(i) + " has no vertices");
    if (!std::isfinite(s.value)) throw ArgumentError("simplex " + std::to_string(i) + " has a non-finite value");
    for (std::size_t k = 1; k < s.vertices.size(); ++k) {
      if (!(s.vertices[k - 1] < s.vertices[k])) {
        throw ArgumentError("simplex " + std::to_string(i) + " vertices must be strictly increasing");
      }
    }
    if (i > 0 && s.value < simplices_[i - 1].value) {
      throw ArgumentError("filtration values decrease at position " + std::to_string(i));
    }
    if (s.vertices.size() > 1) {
      auto& faces = boundaries_[i];
      faces.reserve(s.vertices.size());
      std::vector<VertexId> face(s.vertices.size() - 1);
      for (std::size_t skip = 0; skip < s.vertices.size(); ++skip) {
        std::size_t w = 0;
        for (std::size_t k = 0; k < s.vertices.size(); ++k) {
          if (k != skip) face[w++] = s.vertices[k];
        }
        const auto it = index.find(face);
        if (it == index.end()) {
          throw ArgumentError("simplex " + std::to_string(i) + " appears before one of its faces");
        }
        faces.push_back(it->second);
      }
      std::sort(faces.begin(), faces.end());
    } else {
      vertex_count_ = std::max(vertex_count_, s.vertices[0] + 1);
    }
    if (!index.emplace(s.vertices, i).second) {
      throw ArgumentError("simplex " + std::to_string(i) + " is duplicated");
    }
  }
}

Filtration Filtration::sorted(std::vector<Simplex> simplices) {
  std::sort(simplices.begin(), simplices.end(), filtration_less);
  return Filtration(std::move(simplices));
}

std::optional<std::size_t> Filtration::max_dimension() const noexcept {
  if (simplices_.empty()) return std::nullopt;
  std::size_t d = 0;
  for (const auto& s : simplices_) d = std::max(d, s.dimension());
  return d;
}

std::size_t Filtration::count_of_dimension(std::size_t dim) const {
  return static_cast<std::size_t>(std::count_if(simplices_.begin(), simplices_.end(),
                                                [dim](const Simplex& s) { return s.dimension() == dim; }));
}

Graph::Graph(std::size_t vertex_count, std::vector<Edge> edges, std::optional<std::vector<double>> weights)
    : vertex_count_(vertex_count), edges_(std::move(edges)), weights_(std::move(weights)) {
  if (weights_ && weights_->size() != edges_.size()) throw ArgumentError("one weight per edge required");
  if (weights_) {
    for (double w : *weights_) {
      if (!std::isfinite(w)) throw ArgumentError("edge weights must be finite");
    }
  }
  for (auto& [u, v] : edges_) {
    if (u >= vertex_count_ || v >= vertex_count_) throw ArgumentError("edge endpoint out of range");
    if (u == v) throw ArgumentError("self-loops are not allowed");
    if (u > v) std::swap(u, v);
  }
  auto sorted = edges_;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw ArgumentError("duplicate edge");
  }
}

std::vector<std::size_t> Graph::degrees() const {
  std::vector<std::size_t> deg(vertex_count_, 0);
  for (const auto& [u, v] : edges_) {
    ++deg[u];
    ++deg[v];
  }
  return deg;
}

Filtration rips_filtration(const std::vector<Point>& points, double eps_max, std::size_t max_dim) {
  if (!(eps_max > 0.0) || !std::isfinite(eps_max)) throw ArgumentError("eps_max must be positive and finite");
  if (max_dim > 3) throw ArgumentError("max_dim must be at most 3");
  const std::size_t n = points.size();
  if (n == 0) return Filtration();
  const std::size_t ambient = points[0].size();
  for (const auto& p : points) {
    if (p.size() != ambient) throw ArgumentError("points have inconsistent dimensions");
    for (double c : p) {
      if (!std::isfinite(c)) throw ArgumentError("point coordinates must be finite");
    }
  }

  std::vector<double> dist(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < ambient; ++k) {
        const double d = points[i][k] - points[j][k];
        s += d * d;
      }
      dist[i * n + j] = dist[j * n + i] = std::sqrt(s);
    }
  }
  std::vector<std::vector<VertexId>> higher_neighbours(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (dist[i * n + j] <= eps_max) higher_neighbours[i].push_back(j);
    }
  }

  std::vector<Simplex> simplices;
  std::vector<VertexId> current;
  // Depth-first clique expansion; `candidates` are common higher neighbours.
  auto expand = [&](auto&& self, double value, const std::vector<VertexId>& candidates) -> void {
    simplices.push_back({current, value});
    if (current.size() > max_dim) return;
    for (std::size_t c = 0; c < candidates.size(); ++c) {
      const VertexId v = candidates[c];
      double next_value = value;
      for (VertexId u : current) next_value = std::max(next_value, dist[u * n + v]);
      std::vector<VertexId> next;
      if (current.size() < max_dim) {
        for (std::size_t k = c + 1; k < candidates.size(); ++k) {
          if (dist[v * n + candidates[k]] <= eps_max) next.push_back(candidates[k]);
        }
      }
      current.push_back(v);
      self(self, next_value, next);
      current.pop_back();
    }
  };
  for (VertexId i = 0; i < n; ++i) {
    current.assign(1, i);
    expand(expand, 0.0, max_dim > 0 ? higher_neighbours[i] : std::vector<VertexId>{});
  }
  return Filtration::sorted(std::move(simplices));
}

Filtration degree_filtration(const Graph& g) {
  const auto deg = g.degrees();
  std::vector<Simplex> simplices;
  simplices.reserve(g.vertex_count() + g.edges().size());
  for (VertexId v = 0; v < g.vertex_count(); ++v) simplices.push_back({{v}, static_cast<double>(deg[v])});
  for (const auto& [u, v] : g.edges()) {
    simplices.push_back({{u, v}, static_cast<double>(std::max(deg[u], deg[v]))});
  }
  return Filtration::sorted(std::move(simplices));
}

Filtration weight_filtration(const Graph& g, bool invert) {
  if (!g.weights()) throw ArgumentError("weight filtration needs edge weights");
  const auto& w = *g.weights();
  const double max_w = w.empty() ? 0.0 : *std::max_element(w.begin(), w.end());
  std::vector<double> vertex_value(g.vertex_count(), kInfinity);
  std::vector<Simplex> simplices;
  simplices.reserve(g.vertex_count() + g.edges().size());
  for (std::size_t e = 0; e < g.edges().size(); ++e) {
    const auto [u, v] = g.edges()[e];
    const double value = invert ? max_w - w[e] : w[e];
    vertex_value[u] = std::min(vertex_value[u], value);
    vertex_value[v] = std::min(vertex_value[v], value);
    simplices.push_back({{u, v}, value});
  }
  for (VertexId v = 0; v < g.vertex_count(); ++v) {
    simplices.push_back({{v}, std::isinf(vertex_value[v]) ? 0.0 : vertex_value[v]});
  }
  return Filtration::sorted(std::move(simplices));
}

namespace {

constexpr std::size_t kNone = static_cast<std::size_t>(-1);

// Symmetric difference of two ascending index lists, written into `out`.
void add_columns(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b,
                 std::vector<std::size_t>& out) {
  out.clear();
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] < b[j]) {
      out.push_back(a[i++]);
    } else if (b[j] < a[i]) {
      out.push_back(b[j++]);
    } else {
      ++i;
      ++j;
    }
  }
  out.insert(out.end(), a.begin() + static_cast<std::ptrdiff_t>(i), a.end());
  out.insert(out.end(), b.begin() + static_cast<std::ptrdiff_t>(j), b.end());
}

std::size_t find_root(std::vector<std::size_t>& parent, std::size_t x) {
  while (parent[x] != x) {
    parent[x] = parent[parent[x]];
    x = parent[x];
  }
  return x;
}

}  // namespace

PersistencePairing compute_pairing(const Filtration& f, std::size_t max_hom_dim) {
  PersistencePairing result;
  const std::size_t n = f.size();
  if (n == 0) return result;
  const std::size_t top = *f.max_dimension();

  // Dimension 0: union-find over vertex ids; each root remembers the
  // filtration index of its oldest vertex.
  std::vector<std::size_t> simplex_of_vertex(f.vertex_count(), kNone);
  std::vector<std::size_t> parent(f.vertex_count());
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  std::vector<std::size_t> oldest(f.vertex_count(), kNone);
  std::vector<char> positive(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& s = f[i];
    if (s.dimension() == 0) {
      simplex_of_vertex[s.vertices[0]] = i;
      oldest[s.vertices[0]] = i;
      positive[i] = 1;
    } else if (s.dimension() == 1) {
      const std::size_t ru = find_root(parent, s.vertices[0]);
      const std::size_t rv = find_root(parent, s.vertices[1]);
      if (ru == rv) {
        positive[i] = 1;
        continue;
      }
      // Elder rule: the component born later dies at this edge.
      const bool u_older = oldest[ru] < oldest[rv];
      const std::size_t survivor = u_older ? ru : rv;
      const std::size_t victim = u_older ? rv : ru;
      result.pairs.push_back({0, oldest[victim], i});
      parent[victim] = survivor;
    }
  }
  for (std::size_t v = 0; v < f.vertex_count(); ++v) {
    if (simplex_of_vertex[v] != kNone && find_root(parent, v) == v) {
      result.essential.push_back({0, oldest[v]});
    }
  }
  if (max_hom_dim == 0) return result;

  // Higher dimensions: reduce columns from the top dimension down so that
  // pivots found in dimension d+1 clear their own columns in dimension d.
  std::vector<std::size_t> pivot_owner(n, kNone);
  std::vector<char> killed(n, 0);
  std::vector<std::vector<std::size_t>> reduced(n);
  std::vector<std::size_t> scratch;
  const std::size_t highest_column_dim = std::min(top, max_hom_dim + 1);
  for (std::size_t d = highest_column_dim; d >= 2; --d) {
    for (std::size_t j = 0; j < n; ++j) {
      if (f[j].dimension() != d) continue;
      if (killed[j]) {
        positive[j] = 1;
        continue;
      }
      std::vector<std::size_t> col = f.boundary(j);
      while (!col.empty()) {
        const std::size_t owner = pivot_owner[col.back()];
        if (owner == kNone) break;
        add_columns(col, reduced[owner], scratch);
        col.swap(scratch);
      }
      if (col.empty()) {
        positive[j] = 1;
      } else {
        const std::size_t low = col.back();
        pivot_owner[low] = j;
        killed[low] = 1;
        result.pairs.push_back({d - 1, low, j});
        reduced[j] = std::move(col);
      }
    }
  }
  // Essential classes in dimensions 1..max_hom_dim: positive and never killed.
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t d = f[i].dimension();
    if (d >= 1 && d <= max_hom_dim && positive[i] && !killed[i]) result.essential.push_back({d, i});
  }
  return result;
}

std::vector<PersistenceDiagram> compute_persistence(const Filtration& f, std::size_t max_hom_dim) {
  const auto pairing = compute_pairing(f, max_hom_dim);
  std::vector<std::vector<PersistencePair>> pairs(max_hom_dim + 1);
  for (const auto& p : pairing.pairs) {
    if (p.dimension <= max_hom_dim) pairs[p.dimension].push_back({f[p.birth].value, f[p.death].value});
  }
  for (const auto& e : pairing.essential) {
    if (e.dimension <= max_hom_dim) pairs[e.dimension].push_back({f[e.birth].value, kInfinity});
  }
  std::vector<PersistenceDiagram> out;
  out.reserve(max_hom_dim + 1);
  for (std::size_t d = 0; d <= max_hom_dim; ++d) {
    std::sort(pairs[d].begin(), pairs[d].end());
    out.emplace_back(d, std::move(pairs[d]));
  }
  return out;
}

namespace {

// Rank over Z/2 of a dense matrix given as bit rows, by forward elimination
// on the leading set bit of each row.
std::size_t z2_rank(std::vector<std::vector<std::uint64_t>> rows) {
  std::size_t rank = 0;
  if (rows.empty()) return 0;
  const std::size_t words = rows[0].size();
  for (std::size_t w = 0; w < words; ++w) {
    for (int bit = 0; bit < 64; ++bit) {
      const std::uint64_t mask = std::uint64_t{1} << bit;
      std::size_t pivot = rank;
      while (pivot < rows.size() && !(rows[pivot][w] & mask)) ++pivot;
      if (pivot == rows.size()) continue;
      std::swap(rows[rank], rows[pivot]);
      for (std::size_t r = rank + 1; r < rows.size(); ++r) {
        if (rows[r][w] & mask) {
          for (std::size_t k = w; k < words; ++k) rows[r][k] ^= rows[rank][k];
        }
      }
      ++rank;
    }
  }
  return rank;
}

}  // namespace

std::vector<std::size_t> betti_numbers(const Filtration& f, double eps, std::size_t max_hom_dim) {
  std::vector<std::size_t> betti(max_hom_dim + 1, 0);
  // Local index of each included simplex within its dimension.
  std::vector<std::size_t> local(f.size(), kNone);
  std::vector<std::vector<std::size_t>> by_dim(max_hom_dim + 2);
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (f[i].value > eps) continue;
    const std::size_t d = f[i].dimension();
    if (d > max_hom_dim + 1) continue;
    local[i] = by_dim[d].size();
    by_dim[d].push_back(i);
  }
  // rank of the boundary map from dimension d to d-1, for d = 1..max_hom_dim+1
  std::vector<std::size_t> rank(max_hom_dim + 2, 0);
  for (std::size_t d = 1; d <= max_hom_dim + 1; ++d) {
    const std::size_t cols = by_dim[d].size();
    const std::size_t words = (cols + 63) / 64;
    if (cols == 0 || by_dim[d - 1].empty()) continue;
    std::vector<std::vector<std::uint64_t>> rows(by_dim[d - 1].size(), std::vector<std::uint64_t>(words, 0));
    for (std::size_t c = 0; c < cols; ++c) {
      for (std::size_t face : f.boundary(by_dim[d][c])) {
        rows[local[face]][c / 64] |= std::uint64_t{1} << (c % 64);
      }
    }
    rank[d] = z2_rank(std::move(rows));
  }
  for (std::size_t p = 0; p <= max_hom_dim; ++p) {
    betti[p] = by_dim[p].size() - (p > 0 ? rank[p] : 0) - rank[p + 1];
  }
  return betti;
}

}  // namespace pif
