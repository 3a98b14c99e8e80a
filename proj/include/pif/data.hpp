#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "pif/homology.hpp"

namespace pif {

struct Sphere {
  double radius = 1.0;
};
struct Torus {
  double major = 1.0;  // distance from the centre of the tube to the centre of the torus
  double minor = 0.5;  // tube radius
};
struct Cube {
  double side = 1.0;
};
using Shape = std::variant<Sphere, Torus, Cube>;

struct SamplerSpec {
  Shape shape = Sphere{};
  std::size_t count = 100;
  std::uint64_t seed = 0;
};

/// Checks shape parameters (r > 0, R >= 0, side > 0, count >= 1); ArgumentError otherwise.
void validate(const SamplerSpec& spec);

/// Seeded samples: sphere via normalised Gaussians, torus via angle sampling
/// with area-proportional rejection, cube uniform in [0, side]^3.
std::vector<Point> sample(const SamplerSpec& spec);

/// Parses `shape:key=value,...`, e.g. `sphere:r=0.63,count=100,seed=3`,
/// `torus:R=2,r=1,count=50,seed=0`, `cube:side=1,count=100,seed=7`.
SamplerSpec parse_sampler_spec(std::string_view text);
std::string format_sampler_spec(const SamplerSpec& spec);

/// Fraction of torus angle proposals the rejection sampler accepts on average.
double torus_acceptance_rate(const Torus& t);

/// Sphere and torus parameters used by the sphere-vs-torus experiments.
///   "equal-volume": sphere r = 0.63 and a torus with tube/major ratio 2 scaled
///                   so that 4/3 pi r^3 = 2 pi^2 R r_t^2.
///   "paper-fig2":   sphere r = 0.63, torus R = 0.025, r = 0.05 as printed.
std::pair<Sphere, Torus> sphere_torus_preset(std::string_view name);

/// One point per line, whitespace-separated; dimension fixed by the first row.
std::vector<Point> read_point_cloud(std::istream& in);
void write_point_cloud(std::ostream& out, const std::vector<Point>& points);

struct LabeledGraph {
  Graph graph;
  int label = 0;
};

/// Graph-classification benchmark layout: `A.txt` (1-indexed `u, v` edges),
/// `graph_indicator.txt` (graph id per node line), `graph_labels.txt` (one
/// label per graph), optionally `edge_attributes.txt` (weight per edge line).
/// Dataset-prefixed names (`NAME_A.txt`, ...) are also recognised. Node ids are
/// remapped per graph to 0..n-1; reciprocal duplicates and self-loops are dropped.
/// Throws ValidationError naming the file and line for dangling references.
std::vector<LabeledGraph> load_graph_corpus(const std::filesystem::path& directory);

}  // namespace pif
