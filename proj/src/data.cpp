#include "pif/data.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <numbers>
#include <ostream>
#include <set>

#include "pif/errors.hpp"
#include "pif/rng.hpp"
#include "pif/text.hpp"

namespace pif {

void validate(const SamplerSpec& spec) {
  if (spec.count < 1) throw ArgumentError("sample count must be at least 1");
  std::visit(
      [](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Sphere>) {
          if (!(s.radius > 0.0) || !std::isfinite(s.radius)) throw ArgumentError("sphere radius must be positive");
        } else if constexpr (std::is_same_v<T, Torus>) {
          if (!(s.minor > 0.0) || !std::isfinite(s.minor)) throw ArgumentError("torus tube radius must be positive");
          if (!(s.major >= 0.0) || !std::isfinite(s.major)) throw ArgumentError("torus major radius must be >= 0");
        } else {
          if (!(s.side > 0.0) || !std::isfinite(s.side)) throw ArgumentError("cube side must be positive");
        }
      },
      spec.shape);
}

std::vector<Point> sample(const SamplerSpec& spec) {
  validate(spec);
  CounterRng rng(spec.seed);
  std::vector<Point> out;
  out.reserve(spec.count);
  for (std::size_t i = 0; i < spec.count; ++i) {
    std::visit(
        [&](const auto& s) {
          using T = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<T, Sphere>) {
            double x, y, z, norm;
            do {
              x = rng.normal();
              y = rng.normal();
              z = rng.normal();
              norm = std::sqrt(x * x + y * y + z * z);
            } while (norm == 0.0);
            out.push_back({s.radius * x / norm, s.radius * y / norm, s.radius * z / norm});
          } else if constexpr (std::is_same_v<T, Torus>) {
            // theta runs around the tube; the area element is |R + r cos theta| r.
            const double bound = s.major + s.minor;
            double theta;
            while (true) {
              theta = rng.uniform(0.0, 2.0 * std::numbers::pi);
              if (rng.uniform() * bound < std::abs(s.major + s.minor * std::cos(theta))) break;
            }
            const double phi = rng.uniform(0.0, 2.0 * std::numbers::pi);
            const double ring = s.major + s.minor * std::cos(theta);
            out.push_back({ring * std::cos(phi), ring * std::sin(phi), s.minor * std::sin(theta)});
          } else {
            const double x = rng.uniform(0.0, s.side);
            const double y = rng.uniform(0.0, s.side);
            const double z = rng.uniform(0.0, s.side);
            out.push_back({x, y, z});
          }
        },
        spec.shape);
  }
  return out;
}

double torus_acceptance_rate(const Torus& t) {
  if (t.major >= t.minor) return t.major / (t.major + t.minor);
  // Spindle torus: mean of |R + r cos theta| / (R + r) over a uniform angle.
  const double theta0 = std::acos(-t.major / t.minor);
  const double integral = 2.0 * (t.major * (2.0 * theta0 - std::numbers::pi) + 2.0 * t.minor * std::sin(theta0));
  return integral / (2.0 * std::numbers::pi * (t.major + t.minor));
}

SamplerSpec parse_sampler_spec(std::string_view spec_text) {
  const auto colon = spec_text.find(':');
  const std::string shape(text::trim(spec_text.substr(0, colon)));
  std::map<std::string, std::string> kv;
  if (colon != std::string_view::npos) {
    std::string_view rest = spec_text.substr(colon + 1);
    while (!rest.empty()) {
      const auto comma = rest.find(',');
      const auto item = text::trim(rest.substr(0, comma));
      rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
      if (item.empty()) continue;
      const auto eq = item.find('=');
      if (eq == std::string_view::npos) throw ArgumentError("sampler option '" + std::string(item) + "' needs a value");
      kv[std::string(text::trim(item.substr(0, eq)))] = std::string(text::trim(item.substr(eq + 1)));
    }
  }
  auto take = [&](const std::string& key, double fallback) {
    const auto it = kv.find(key);
    if (it == kv.end()) return fallback;
    const double v = text::parse_real(it->second, 1);
    kv.erase(it);
    return v;
  };
  SamplerSpec spec;
  if (kv.count("count")) {
    spec.count = static_cast<std::size_t>(text::parse_integer(kv["count"], 1));
    kv.erase("count");
  }
  if (kv.count("seed")) {
    spec.seed = static_cast<std::uint64_t>(text::parse_integer(kv["seed"], 1));
    kv.erase("seed");
  }
  if (shape == "sphere") {
    spec.shape = Sphere{take("r", 1.0)};
  } else if (shape == "torus") {
    const double major = take("R", 1.0);
    spec.shape = Torus{major, take("r", 0.5)};
  } else if (shape == "cube") {
    spec.shape = Cube{take("side", 1.0)};
  } else {
    throw ArgumentError("unknown shape '" + shape + "' (expected sphere, torus, or cube)");
  }
  if (!kv.empty()) throw ArgumentError("unknown sampler option '" + kv.begin()->first + "'");
  validate(spec);
  return spec;
}

std::string format_sampler_spec(const SamplerSpec& spec) {
  std::string shape = std::visit(
      [](const auto& s) -> std::string {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Sphere>) {
          return "sphere:r=" + text::format_real(s.radius);
        } else if constexpr (std::is_same_v<T, Torus>) {
          return "torus:R=" + text::format_real(s.major) + ",r=" + text::format_real(s.minor);
        } else {
          return "cube:side=" + text::format_real(s.side);
        }
      },
      spec.shape);
  return shape + ",count=" + std::to_string(spec.count) + ",seed=" + std::to_string(spec.seed);
}

std::pair<Sphere, Torus> sphere_torus_preset(std::string_view name) {
  constexpr double sphere_radius = 0.63;
  if (name == "paper-fig2") return {Sphere{sphere_radius}, Torus{0.025, 0.05}};
  if (name == "equal-volume") {
    // Ring torus with R = 2 r_t: 2 pi^2 (2 r_t) r_t^2 = 4 pi^2 r_t^3.
    const double sphere_volume = 4.0 / 3.0 * std::numbers::pi * std::pow(sphere_radius, 3);
    const double tube = std::cbrt(sphere_volume / (4.0 * std::numbers::pi * std::numbers::pi));
    return {Sphere{sphere_radius}, Torus{2.0 * tube, tube}};
  }
  throw ArgumentError("unknown preset '" + std::string(name) + "' (expected equal-volume or paper-fig2)");
}

std::vector<Point> read_point_cloud(std::istream& in) {
  std::vector<Point> points;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto body = text::trim(line);
    if (body.empty() || body.front() == '#') continue;
    Point p;
    for (auto field : text::split_fields(body)) {
      const double v = text::parse_real(field, line_no);
      if (!std::isfinite(v)) throw ParseError("coordinates must be finite", line_no);
      p.push_back(v);
    }
    if (!points.empty() && p.size() != points.front().size()) {
      throw ParseError("expected " + std::to_string(points.front().size()) + " coordinates, got " +
                           std::to_string(p.size()),
                       line_no);
    }
    points.push_back(std::move(p));
  }
  return points;
}

void write_point_cloud(std::ostream& out, const std::vector<Point>& points) {
  for (const auto& p : points) {
    for (std::size_t k = 0; k < p.size(); ++k) {
      if (k > 0) out << ' ';
      out << text::format_real(p[k]);
    }
    out << '\n';
  }
}

namespace {

namespace fs = std::filesystem;

std::optional<fs::path> find_member(const fs::path& dir, std::string_view suffix) {
  if (fs::exists(dir / suffix)) return dir / suffix;
  std::vector<fs::path> hits;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const auto name = entry.path().filename().string();
    if (name.size() > suffix.size() + 1 && name.ends_with(std::string("_") + std::string(suffix))) {
      hits.push_back(entry.path());
    }
  }
  std::sort(hits.begin(), hits.end());
  if (hits.empty()) return std::nullopt;
  return hits.front();
}

fs::path require_member(const fs::path& dir, std::string_view suffix) {
  auto p = find_member(dir, suffix);
  if (!p) throw ValidationError("graph corpus in " + dir.string() + " lacks " + std::string(suffix));
  return *p;
}

// Non-blank, non-comment lines with line numbers.
std::vector<std::pair<std::size_t, std::vector<std::string>>> read_rows(const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw ValidationError("cannot open " + file.string());
  std::vector<std::pair<std::size_t, std::vector<std::string>>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto body = text::trim(line);
    if (body.empty() || body.front() == '#') continue;
    std::vector<std::string> fields;
    for (auto f : text::split_fields(body, true)) fields.emplace_back(f);
    rows.emplace_back(line_no, std::move(fields));
  }
  return rows;
}

[[noreturn]] void corpus_error(const fs::path& file, std::size_t line, const std::string& what) {
  throw ValidationError(file.filename().string() + ": " + what, line);
}

long long integer_field(const fs::path& file, std::size_t line, const std::string& field) {
  try {
    return text::parse_integer(field, line);
  } catch (const ParseError&) {
    corpus_error(file, line, "malformed integer '" + field + "'");
  }
}

}  // namespace

std::vector<LabeledGraph> load_graph_corpus(const fs::path& directory) {
  if (!fs::is_directory(directory)) throw ValidationError("graph corpus directory " + directory.string() + " not found");
  const auto a_file = require_member(directory, "A.txt");
  const auto indicator_file = require_member(directory, "graph_indicator.txt");
  const auto labels_file = require_member(directory, "graph_labels.txt");
  const auto weights_file = find_member(directory, "edge_attributes.txt");

  std::vector<int> labels;
  for (const auto& [line, fields] : read_rows(labels_file)) {
    if (fields.size() != 1) corpus_error(labels_file, line, "expected one label");
    labels.push_back(static_cast<int>(integer_field(labels_file, line, fields[0])));
  }
  const std::size_t graph_count = labels.size();

  // node (0-based global) -> (graph, local id)
  std::vector<std::size_t> graph_of;
  std::vector<std::size_t> local_of;
  std::vector<std::size_t> nodes_in(graph_count, 0);
  for (const auto& [line, fields] : read_rows(indicator_file)) {
    if (fields.size() != 1) corpus_error(indicator_file, line, "expected one graph id");
    const auto g = integer_field(indicator_file, line, fields[0]);
    if (g < 1 || static_cast<std::size_t>(g) > graph_count) {
      corpus_error(indicator_file, line, "graph id " + std::to_string(g) + " has no label in " +
                                             labels_file.filename().string());
    }
    const auto gi = static_cast<std::size_t>(g - 1);
    graph_of.push_back(gi);
    local_of.push_back(nodes_in[gi]++);
  }

  std::vector<double> weight_rows;
  if (weights_file) {
    for (const auto& [line, fields] : read_rows(*weights_file)) {
      if (fields.empty()) corpus_error(*weights_file, line, "expected an edge weight");
      try {
        weight_rows.push_back(text::parse_real(fields[0], line));
      } catch (const ParseError&) {
        corpus_error(*weights_file, line, "malformed weight '" + fields[0] + "'");
      }
    }
  }

  std::vector<std::vector<Graph::Edge>> edges(graph_count);
  std::vector<std::vector<double>> weights(graph_count);
  std::vector<std::set<Graph::Edge>> seen(graph_count);
  std::size_t edge_row = 0;
  const auto a_rows = read_rows(a_file);
  if (weights_file && weight_rows.size() != a_rows.size()) {
    throw ValidationError(weights_file->filename().string() + ": expected " + std::to_string(a_rows.size()) +
                          " weights, one per edge line");
  }
  for (const auto& [line, fields] : a_rows) {
    if (fields.size() != 2) corpus_error(a_file, line, "expected 'u, v'");
    const auto u = integer_field(a_file, line, fields[0]);
    const auto v = integer_field(a_file, line, fields[1]);
    for (auto node : {u, v}) {
      if (node < 1 || static_cast<std::size_t>(node) > graph_of.size()) {
        corpus_error(a_file, line, "node " + std::to_string(node) + " is not listed in " +
                                       indicator_file.filename().string());
      }
    }
    const auto gu = graph_of[static_cast<std::size_t>(u - 1)];
    const auto gv = graph_of[static_cast<std::size_t>(v - 1)];
    if (gu != gv) corpus_error(a_file, line, "edge joins nodes of different graphs");
    const std::size_t row = edge_row++;
    auto lu = local_of[static_cast<std::size_t>(u - 1)];
    auto lv = local_of[static_cast<std::size_t>(v - 1)];
    if (lu == lv) continue;
    if (lu > lv) std::swap(lu, lv);
    if (!seen[gu].insert({lu, lv}).second) continue;
    edges[gu].push_back({lu, lv});
    if (weights_file) weights[gu].push_back(weight_rows[row]);
  }

  std::vector<LabeledGraph> corpus;
  corpus.reserve(graph_count);
  for (std::size_t g = 0; g < graph_count; ++g) {
    std::optional<std::vector<double>> w;
    if (weights_file) w = std::move(weights[g]);
    corpus.push_back({Graph(nodes_in[g], std::move(edges[g]), std::move(w)), labels[g]});
  }
  return corpus;
}

}  // namespace pif
