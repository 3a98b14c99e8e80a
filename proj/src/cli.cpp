#include "pif/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include "pif/analysis.hpp"
#include "pif/data.hpp"
#include "pif/diagram.hpp"
#include "pif/errors.hpp"
#include "pif/experiments.hpp"
#include "pif/homology.hpp"
#include "pif/learn.hpp"
#include "pif/stats.hpp"
#include "pif/stepfn.hpp"
#include "pif/text.hpp"

namespace pif::cli {

namespace {

namespace fs = std::filesystem;

class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

std::ifstream open_input(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path.string());
  return in;
}

// Files named directly, plus every regular file of each named directory in name order.
std::vector<fs::path> expand_inputs(const std::vector<std::string>& inputs) {
  std::vector<fs::path> out;
  for (const auto& name : inputs) {
    const fs::path p(name);
    if (fs::is_directory(p)) {
      std::vector<fs::path> files;
      for (const auto& e : fs::directory_iterator(p)) {
        if (e.is_regular_file()) files.push_back(e.path());
      }
      std::sort(files.begin(), files.end());
      out.insert(out.end(), files.begin(), files.end());
    } else {
      out.push_back(p);
    }
  }
  if (out.empty()) throw UsageError("no input files");
  return out;
}

// Errors from a reader are prefixed with the offending file name.
template <typename Read>
auto read_file(const fs::path& path, Read read) {
  auto in = open_input(path);
  try {
    return read(in);
  } catch (const ParseError& e) {
    throw ValidationError(path.string() + ": " + e.what());
  } catch (const ValidationError& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

StepFunction load_pif(const fs::path& path) {
  return read_file(path, [](std::istream& in) { return read_step_function(in); });
}

std::vector<StepFunction> load_pifs(const std::vector<std::string>& inputs) {
  std::vector<StepFunction> fs;
  for (const auto& p : expand_inputs(inputs)) fs.push_back(load_pif(p));
  return fs;
}

// A file with a single block yields that block unless a different dimension
// is requested; otherwise the block of the requested dimension (empty if absent).
PersistenceDiagram load_diagram(const fs::path& path, std::optional<std::size_t> dim) {
  const auto ds = read_file(path, [](std::istream& in) { return read_diagrams(in); });
  if (!dim) {
    if (ds.size() == 1) return ds.front();
    if (ds.empty()) return PersistenceDiagram(0);
    throw UsageError(path.string() + " holds several dimensions; choose one with --dim");
  }
  for (const auto& d : ds) {
    if (d.dimension() == *dim) return d;
  }
  return PersistenceDiagram(*dim);
}

EssentialPolicy parse_policy(const std::string& text) {
  if (text == "drop") return EssentialPolicy::drop();
  if (text.rfind("truncate=", 0) == 0) return EssentialPolicy::truncate_at(text::parse_real(text.substr(9), 1));
  throw UsageError("--essential expects drop or truncate=T, got '" + text + "'");
}

CvScheme parse_scheme(const std::string& text, std::size_t folds) {
  if (text == "kfold") return KFold{folds, true};
  if (text == "loo") return LeaveOneOut{};
  if (text.rfind("lpo=", 0) == 0) {
    const auto p = text::parse_integer(text.substr(4), 1);
    if (p < 1) throw UsageError("lpo=P needs P >= 1");
    return LeavePOut{static_cast<std::size_t>(p)};
  }
  if (text.rfind("split=", 0) == 0) return HoldoutSplit{text::parse_real(text.substr(6), 1)};
  throw UsageError("--scheme expects kfold, loo, lpo=P or split=F, got '" + text + "'");
}

using Emit = std::function<void(std::ostream&)>;

// Writes to `path` atomically, or to `out` when no path was given.
void emit_to(const std::string& path, std::ostream& out, const Emit& emit) {
  if (path.empty() || path == "-") {
    emit(out);
  } else {
    text::write_atomically(path, emit);
  }
}

void add_output(CLI::App* cmd, std::string& target, bool required) {
  auto* opt = cmd->add_option("--out,-o", target, "output file (standard output when omitted)");
  if (required) opt->required();
}

struct Settings {
  std::vector<std::string> inputs;
  std::string a_dir;
  std::string b_dir;
  std::string out;
  std::string spec;
  std::string matrix;
  std::string labels;
  std::string predictions;
  std::string graph;
  std::string filtration = "degree";
  std::string essential = "drop";
  std::string scheme = "kfold";
  std::string name;
  std::string out_dir;
  std::string data_dir;
  std::string preset = "equal-volume";
  double p = 1.0;
  double alpha = 0.05;
  double eps_max = 0.0;
  std::size_t max_dim = 1;
  std::size_t bootstrap = 1000;
  std::size_t folds = 5;
  std::size_t inner_folds = 3;
  std::size_t components = 2;
  std::size_t points = 100;
  std::size_t workers = 0;
  std::optional<std::size_t> dim;
  std::uint64_t seed = 0;
  std::vector<double> c_grid = kDefaultCGrid;
  bool triplets = false;
};

SymmetricMatrix load_matrix(const std::string& path) {
  return read_file(path, [](std::istream& in) { return read_matrix(in); });
}

std::vector<int> load_labels(const std::string& path) {
  return read_file(path, [](std::istream& in) {
    std::vector<int> labels;
    std::string line;
    std::size_t no = 0;
    while (std::getline(in, line)) {
      ++no;
      const auto body = text::trim(line);
      if (body.empty() || body.front() == '#') continue;
      labels.push_back(static_cast<int>(text::parse_integer(body, no)));
    }
    return labels;
  });
}

Graph load_edge_list(const std::string& path, bool weighted) {
  return read_file(path, [&](std::istream& in) {
    std::vector<Graph::Edge> edges;
    std::vector<double> weights;
    std::size_t n = 0;
    std::string line;
    std::size_t no = 0;
    while (std::getline(in, line)) {
      ++no;
      const auto body = text::trim(line);
      if (body.empty() || body.front() == '#') continue;
      const auto f = text::split_fields(body, true);
      if (f.size() != 3 && (weighted || f.size() != 2)) {
        throw ParseError(weighted ? "expected 'u v weight'" : "expected 'u v'", no);
      }
      const auto u = text::parse_integer(f[0], no);
      const auto v = text::parse_integer(f[1], no);
      if (u < 0 || v < 0) throw ParseError("vertex ids must be nonnegative", no);
      edges.emplace_back(static_cast<std::size_t>(u), static_cast<std::size_t>(v));
      n = std::max({n, static_cast<std::size_t>(u) + 1, static_cast<std::size_t>(v) + 1});
      if (weighted) weights.push_back(text::parse_real(f[2], no));
    }
    return weighted ? Graph(n, edges, weights) : Graph(n, edges);
  });
}

void write_report(const experiments::Report& r, const std::string& path, std::ostream& out) {
  emit_to(path, out, [&](std::ostream& o) { r.write(o); });
}

// ---------------------------------------------------------------------------

int run_sample(const Settings& s, std::ostream& out) {
  const auto points = sample(parse_sampler_spec(s.spec));
  emit_to(s.out, out, [&](std::ostream& o) { write_point_cloud(o, points); });
  return 0;
}

int run_ph(const Settings& s, std::ostream& out) {
  std::vector<PersistenceDiagram> ds;
  if (!s.graph.empty()) {
    if (s.max_dim > 1) throw UsageError("graph filtrations carry homology up to dimension 1");
    if (s.filtration != "degree" && s.filtration != "weight" && s.filtration != "weight-inverted") {
      throw UsageError("--filtration expects degree, weight or weight-inverted");
    }
    const Graph g = load_edge_list(s.graph, s.filtration != "degree");
    const auto f = s.filtration == "degree" ? degree_filtration(g) : weight_filtration(g, s.filtration != "weight");
    ds = compute_persistence(f, s.max_dim);
  } else {
    if (s.inputs.size() != 1) throw UsageError("ph needs exactly one --in point cloud or a --graph");
    if (s.max_dim > 2) throw UsageError("--max-dim is at most 2");
    if (!(s.eps_max > 0)) throw UsageError("ph needs --eps-max > 0 for point clouds");
    const auto points = read_file(s.inputs[0], [](std::istream& in) { return read_point_cloud(in); });
    ds = experiments::cloud_persistence(points, s.eps_max, s.max_dim);
  }
  emit_to(s.out, out, [&](std::ostream& o) { write_diagrams(o, ds); });
  return 0;
}

int run_pif(const Settings& s, std::ostream& out) {
  if (s.inputs.size() != 1) throw UsageError("pif needs exactly one --in diagram file");
  const auto f = to_pif(load_diagram(s.inputs[0], s.dim), parse_policy(s.essential));
  emit_to(s.out, out, [&](std::ostream& o) { write_step_function(o, f); });
  return 0;
}

int run_norm(const Settings& s, std::ostream& out) {
  const auto files = expand_inputs(s.inputs);
  experiments::Report r;
  for (const auto& f : files) r.add(files.size() == 1 ? std::string("norm") : f.string(), lp_norm(load_pif(f), s.p));
  write_report(r, s.out, out);
  return 0;
}

int run_mean(const Settings& s, std::ostream& out) {
  const auto m = mean_pif(load_pifs(s.inputs));
  emit_to(s.out, out, [&](std::ostream& o) { write_step_function(o, m); });
  return 0;
}

int run_band(const Settings& s, std::ostream& out) {
  const auto fs = load_pifs(s.inputs);
  const auto band = confidence_band(fs, s.bootstrap, s.alpha, s.seed, {s.workers ? s.workers : default_worker_count()});
  emit_to(s.out, out, [&](std::ostream& o) {
    o << "# mean, lower, upper; theta_hat " << text::format_real(band.theta_hat) << '\n';
    write_step_function(o, band.mean);
    o << "\n\n";
    write_step_function(o, band.lower);
    o << "\n\n";
    write_step_function(o, band.upper);
  });
  return 0;
}

int run_ztest(const Settings& s, std::ostream& out) {
  const auto a = load_pifs({s.a_dir});
  const auto b = load_pifs({s.b_dir});
  const auto z = two_sample_z_test(a, b, s.alpha);
  experiments::Report r;
  r.add("n", z.n);
  r.add("alpha", s.alpha);
  r.add("Y1", z.y1);
  r.add("Y2", z.y2);
  r.add("s1_sq", z.s1_sq);
  r.add("s2_sq", z.s2_sq);
  r.add("z", z.z);
  r.add("p_value", z.p_value);
  r.add("critical", z.critical);
  r.add("reject", std::string(z.reject ? "true" : "false"));
  write_report(r, s.out, out);
  return 0;
}

std::vector<PersistenceDiagram> load_corpus(const Settings& s) {
  std::vector<PersistenceDiagram> ds;
  for (const auto& f : expand_inputs(s.inputs)) ds.push_back(load_diagram(f, s.dim));
  return ds;
}

void emit_matrix(const Settings& s, const SymmetricMatrix& m, std::ostream& out) {
  emit_to(s.out, out, [&](std::ostream& o) { s.triplets ? write_matrix_triplets(o, m) : write_matrix(o, m); });
}

int run_matrix(const Settings& s, std::ostream& out, MatrixKind kind) {
  const auto m = pairwise_matrix(load_corpus(s), s.p, kind, parse_policy(s.essential),
                                 s.workers ? s.workers : default_worker_count());
  emit_matrix(s, m, out);
  return 0;
}

int run_wasserstein(const Settings& s, std::ostream& out) {
  const auto policy = parse_policy(s.essential);
  std::vector<PersistenceDiagram> ds;
  for (const auto& d : load_corpus(s)) ds.push_back(apply_policy(d, policy));
  SymmetricMatrix m(ds.size());
  for (std::size_t i = 0; i < ds.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) m.set(i, j, wasserstein_distance(ds[i], ds[j], s.p));
  }
  emit_matrix(s, m, out);
  return 0;
}

int run_kpca(const Settings& s, std::ostream& out) {
  const auto e = kernel_pca(load_matrix(s.matrix), s.components);
  emit_to(s.out, out, [&](std::ostream& o) {
    for (const auto& row : e) {
      for (std::size_t c = 0; c < row.size(); ++c) o << (c ? " " : "") << text::format_real(row[c]);
      o << '\n';
    }
  });
  return 0;
}

int run_svm_cv(const Settings& s, std::ostream& out) {
  const auto k = load_matrix(s.matrix);
  const auto labels = load_labels(s.labels);
  if (labels.size() != k.size()) {
    throw ValidationError(s.labels + ": expected " + std::to_string(k.size()) + " labels, got " +
                          std::to_string(labels.size()));
  }
  CvOptions opt;
  opt.inner_folds = s.inner_folds;
  const auto cv = cross_validate(k, labels, parse_scheme(s.scheme, s.folds), s.c_grid, s.seed, opt);
  experiments::Report r;
  r.add("scheme", s.scheme);
  r.add("accuracy", cv.accuracy);
  r.add("folds_evaluated", cv.per_fold.size());
  r.add("folds_skipped", cv.skipped.size());
  std::ostringstream per_fold;
  std::ostringstream chosen;
  for (std::size_t i = 0; i < cv.per_fold.size(); ++i) {
    per_fold << (i ? "," : "") << text::format_real(cv.per_fold[i]);
    chosen << (i ? "," : "") << text::format_real(cv.chosen_c[i]);
  }
  r.add("per_fold", per_fold.str());
  r.add("chosen_c", chosen.str());
  if (!s.predictions.empty()) {
    text::write_atomically(s.predictions, [&](std::ostream& o) {
      for (const auto& p : cv.predictions) o << p.index << ' ' << text::format_real(p.score) << ' ' << p.label << '\n';
    });
  }
  write_report(r, s.out, out);
  return 0;
}

int run_pr(const Settings& s, std::ostream& out) {
  if (s.inputs.size() != 1) throw UsageError("pr needs exactly one --in file of 'score label' lines");
  std::vector<double> scores;
  std::vector<int> labels;
  read_file(s.inputs[0], [&](std::istream& in) {
    std::string line;
    std::size_t no = 0;
    while (std::getline(in, line)) {
      ++no;
      const auto body = text::trim(line);
      if (body.empty() || body.front() == '#') continue;
      const auto f = text::split_fields(body);
      // Accepts `score label` or the `index score label` form written by svm-cv.
      if (f.size() != 2 && f.size() != 3) throw ParseError("expected 'score label'", no);
      scores.push_back(text::parse_real(f[f.size() - 2], no));
      const auto l = text::parse_integer(f.back(), no);
      if (l != 1 && l != -1) throw ParseError("labels must be +1 or -1", no);
      labels.push_back(static_cast<int>(l));
    }
    return 0;
  });
  const auto curve = precision_recall(scores, labels);
  emit_to(s.out, out, [&](std::ostream& o) {
    o << "# recall precision; auc " << text::format_real(curve.auc) << '\n';
    for (const auto& [r, p] : curve.points) o << text::format_real(r) << ' ' << text::format_real(p) << '\n';
  });
  return 0;
}

int run_experiment(const Settings& s, std::ostream& out, std::ostream& err) {
  const auto& known = experiments::names();
  if (std::find(known.begin(), known.end(), s.name) == known.end()) {
    throw UsageError("unknown experiment '" + s.name + "'");
  }
  experiments::ExperimentOptions opt;
  opt.seed = s.seed;
  opt.out_dir = s.out_dir.empty() ? fs::path("results") / s.name : fs::path(s.out_dir);
  if (!s.data_dir.empty()) opt.data_dir = s.data_dir;
  opt.preset = s.preset;
  opt.points = s.points;
  if (s.eps_max > 0) opt.eps_max = s.eps_max;
  opt.bootstrap = s.bootstrap;
  opt.alpha = s.alpha;
  opt.workers = s.workers;
  try {
    const auto report = experiments::run(s.name, opt);
    text::write_atomically(*opt.out_dir / "report.txt", [&](std::ostream& o) { report.write(o); });
    report.write(out);
  } catch (const experiments::MissingCorpus& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Settings s;
  CLI::App app("Persistence indicator functions: diagrams, step-function statistics, kernels and experiments", "pif");
  app.require_subcommand(1, 1);
  std::function<int()> action;

  auto inputs = [&](CLI::App* cmd, const char* what) { cmd->add_option("--in,-i", s.inputs, what)->required(); };
  auto diag_opts = [&](CLI::App* cmd) {
    cmd->add_option("--dim", s.dim, "homology dimension selected from each diagram file");
    cmd->add_option("--essential", s.essential, "drop | truncate=T")->capture_default_str();
  };

  auto* c = app.add_subcommand("sample", "sample a point cloud from shape:key=value,...");
  c->add_option("--spec", s.spec, "e.g. sphere:r=0.63,count=100,seed=3")->required();
  add_output(c, s.out, false);
  c->callback([&] { action = [&] { return run_sample(s, out); }; });

  c = app.add_subcommand("ph", "persistence diagrams of a point cloud (Rips) or an edge list");
  c->add_option("--in,-i", s.inputs, "point cloud file");
  c->add_option("--graph", s.graph, "edge list 'u v [weight]', 0-indexed");
  c->add_option("--filtration", s.filtration, "degree | weight | weight-inverted")->capture_default_str();
  c->add_option("--eps-max", s.eps_max, "largest Rips scale");
  c->add_option("--max-dim", s.max_dim, "highest homology dimension")->capture_default_str();
  add_output(c, s.out, false);
  c->callback([&] { action = [&] { return run_ph(s, out); }; });

  c = app.add_subcommand("pif", "persistence indicator function of a diagram");
  inputs(c, "diagram file");
  diag_opts(c);
  add_output(c, s.out, false);
  c->callback([&] { action = [&] { return run_pif(s, out); }; });

  c = app.add_subcommand("norm", "p-norm of step functions");
  inputs(c, "step-function files or directories");
  c->add_option("--p", s.p, "exponent >= 1")->capture_default_str();
  add_output(c, s.out, false);
  c->callback([&] { action = [&] { return run_norm(s, out); }; });

  c = app.add_subcommand("mean", "pointwise mean of step functions");
  inputs(c, "step-function files or directories");
  add_output(c, s.out, false);
  c->callback([&] { action = [&] { return run_mean(s, out); }; });

  c = app.add_subcommand("band", "bootstrap confidence band of the mean");
  inputs(c, "step-function files or directories");
  c->add_option("--bootstrap", s.bootstrap, "replicates")->capture_default_str();
  c->add_option("--alpha", s.alpha, "significance level")->capture_default_str();
  c->add_option("--seed", s.seed, "generator seed")->capture_default_str();
  add_output(c, s.out, false);
  c->callback([&] { action = [&] { return run_band(s, out); }; });

  c = app.add_subcommand("ztest", "two-sample z-test on PIF norms");
  c->add_option("--a", s.a_dir, "first sample (directory or file)")->required();
  c->add_option("--b", s.b_dir, "second sample (directory or file)")->required();
  c->add_option("--alpha", s.alpha, "significance level")->capture_default_str();
  add_output(c, s.out, false);
  c->callback([&] { action = [&] { return run_ztest(s, out); }; });

  for (const auto& [name, kind] : {std::pair{"dist", MatrixKind::Distance}, std::pair{"kernel", MatrixKind::Kernel}}) {
    c = app.add_subcommand(name, kind == MatrixKind::Distance ? "pairwise PIF distance matrix"
                                                              : "pairwise PIF kernel matrix");
    inputs(c, "diagram files or directories");
    diag_opts(c);
    c->add_option("--p", s.p, "exponent")->capture_default_str();
    c->add_option("--workers", s.workers, "threads (0 = all cores)");
    c->add_flag("--triplets", s.triplets, "write 'i j value' lines");
    add_output(c, s.out, false);
    const MatrixKind k = kind;
    c->callback([&, k] { action = [&, k] { return run_matrix(s, out, k); }; });
  }

  c = app.add_subcommand("wasserstein", "pairwise exact Wasserstein distances");
  inputs(c, "diagram files or directories");
  diag_opts(c);
  c->add_option("--p", s.p, "exponent")->capture_default_str();
  c->add_flag("--triplets", s.triplets, "write 'i j value' lines");
  add_output(c, s.out, false);
  c->callback([&] { action = [&] { return run_wasserstein(s, out); }; });

  c = app.add_subcommand("kpca", "kernel PCA embedding of a kernel matrix");
  c->add_option("--matrix", s.matrix, "kernel matrix file")->required();
  c->add_option("--components", s.components, "embedding dimension")->capture_default_str();
  add_output(c, s.out, false);
  c->callback([&] { action = [&] { return run_kpca(s, out); }; });

  c = app.add_subcommand("svm-cv", "nested cross-validated SVM accuracy on a kernel matrix");
  c->add_option("--matrix", s.matrix, "kernel matrix file")->required();
  c->add_option("--labels", s.labels, "one integer label per line")->required();
  c->add_option("--scheme", s.scheme, "kfold | loo | lpo=P | split=F")->capture_default_str();
  c->add_option("--folds", s.folds, "outer folds for kfold")->capture_default_str();
  c->add_option("--inner-folds", s.inner_folds, "inner folds for choosing C")->capture_default_str();
  c->add_option("--c-grid", s.c_grid, "comma-separated C values")->delimiter(',');
  c->add_option("--seed", s.seed, "fold seed")->capture_default_str();
  c->add_option("--predictions", s.predictions, "write 'index score label' for held-out points");
  add_output(c, s.out, false);
  c->callback([&] { action = [&] { return run_svm_cv(s, out); }; });

  c = app.add_subcommand("pr", "precision-recall curve from 'score label' lines");
  inputs(c, "scores file");
  add_output(c, s.out, false);
  c->callback([&] { action = [&] { return run_pr(s, out); }; });

  c = app.add_subcommand("experiment", "regenerate a named experiment");
  c->add_option("name", s.name, "sphere-torus-ztest | sphere-torus-svm | random-cube | sphere-profile | social-networks")
      ->required();
  c->add_option("--seed", s.seed, "first seed")->capture_default_str();
  c->add_option("--out-dir", s.out_dir, "output directory (default results/NAME)");
  c->add_option("--data", s.data_dir, "social-network corpus directory");
  c->add_option("--preset", s.preset, "equal-volume | paper-fig2")->capture_default_str();
  c->add_option("--points", s.points, "points per cloud")->capture_default_str();
  c->add_option("--eps-max", s.eps_max, "largest Rips scale");
  c->add_option("--bootstrap", s.bootstrap, "band replicates")->capture_default_str();
  c->add_option("--alpha", s.alpha, "test level");
  c->add_option("--workers", s.workers, "threads (0 = all cores)");
  c->callback([&, c] {
    if (c->count("--alpha") == 0) s.alpha = 0.01;
    action = [&] { return run_experiment(s, out, err); };
  });

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return 1;
  }

  try {
    return action();
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return 1;
  } catch (const CapacityError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace pif::cli
