#include "pif/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <ostream>
#include <thread>

#include "pif/analysis.hpp"
#include "pif/errors.hpp"
#include "pif/homology.hpp"
#include "pif/learn.hpp"
#include "pif/text.hpp"

namespace pif::experiments {

namespace fs = std::filesystem;

void Report::add(std::string key, std::string value) { entries_.emplace_back(std::move(key), std::move(value)); }
void Report::add(std::string key, double value) { add(std::move(key), text::format_real(value)); }
void Report::add(std::string key, std::size_t value) { add(std::move(key), std::to_string(value)); }

std::optional<std::string> Report::find(const std::string& key) const {
  for (const auto& [k, v] : entries_) {
    if (k == key) return v;
  }
  return std::nullopt;
}

void Report::write(std::ostream& out) const {
  for (const auto& [k, v] : entries_) out << k << ' ' << v << '\n';
}

namespace {

// Seed offset separating torus clouds from sphere clouds.
constexpr std::uint64_t kTorusSeedOffset = std::uint64_t{1} << 32;

std::size_t resolve_workers(std::size_t workers) { return workers == 0 ? default_worker_count() : workers; }

template <typename Body>
void parallel_for(std::size_t count, std::size_t workers, Body body) {
  workers = std::max<std::size_t>(1, std::min(resolve_workers(workers), count));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([=, &body] {
      for (std::size_t i = w; i < count; i += workers) body(i);
    });
  }
  for (auto& t : pool) t.join();
}

std::string two_digits(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%02zu", i);
  return buf;
}

void write_file(const fs::path& path, const std::function<void(std::ostream&)>& emit) {
  fs::create_directories(path.parent_path());
  text::write_atomically(path, emit);
}

void write_pif(const fs::path& path, const StepFunction& f) {
  write_file(path, [&](std::ostream& out) { write_step_function(out, f); });
}

double mean_of(const std::vector<double>& xs) {
  return xs.empty() ? 0.0 : std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

double stddev_of(const std::vector<double>& xs) {
  if (xs.size() < 2) return 0.0;
  const double m = mean_of(xs);
  double s = 0.0;
  for (double x : xs) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(xs.size() - 1));
}

// Mean of entries within and across the two halves of a [first | second] matrix.
std::pair<double, double> intra_inter(const SymmetricMatrix& m, std::size_t first) {
  double intra = 0.0;
  double inter = 0.0;
  std::size_t n_intra = 0;
  std::size_t n_inter = 0;
  for (std::size_t i = 0; i < m.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if ((i < first) == (j < first)) {
        intra += m(i, j);
        ++n_intra;
      } else {
        inter += m(i, j);
        ++n_inter;
      }
    }
  }
  return {n_intra ? intra / static_cast<double>(n_intra) : 0.0, n_inter ? inter / static_cast<double>(n_inter) : 0.0};
}

// Keeps the `limit` most persistent pairs (ties by pair order).
PersistenceDiagram most_persistent(const PersistenceDiagram& d, std::size_t limit) {
  if (d.size() <= limit) return d;
  auto pairs = d.pairs();
  std::stable_sort(pairs.begin(), pairs.end(), [](const auto& a, const auto& b) {
    return a.persistence() > b.persistence();
  });
  pairs.resize(limit);
  return PersistenceDiagram(d.dimension(), std::move(pairs));
}

SymmetricMatrix wasserstein_matrix(const std::vector<PersistenceDiagram>& ds, double p, std::size_t workers) {
  const std::size_t n = ds.size();
  SymmetricMatrix m(n);
  std::vector<PersistenceDiagram> small;
  small.reserve(n);
  for (const auto& d : ds) small.push_back(most_persistent(d, 100));
  std::vector<std::vector<double>> rows(n);
  parallel_for(n, workers, [&](std::size_t i) {
    rows[i].resize(i);
    for (std::size_t j = 0; j < i; ++j) rows[i][j] = wasserstein_distance(small[i], small[j], p);
  });
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < i; ++j) m.set(i, j, rows[i][j]);
  }
  return m;
}

void write_band(const fs::path& path, const ConfidenceBand& band) {
  // Three gnuplot data blocks: mean, lower, upper.
  write_file(path, [&](std::ostream& out) {
    write_step_function(out, band.mean);
    out << "\n\n";
    write_step_function(out, band.lower);
    out << "\n\n";
    write_step_function(out, band.upper);
  });
}

void write_embedding(const fs::path& path, const std::vector<std::vector<double>>& e, const std::vector<int>& labels) {
  write_file(path, [&](std::ostream& out) {
    for (std::size_t i = 0; i < e.size(); ++i) {
      for (double x : e[i]) out << text::format_real(x) << ' ';
      out << labels[i] << '\n';
    }
  });
}

void write_pr(const fs::path& path, const PrCurve& curve) {
  write_file(path, [&](std::ostream& out) {
    for (const auto& [r, p] : curve.points) out << text::format_real(r) << ' ' << text::format_real(p) << '\n';
  });
}

// ---------------------------------------------------------------------------

Report run_sphere_torus_ztest(const ExperimentOptions& opt) {
  SphereTorusOptions st;
  st.preset = opt.preset;
  st.points = opt.points;
  st.workers = opt.workers;
  if (opt.eps_max) st.eps_max = *opt.eps_max;
  const auto corpus = sphere_torus_corpus(opt.seed, st);
  const auto policy = EssentialPolicy::drop();
  const auto fs1 = pifs_of(corpus.sphere, policy);
  const auto fs2 = pifs_of(corpus.torus, policy);
  const auto z = two_sample_z_test(fs1, fs2, opt.alpha);
  const BootstrapOptions bopt{resolve_workers(opt.workers)};
  const auto band1 = confidence_band(fs1, opt.bootstrap, 0.05, opt.seed, bopt);
  const auto band2 = confidence_band(fs2, opt.bootstrap, 0.05, opt.seed + 1, bopt);

  Report r;
  r.add("experiment", std::string("sphere-torus-ztest"));
  r.add("seed", std::to_string(opt.seed));
  r.add("preset", st.preset);
  r.add("points", st.points);
  r.add("per_class", st.per_class);
  r.add("eps_max", st.eps_max);
  r.add("alpha", opt.alpha);
  r.add("Y1", z.y1);
  r.add("Y2", z.y2);
  r.add("s1_sq", z.s1_sq);
  r.add("s2_sq", z.s2_sq);
  r.add("z", z.z);
  r.add("p_value", z.p_value);
  r.add("critical", z.critical);
  r.add("reject", std::string(z.reject ? "true" : "false"));
  r.add("band_alpha", 0.05);
  r.add("band_bootstrap", opt.bootstrap);
  r.add("theta_hat_sphere", band1.theta_hat);
  r.add("theta_hat_torus", band2.theta_hat);

  if (opt.out_dir) {
    const auto& dir = *opt.out_dir;
    for (std::size_t j = 0; j < fs1.size(); ++j) {
      write_pif(dir / "sphere" / ("PIF_" + two_digits(j) + ".txt"), fs1[j]);
      write_pif(dir / "torus" / ("PIF_" + two_digits(j) + ".txt"), fs2[j]);
      write_file(dir / "diagrams" / ("sphere_" + two_digits(j) + ".txt"),
                 [&](std::ostream& out) { write_diagram(out, corpus.sphere[j]); });
      write_file(dir / "diagrams" / ("torus_" + two_digits(j) + ".txt"),
                 [&](std::ostream& out) { write_diagram(out, corpus.torus[j]); });
    }
    write_pif(dir / "PIF_sphere_mean.txt", band1.mean);
    write_pif(dir / "PIF_torus_mean.txt", band2.mean);
    write_band(dir / "PIF_sphere_mean_plus_confidence.txt", band1);
    write_band(dir / "PIF_torus_mean_plus_confidence.txt", band2);
  }
  return r;
}

Report run_sphere_torus_svm(const ExperimentOptions& opt) {
  SphereTorusOptions st;
  st.preset = opt.preset;
  st.points = opt.points;
  st.workers = opt.workers;
  if (opt.eps_max) st.eps_max = *opt.eps_max;
  const auto corpus = sphere_torus_corpus(opt.seed, st);
  const auto cv = sphere_torus_svm(corpus, opt.seed, opt.workers);

  std::vector<PersistenceDiagram> all = corpus.sphere;
  all.insert(all.end(), corpus.torus.begin(), corpus.torus.end());
  std::vector<int> labels(all.size(), 0);
  std::fill(labels.begin() + static_cast<std::ptrdiff_t>(corpus.sphere.size()), labels.end(), 1);
  const auto policy = EssentialPolicy::drop();
  const std::size_t workers = resolve_workers(opt.workers);
  const auto pifs = pifs_of(all, policy);
  const auto d1 = pairwise_matrix(pifs, 1, MatrixKind::Distance, workers);
  const auto d2 = pairwise_matrix(pifs, 2, MatrixKind::Distance, workers);
  const auto w1 = wasserstein_matrix(all, 1, workers);
  const auto w2 = wasserstein_matrix(all, 2, workers);
  const auto k1 = pairwise_matrix(pifs, 1, MatrixKind::Kernel, workers);
  const auto embedding = kernel_pca(k1, 2);

  Report r;
  r.add("experiment", std::string("sphere-torus-svm"));
  r.add("seed", std::to_string(opt.seed));
  r.add("preset", st.preset);
  r.add("eps_max", st.eps_max);
  r.add("accuracy_k1", cv.accuracy_k1);
  r.add("accuracy_k1_sd", cv.spread_k1);
  r.add("accuracy_k2", cv.accuracy_k2);
  r.add("accuracy_k2_sd", cv.spread_k2);
  const std::pair<const char*, const SymmetricMatrix*> mats[] = {{"d1", &d1}, {"d2", &d2}, {"W1", &w1}, {"W2", &w2}};
  for (const auto& [name, m] : mats) {
    const auto [intra, inter] = intra_inter(*m, corpus.sphere.size());
    r.add(std::string(name) + "_intra", intra);
    r.add(std::string(name) + "_inter", inter);
  }
  if (opt.out_dir) {
    const auto& dir = *opt.out_dir;
    write_file(dir / "PIF1_distances_sphere_torus.txt", [&](std::ostream& out) { write_matrix_triplets(out, d1); });
    write_file(dir / "PIF2_distances_sphere_torus.txt", [&](std::ostream& out) { write_matrix_triplets(out, d2); });
    write_file(dir / "W1_distances_sphere_torus.txt", [&](std::ostream& out) { write_matrix_triplets(out, w1); });
    write_file(dir / "W2_distances_sphere_torus.txt", [&](std::ostream& out) { write_matrix_triplets(out, w2); });
    write_file(dir / "kernel_k1.txt", [&](std::ostream& out) { write_matrix(out, k1); });
    write_embedding(dir / "kpca_k1.txt", embedding, labels);
  }
  return r;
}

Report profile_report(const std::string& name, const RandomComplexProfile& prof, const ExperimentOptions& opt,
                      double eps_max) {
  Report r;
  r.add("experiment", name);
  r.add("seed", std::to_string(opt.seed));
  r.add("replicates", prof.pifs.empty() ? std::size_t{0} : prof.pifs[0].size());
  r.add("eps_max", eps_max);
  for (std::size_t d = 0; d < prof.means.size(); ++d) {
    r.add("argmax_d" + std::to_string(d), prof.argmax[d]);
    double peak = 0.0;
    for (double v : prof.means[d].values()) peak = std::max(peak, v);
    r.add("peak_d" + std::to_string(d), peak);
  }
  r.add("d0_below_5", prof.d0_below_5);
  if (opt.out_dir) {
    const auto& dir = *opt.out_dir;
    for (std::size_t d = 0; d < prof.pifs.size(); ++d) {
      for (std::size_t i = 0; i < prof.pifs[d].size(); ++i) {
        write_pif(dir / ("PIF_" + two_digits(i) + "_d" + std::to_string(d) + ".txt"), prof.pifs[d][i]);
      }
      write_pif(dir / ("PIF_mean_d" + std::to_string(d) + ".txt"), prof.means[d]);
    }
  }
  return r;
}

Report run_random_cube(const ExperimentOptions& opt) {
  RandomComplexOptions rc;
  rc.points = opt.points;
  rc.workers = opt.workers;
  if (opt.eps_max) rc.eps_max = *opt.eps_max;
  const auto prof = random_complex_profile(Cube{1.0}, opt.seed, rc);
  return profile_report("random-cube", prof, opt, rc.eps_max);
}

Report run_sphere_profile(const ExperimentOptions& opt) {
  RandomComplexOptions rc;
  rc.points = opt.points;
  rc.workers = opt.workers;
  rc.eps_max = opt.eps_max.value_or(1.3);
  const auto prof = random_complex_profile(Sphere{1.0}, opt.seed, rc);
  return profile_report("sphere-profile", prof, opt, rc.eps_max);
}

Report run_social_networks(const ExperimentOptions& opt) {
  const fs::path dir = opt.data_dir.value_or(fs::path("data") / "REDDIT-BINARY");
  if (!fs::is_directory(dir)) {
    throw MissingCorpus(
        "social-network corpus not found at " + dir.string() +
        "\nDownload REDDIT-BINARY from the TU Dortmund graph benchmark collection "
        "(https://chrsmrrs.github.io/datasets/docs/datasets/), unpack it, and pass its directory via --data.");
  }
  const auto graphs = load_graph_corpus(dir);
  std::vector<PersistenceDiagram> diagrams(graphs.size());
  std::vector<double> top(graphs.size(), 0.0);
  parallel_for(graphs.size(), opt.workers, [&](std::size_t g) {
    const auto f = degree_filtration(graphs[g].graph);
    for (const auto& s : f.simplices()) top[g] = std::max(top[g], s.value);
    diagrams[g] = compute_persistence(f, 1)[1];
  });
  // Graph cycles never die; one corpus-wide truncation keeps the PIFs comparable.
  const double t = graphs.empty() ? 0.0 : *std::max_element(top.begin(), top.end());
  const auto policy = EssentialPolicy::truncate_at(t);
  LabeledCorpus corpus{diagrams, {}};
  for (const auto& g : graphs) corpus.labels.push_back(g.label);
  const auto pifs = pifs_of(diagrams, policy);
  const std::size_t workers = resolve_workers(opt.workers);
  CvOptions cvo;
  cvo.inner_folds = 4;

  Report r;
  r.add("experiment", std::string("social-networks"));
  r.add("seed", std::to_string(opt.seed));
  r.add("graphs", graphs.size());
  r.add("truncate_at", t);
  for (double p : {1.0, 2.0}) {
    const auto k = pairwise_matrix(pifs, p, MatrixKind::Kernel, workers);
    const auto cv = cross_validate(k, corpus.labels, HoldoutSplit{0.9}, kDefaultCGrid, opt.seed, cvo);
    std::vector<double> scores;
    std::vector<int> labels;
    for (const auto& s : cv.predictions) {
      scores.push_back(s.score);
      labels.push_back(s.label);
    }
    const auto pr = precision_recall(scores, labels);
    const std::string tag = p == 1.0 ? "k1" : "k2";
    r.add("accuracy_" + tag, cv.accuracy);
    r.add("chosen_c_" + tag, cv.chosen_c.empty() ? 0.0 : cv.chosen_c[0]);
    r.add("pr_auc_" + tag, pr.auc);
    if (opt.out_dir) {
      write_pr(*opt.out_dir / ("PR_" + tag + ".txt"), pr);
      if (p == 1.0) write_embedding(*opt.out_dir / "kpca_k1.txt", kernel_pca(k, 2), corpus.labels);
    }
  }
  return r;
}

}  // namespace

std::vector<PersistenceDiagram> cloud_persistence(const std::vector<Point>& points, double eps_max,
                                                  std::size_t max_hom_dim) {
  const auto f = rips_filtration(points, eps_max, std::min<std::size_t>(max_hom_dim + 1, 3));
  return compute_persistence(f, max_hom_dim);
}

SphereTorusCorpus sphere_torus_corpus(std::uint64_t first_seed, const SphereTorusOptions& options) {
  const auto [sphere, torus] = sphere_torus_preset(options.preset);
  SphereTorusCorpus c;
  c.sphere.resize(options.per_class);
  c.torus.resize(options.per_class);
  parallel_for(2 * options.per_class, options.workers, [&](std::size_t i) {
    const std::size_t j = i / 2;
    const bool is_torus = i % 2 == 1;
    SamplerSpec spec;
    spec.count = options.points;
    spec.seed = first_seed + j + (is_torus ? kTorusSeedOffset : 0);
    spec.shape = is_torus ? Shape{torus} : Shape{sphere};
    auto d = cloud_persistence(sample(spec), options.eps_max, 1)[1];
    (is_torus ? c.torus : c.sphere)[j] = std::move(d);
  });
  return c;
}

std::vector<StepFunction> pifs_of(const std::vector<PersistenceDiagram>& diagrams, const EssentialPolicy& policy) {
  std::vector<StepFunction> out;
  out.reserve(diagrams.size());
  for (const auto& d : diagrams) out.push_back(to_pif(d, policy));
  return out;
}

CvSummary sphere_torus_svm(const SphereTorusCorpus& corpus, std::uint64_t seed, std::size_t workers) {
  std::vector<PersistenceDiagram> all = corpus.sphere;
  all.insert(all.end(), corpus.torus.begin(), corpus.torus.end());
  std::vector<int> labels(all.size(), 0);
  std::fill(labels.begin() + static_cast<std::ptrdiff_t>(corpus.sphere.size()), labels.end(), 1);
  const auto pifs = pifs_of(all, EssentialPolicy::drop());
  CvSummary s;
  for (double p : {1.0, 2.0}) {
    const auto k = pairwise_matrix(pifs, p, MatrixKind::Kernel, resolve_workers(workers));
    const auto cv = cross_validate(k, labels, KFold{5, true}, kDefaultCGrid, seed);
    (p == 1.0 ? s.accuracy_k1 : s.accuracy_k2) = cv.accuracy;
    (p == 1.0 ? s.spread_k1 : s.spread_k2) = stddev_of(cv.per_fold);
  }
  return s;
}

double argmax_scale(const StepFunction& f) {
  if (f.empty()) return 0.0;
  const auto vs = f.values();
  const auto it = std::max_element(vs.begin(), vs.end());
  return f.breakpoints()[static_cast<std::size_t>(it - vs.begin())];
}

double first_scale_below(const StepFunction& f, double level) {
  if (f.empty()) return 0.0;
  const auto xs = f.breakpoints();
  const auto vs = f.values();
  for (std::size_t i = 0; i < vs.size(); ++i) {
    if (vs[i] < level) return xs[i];
  }
  return xs.back();
}

RandomComplexProfile random_complex_profile(const Shape& shape, std::uint64_t seed,
                                            const RandomComplexOptions& options) {
  RandomComplexProfile prof;
  prof.pifs.assign(3, std::vector<StepFunction>(options.replicates));
  const auto policy = EssentialPolicy::truncate_at(options.eps_max);
  parallel_for(options.replicates, options.workers, [&](std::size_t i) {
    const auto points = sample({shape, options.points, seed + i});
    const auto ds = cloud_persistence(points, options.eps_max, 2);
    for (std::size_t d = 0; d < 3; ++d) prof.pifs[d][i] = to_pif(ds[d], policy);
  });
  for (std::size_t d = 0; d < 3; ++d) {
    prof.means.push_back(options.replicates ? mean_pif(prof.pifs[d]) : StepFunction());
    prof.argmax.push_back(argmax_scale(prof.means.back()));
  }
  prof.d0_below_5 = first_scale_below(prof.means[0], 5.0);
  return prof;
}

const std::vector<std::string>& names() {
  static const std::vector<std::string> all{"sphere-torus-ztest", "sphere-torus-svm", "random-cube",
                                            "sphere-profile", "social-networks"};
  return all;
}

Report run(const std::string& name, const ExperimentOptions& options) {
  if (name == "sphere-torus-ztest") return run_sphere_torus_ztest(options);
  if (name == "sphere-torus-svm") return run_sphere_torus_svm(options);
  if (name == "random-cube") return run_random_cube(options);
  if (name == "sphere-profile") return run_sphere_profile(options);
  if (name == "social-networks") return run_social_networks(options);
  throw ArgumentError("unknown experiment '" + name + "'");
}

}  // namespace pif::experiments
