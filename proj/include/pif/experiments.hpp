#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "pif/data.hpp"
#include "pif/diagram.hpp"
#include "pif/stats.hpp"

// End-to-end drivers for the sphere/torus, random-complex and social-network
// studies. Each driver returns a `key value` report and, given an output
// directory, writes plot-ready step-function, matrix and curve files.
namespace pif::experiments {

class Report {
 public:
  void add(std::string key, std::string value);
  void add(std::string key, double value);
  void add(std::string key, std::size_t value);
  const std::vector<std::pair<std::string, std::string>>& entries() const noexcept { return entries_; }
  std::optional<std::string> find(const std::string& key) const;
  void write(std::ostream& out) const;

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

/// Rips persistence of a point cloud for homology dimensions 0..max_hom_dim.
std::vector<PersistenceDiagram> cloud_persistence(const std::vector<Point>& points, double eps_max,
                                                  std::size_t max_hom_dim);

struct SphereTorusOptions {
  std::string preset = "equal-volume";
  std::size_t per_class = 50;
  std::size_t points = 100;
  double eps_max = 0.8;
  std::size_t workers = 0;  // 0 = hardware concurrency
};

struct SphereTorusCorpus {
  std::vector<PersistenceDiagram> sphere;  // dimension-1 diagrams
  std::vector<PersistenceDiagram> torus;
};

/// Cloud j of each class is sampled with seed first_seed + j (the torus uses
/// the same seed in a disjoint seed range), so seed batches are reproducible.
SphereTorusCorpus sphere_torus_corpus(std::uint64_t first_seed, const SphereTorusOptions& options = {});

std::vector<StepFunction> pifs_of(const std::vector<PersistenceDiagram>& diagrams, const EssentialPolicy& policy);

struct CvSummary {
  double accuracy_k1 = 0.0;
  double accuracy_k2 = 0.0;
  double spread_k1 = 0.0;  // standard deviation over outer folds
  double spread_k2 = 0.0;
};

/// Nested stratified 5-fold CV with k_1 and k_2 on a sphere/torus corpus.
CvSummary sphere_torus_svm(const SphereTorusCorpus& corpus, std::uint64_t seed, std::size_t workers = 0);

struct RandomComplexOptions {
  std::size_t replicates = 50;
  std::size_t points = 100;
  double eps_max = 0.5;
  std::size_t workers = 0;
};

struct RandomComplexProfile {
  std::vector<std::vector<StepFunction>> pifs;  // [dimension][replicate]
  std::vector<StepFunction> means;              // per dimension
  std::vector<double> argmax;                   // smallest abscissa of the maximum, per dimension
  double d0_below_5 = 0.0;                      // first scale where the mean dimension-0 PIF is < 5
};

/// Random-cube (or sphere) complexes: Rips up to dimension 3, homology 0..2,
/// essential classes truncated at eps_max. Replicate i uses seed + i.
RandomComplexProfile random_complex_profile(const Shape& shape, std::uint64_t seed,
                                            const RandomComplexOptions& options);

/// Smallest x where f attains its maximum; 0 for the empty function.
double argmax_scale(const StepFunction& f);
/// Smallest x at or after the start of f's support where f(x) < level.
double first_scale_below(const StepFunction& f, double level);

struct ExperimentOptions {
  std::uint64_t seed = 0;
  std::optional<std::filesystem::path> out_dir;
  std::optional<std::filesystem::path> data_dir;  // social-networks corpus
  std::string preset = "equal-volume";
  std::size_t points = 100;
  std::optional<double> eps_max;
  std::size_t bootstrap = 1000;
  double alpha = 0.01;
  std::size_t workers = 0;
};

/// Thrown when the social-network corpus is not available locally.
struct MissingCorpus : std::runtime_error {
  using std::runtime_error::runtime_error;
};

Report run(const std::string& name, const ExperimentOptions& options);

/// Names accepted by `run`.
const std::vector<std::string>& names();

}  // namespace pif::experiments
