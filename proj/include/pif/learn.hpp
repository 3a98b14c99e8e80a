#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <variant>
#include <vector>

#include "pif/analysis.hpp"
#include "pif/diagram.hpp"

namespace pif {

struct LabeledCorpus {
  std::vector<PersistenceDiagram> diagrams;
  std::vector<int> labels;
};

/// Maps two distinct integer labels to -1 (smaller) and +1 (larger).
/// Throws ArgumentError for any other number of classes.
std::vector<int> to_binary_labels(std::span<const int> labels);

/// Kernel PCA: double-centres K, keeps the `components` largest positive
/// eigenvalues and embeds point i as (sqrt(lambda_k) * v_k[i])_k. Each
/// eigenvector is signed so its largest-magnitude entry is positive. Missing
/// positive directions are zero-padded; an all-zero centred kernel embeds
/// every point at the origin. Throws EmbeddingError when the centred kernel
/// is nonzero but has no positive eigenvalue.
std::vector<std::vector<double>> kernel_pca(const SymmetricMatrix& k, std::size_t components);

struct SvmModel {
  std::vector<std::size_t> support;  // training indices with nonzero dual coefficient
  std::vector<double> dual;          // dual coefficients of `support`, in [0, C]
  std::vector<int> support_labels;
  std::vector<double> alpha;  // dual coefficients of every training point
  double bias = 0.0;
  double c = 1.0;
  double kernel_exponent = 0.0;
  std::size_t training_size = 0;
  bool converged = false;
  std::size_t iterations = 0;
  double diagonal_shift = 0.0;  // added to K's diagonal when the first solve stalled
};

/// Soft-margin SVM dual solved by SMO with second-order working-set selection
/// on a precomputed (conditionally positive definite) kernel. `labels` are +-1.
SvmModel svm_train(const SymmetricMatrix& k, std::span<const int> labels, double c, double tol = 1e-3,
                   std::size_t max_iterations = 0);

/// Maximal KKT violation m(alpha) - M(alpha) of the dual at `alpha`.
double kkt_violation(const SymmetricMatrix& k, std::span<const int> labels, std::span<const double> alpha, double c);

struct Prediction {
  int label = 1;
  double score = 0.0;
};

/// score = sum_i alpha_i y_i k_row[i] + bias; label +1 on score >= 0.
Prediction svm_predict(const SvmModel& model, std::span<const double> k_row);

struct KFold {
  std::size_t k = 5;
  bool stratified = true;
};
struct LeaveOneOut {};
struct LeavePOut {
  std::size_t p = 2;
};
struct HoldoutSplit {
  double train_fraction = 0.9;
};
using CvScheme = std::variant<KFold, LeaveOneOut, LeavePOut, HoldoutSplit>;

struct Fold {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

/// Outer folds of a scheme. Stratified assignment shuffles each class by seed
/// and deals indices round-robin; LeaveOneOut is KFold(n, unstratified).
std::vector<Fold> make_folds(std::span<const int> labels, const CvScheme& scheme, std::uint64_t seed);

inline const std::vector<double> kDefaultCGrid{0.1, 1.0, 10.0, 100.0};

struct CvOptions {
  std::size_t inner_folds = 3;
  double tol = 1e-3;
};

struct CvResult {
  double accuracy = 0.0;            // mean over evaluated folds
  std::vector<double> per_fold;     // accuracy of every evaluated fold
  std::vector<double> chosen_c;     // selected C of every evaluated fold
  std::vector<std::size_t> skipped; // outer folds whose training set had one class
  struct Scored {
    std::size_t index;
    double score;
    int label;
  };
  std::vector<Scored> predictions;  // every held-out prediction, fold order
};

/// Nested cross-validation: the outer scheme estimates accuracy, an inner
/// stratified CV on each training set picks C from `c_grid` (ties -> smallest C).
CvResult cross_validate(const SymmetricMatrix& k, std::span<const int> labels, const CvScheme& scheme,
                        std::span<const double> c_grid, std::uint64_t seed, const CvOptions& options = {});

CvResult cross_validate(const LabeledCorpus& corpus, double p, const EssentialPolicy& policy, const CvScheme& scheme,
                        std::span<const double> c_grid, std::uint64_t seed, const CvOptions& options = {});

struct PrCurve {
  std::vector<std::pair<double, double>> points;  // (recall, precision), descending score thresholds
  double auc = 0.0;                               // sum of (recall step) * precision
};

/// Precision-recall curve; tied scores form a single threshold. Labels are +-1.
PrCurve precision_recall(std::span<const double> scores, std::span<const int> labels);

}  // namespace pif
