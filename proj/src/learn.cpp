#include "pif/learn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <string>

#include <Eigen/Dense>

#include "pif/errors.hpp"
#include "pif/rng.hpp"

namespace pif {

std::vector<int> to_binary_labels(std::span<const int> labels) {
  const std::set<int> classes(labels.begin(), labels.end());
  if (classes.size() != 2) {
    throw ArgumentError("binary classification needs exactly two classes, got " + std::to_string(classes.size()));
  }
  const int negative = *classes.begin();
  std::vector<int> out;
  out.reserve(labels.size());
  for (int l : labels) out.push_back(l == negative ? -1 : 1);
  return out;
}

std::vector<std::vector<double>> kernel_pca(const SymmetricMatrix& k, std::size_t components) {
  const std::size_t n = k.size();
  if (components < 1 || components + 1 > n) throw ArgumentError("components must lie in [1, n-1]");
  Eigen::MatrixXd km(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) km(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = k(i, j);
  }
  const double scale = km.cwiseAbs().maxCoeff();
  // J K J with J = I - ones/n, computed as row and column mean removal.
  const Eigen::VectorXd row_mean = km.rowwise().mean();
  const double grand_mean = row_mean.mean();
  Eigen::MatrixXd centred = km;
  centred.colwise() -= row_mean;
  centred.rowwise() -= row_mean.transpose();
  centred.array() += grand_mean;

  std::vector<std::vector<double>> embedding(n, std::vector<double>(components, 0.0));
  const double centred_scale = centred.cwiseAbs().maxCoeff();
  if (centred_scale <= 1e-12 * std::max(scale, 1.0)) return embedding;

  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(centred);
  if (solver.info() != Eigen::Success) throw EmbeddingError("eigendecomposition failed");
  const auto& values = solver.eigenvalues();    // ascending
  const auto& vectors = solver.eigenvectors();
  const double cutoff = 1e-10 * values.cwiseAbs().maxCoeff();
  std::size_t kept = 0;
  for (Eigen::Index idx = values.size() - 1; idx >= 0 && kept < components; --idx) {
    const double lambda = values(idx);
    if (!(lambda > cutoff)) break;
    Eigen::VectorXd v = vectors.col(idx);
    Eigen::Index arg = 0;
    v.cwiseAbs().maxCoeff(&arg);
    if (v(arg) < 0) v = -v;
    const double root = std::sqrt(lambda);
    for (std::size_t i = 0; i < n; ++i) embedding[i][kept] = root * v(static_cast<Eigen::Index>(i));
    ++kept;
  }
  if (kept == 0) throw EmbeddingError("centred kernel has no positive eigenvalue");
  return embedding;
}

namespace {

struct SmoResult {
  std::vector<double> alpha;
  double rho = 0.0;
  bool converged = false;
  std::size_t iterations = 0;
};

// LIBSVM-style SMO for min 1/2 a'Qa - e'a, 0 <= a <= C, y'a = 0, Q = yy' o K.
SmoResult solve_dual(const SymmetricMatrix& k, std::span<const int> y, double c, double tol, double shift,
                     std::size_t max_iterations) {
  constexpr double kTau = 1e-12;
  const std::size_t n = y.size();
  auto kij = [&](std::size_t i, std::size_t j) { return k(i, j) + (i == j ? shift : 0.0); };
  auto q = [&](std::size_t i, std::size_t j) { return static_cast<double>(y[i] * y[j]) * kij(i, j); };

  SmoResult r;
  r.alpha.assign(n, 0.0);
  std::vector<double> grad(n, -1.0);
  auto& a = r.alpha;
  auto in_up = [&](std::size_t t) { return (y[t] == 1 && a[t] < c) || (y[t] == -1 && a[t] > 0); };
  auto in_low = [&](std::size_t t) { return (y[t] == 1 && a[t] > 0) || (y[t] == -1 && a[t] < c); };

  for (r.iterations = 0; r.iterations < max_iterations; ++r.iterations) {
    double g_max = -std::numeric_limits<double>::infinity();
    std::size_t i = n;
    for (std::size_t t = 0; t < n; ++t) {
      if (in_up(t) && -y[t] * grad[t] > g_max) {
        g_max = -y[t] * grad[t];
        i = t;
      }
    }
    double g_min = std::numeric_limits<double>::infinity();
    double best = std::numeric_limits<double>::infinity();
    std::size_t j = n;
    for (std::size_t t = 0; t < n; ++t) {
      if (!in_low(t)) continue;
      const double yg = -y[t] * grad[t];
      g_min = std::min(g_min, yg);
      if (i == n) continue;
      const double b = g_max - yg;
      if (b > 0) {
        double quad = q(i, i) + q(t, t) - 2.0 * y[i] * y[t] * q(i, t);
        if (quad <= 0) quad = kTau;
        const double score = -(b * b) / quad;
        if (score < best) {
          best = score;
          j = t;
        }
      }
    }
    if (i == n || j == n || g_max - g_min < tol) {
      r.converged = true;
      break;
    }

    const double old_ai = a[i];
    const double old_aj = a[j];
    if (y[i] != y[j]) {
      double quad = q(i, i) + q(j, j) + 2.0 * q(i, j);
      if (quad <= 0) quad = kTau;
      const double delta = (-grad[i] - grad[j]) / quad;
      const double diff = a[i] - a[j];
      a[i] += delta;
      a[j] += delta;
      if (diff > 0) {
        if (a[j] < 0) {
          a[j] = 0;
          a[i] = diff;
        }
      } else if (a[i] < 0) {
        a[i] = 0;
        a[j] = -diff;
      }
      if (diff > 0) {
        if (a[i] > c) {
          a[i] = c;
          a[j] = c - diff;
        }
      } else if (a[j] > c) {
        a[j] = c;
        a[i] = c + diff;
      }
    } else {
      double quad = q(i, i) + q(j, j) - 2.0 * q(i, j);
      if (quad <= 0) quad = kTau;
      const double delta = (grad[i] - grad[j]) / quad;
      const double sum = a[i] + a[j];
      a[i] -= delta;
      a[j] += delta;
      if (sum > c) {
        if (a[i] > c) {
          a[i] = c;
          a[j] = sum - c;
        }
      } else if (a[j] < 0) {
        a[j] = 0;
        a[i] = sum;
      }
      if (sum > c) {
        if (a[j] > c) {
          a[j] = c;
          a[i] = sum - c;
        }
      } else if (a[i] < 0) {
        a[i] = 0;
        a[j] = sum;
      }
    }
    const double di = a[i] - old_ai;
    const double dj = a[j] - old_aj;
    for (std::size_t t = 0; t < n; ++t) grad[t] += q(t, i) * di + q(t, j) * dj;
  }

  // rho from free vectors, or the midpoint of the feasible interval.
  double ub = std::numeric_limits<double>::infinity();
  double lb = -std::numeric_limits<double>::infinity();
  double sum_free = 0.0;
  std::size_t free = 0;
  for (std::size_t t = 0; t < n; ++t) {
    const double yg = y[t] * grad[t];
    if (a[t] >= c) {
      if (y[t] == -1) ub = std::min(ub, yg); else lb = std::max(lb, yg);
    } else if (a[t] <= 0) {
      if (y[t] == 1) ub = std::min(ub, yg); else lb = std::max(lb, yg);
    } else {
      ++free;
      sum_free += yg;
    }
  }
  r.rho = free > 0 ? sum_free / static_cast<double>(free) : (ub + lb) / 2.0;
  return r;
}

}  // namespace

double kkt_violation(const SymmetricMatrix& k, std::span<const int> labels, std::span<const double> alpha, double c) {
  const std::size_t n = labels.size();
  double g_max = -std::numeric_limits<double>::infinity();
  double g_min = std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < n; ++t) {
    double g = -1.0;
    for (std::size_t s = 0; s < n; ++s) g += labels[t] * labels[s] * k(t, s) * alpha[s];
    const double yg = -labels[t] * g;
    const bool up = (labels[t] == 1 && alpha[t] < c) || (labels[t] == -1 && alpha[t] > 0);
    const bool low = (labels[t] == 1 && alpha[t] > 0) || (labels[t] == -1 && alpha[t] < c);
    if (up) g_max = std::max(g_max, yg);
    if (low) g_min = std::min(g_min, yg);
  }
  if (!std::isfinite(g_max) || !std::isfinite(g_min)) return 0.0;
  return std::max(0.0, g_max - g_min);
}

SvmModel svm_train(const SymmetricMatrix& k, std::span<const int> labels, double c, double tol,
                   std::size_t max_iterations) {
  const std::size_t n = labels.size();
  if (k.size() != n) throw ArgumentError("kernel size does not match label count");
  if (!(c > 0.0) || !std::isfinite(c)) throw ArgumentError("C must be positive and finite");
  if (!(tol > 0.0)) throw ArgumentError("tolerance must be positive");
  for (int l : labels) {
    if (l != 1 && l != -1) throw ArgumentError("SVM labels must be +1 or -1");
  }
  if (max_iterations == 0) max_iterations = std::max<std::size_t>(10'000'000, 100 * n);

  SmoResult r = solve_dual(k, labels, c, tol, 0.0, max_iterations);
  double shift = 0.0;
  if (!r.converged) {
    double scale = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j <= i; ++j) scale = std::max(scale, std::abs(k(i, j)));
    }
    shift = 1e-8 * scale;
    r = solve_dual(k, labels, c, tol, shift, max_iterations);
  }

  SvmModel m;
  m.c = c;
  m.training_size = n;
  m.bias = -r.rho;
  m.converged = r.converged;
  m.iterations = r.iterations;
  m.diagonal_shift = shift;
  m.alpha = r.alpha;
  for (std::size_t i = 0; i < n; ++i) {
    if (r.alpha[i] > 0.0) {
      m.support.push_back(i);
      m.dual.push_back(r.alpha[i]);
      m.support_labels.push_back(labels[i]);
    }
  }
  return m;
}

Prediction svm_predict(const SvmModel& model, std::span<const double> k_row) {
  if (k_row.size() != model.training_size) throw ArgumentError("kernel row length does not match training size");
  double score = model.bias;
  for (std::size_t s = 0; s < model.support.size(); ++s) {
    score += model.dual[s] * model.support_labels[s] * k_row[model.support[s]];
  }
  return {score >= 0.0 ? 1 : -1, score};
}

namespace {

void shuffle(std::vector<std::size_t>& v, CounterRng& rng) {
  for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[rng.below(i)]);
}

std::vector<Fold> folds_from_assignment(const std::vector<std::size_t>& fold_of, std::size_t k) {
  std::vector<Fold> folds(k);
  for (std::size_t i = 0; i < fold_of.size(); ++i) {
    for (std::size_t f = 0; f < k; ++f) (f == fold_of[i] ? folds[f].test : folds[f].train).push_back(i);
  }
  return folds;
}

std::vector<Fold> kfold(std::span<const int> labels, std::size_t k, bool stratified, std::uint64_t seed) {
  const std::size_t n = labels.size();
  if (k < 2 || k > n) throw ArgumentError("k-fold needs 2 <= k <= n");
  CounterRng rng(seed, 0xF01D);
  std::vector<std::size_t> fold_of(n, 0);
  std::size_t dealt = 0;
  auto deal = [&](std::vector<std::size_t> idx) {
    shuffle(idx, rng);
    for (auto i : idx) fold_of[i] = dealt++ % k;
  };
  if (stratified) {
    const std::set<int> classes(labels.begin(), labels.end());
    for (int cls : classes) {
      std::vector<std::size_t> members;
      for (std::size_t i = 0; i < n; ++i) {
        if (labels[i] == cls) members.push_back(i);
      }
      deal(std::move(members));
    }
  } else {
    std::vector<std::size_t> all(n);
    std::iota(all.begin(), all.end(), std::size_t{0});
    deal(std::move(all));
  }
  return folds_from_assignment(fold_of, k);
}

}  // namespace

std::vector<Fold> make_folds(std::span<const int> labels, const CvScheme& scheme, std::uint64_t seed) {
  const std::size_t n = labels.size();
  if (const auto* s = std::get_if<KFold>(&scheme)) return kfold(labels, s->k, s->stratified, seed);
  if (std::holds_alternative<LeaveOneOut>(scheme)) return kfold(labels, n, false, seed);
  if (const auto* s = std::get_if<LeavePOut>(&scheme)) {
    if (s->p < 1 || s->p + 1 > n) throw ArgumentError("leave-p-out needs 1 <= p <= n-1");
    double combos = 1.0;
    for (std::size_t i = 0; i < s->p; ++i) combos = combos * static_cast<double>(n - i) / static_cast<double>(i + 1);
    if (combos > 2e6) throw CapacityError("leave-p-out would enumerate too many folds");
    std::vector<Fold> folds;
    std::vector<char> pick(n, 0);
    std::fill(pick.begin(), pick.begin() + static_cast<std::ptrdiff_t>(s->p), 1);
    // prev_permutation over a 1...10...0 mask enumerates subsets in lexicographic order.
    do {
      Fold f;
      for (std::size_t i = 0; i < n; ++i) (pick[i] ? f.test : f.train).push_back(i);
      folds.push_back(std::move(f));
    } while (std::prev_permutation(pick.begin(), pick.end()));
    return folds;
  }
  const auto& split = std::get<HoldoutSplit>(scheme);
  if (!(split.train_fraction > 0.0 && split.train_fraction < 1.0)) {
    throw ArgumentError("train fraction must lie in (0, 1)");
  }
  CounterRng rng(seed, 0x5B11);
  Fold f;
  const std::set<int> classes(labels.begin(), labels.end());
  for (int cls : classes) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < n; ++i) {
      if (labels[i] == cls) members.push_back(i);
    }
    shuffle(members, rng);
    auto n_train = static_cast<std::size_t>(std::llround(split.train_fraction * static_cast<double>(members.size())));
    if (members.size() >= 2) n_train = std::clamp<std::size_t>(n_train, 1, members.size() - 1);
    for (std::size_t m = 0; m < members.size(); ++m) (m < n_train ? f.train : f.test).push_back(members[m]);
  }
  std::sort(f.train.begin(), f.train.end());
  std::sort(f.test.begin(), f.test.end());
  return {f};
}

namespace {

bool single_class(std::span<const int> labels, const std::vector<std::size_t>& idx) {
  for (auto i : idx) {
    if (labels[i] != labels[idx.front()]) return false;
  }
  return true;
}

std::vector<int> gather(std::span<const int> labels, const std::vector<std::size_t>& idx) {
  std::vector<int> out;
  out.reserve(idx.size());
  for (auto i : idx) out.push_back(labels[i]);
  return out;
}

// Trains on `train`, scores `test`; returns (accuracy, scores).
std::pair<double, std::vector<double>> fit_and_score(const SymmetricMatrix& k, std::span<const int> y,
                                                     const std::vector<std::size_t>& train,
                                                     const std::vector<std::size_t>& test, double c, double tol) {
  const auto model = svm_train(k.submatrix(train), gather(y, train), c, tol);
  std::vector<double> row(train.size());
  std::vector<double> scores;
  scores.reserve(test.size());
  std::size_t correct = 0;
  for (auto t : test) {
    for (std::size_t s = 0; s < train.size(); ++s) row[s] = k(t, train[s]);
    const auto pred = svm_predict(model, row);
    scores.push_back(pred.score);
    if (pred.label == y[t]) ++correct;
  }
  return {test.empty() ? 0.0 : static_cast<double>(correct) / static_cast<double>(test.size()), scores};
}

}  // namespace

CvResult cross_validate(const SymmetricMatrix& k, std::span<const int> labels, const CvScheme& scheme,
                        std::span<const double> c_grid, std::uint64_t seed, const CvOptions& options) {
  if (k.size() != labels.size()) throw ArgumentError("kernel size does not match label count");
  if (c_grid.empty()) throw ArgumentError("C grid is empty");
  const auto y = to_binary_labels(labels);
  std::vector<double> grid(c_grid.begin(), c_grid.end());
  std::sort(grid.begin(), grid.end());

  CvResult result;
  const auto folds = make_folds(y, scheme, seed);
  for (std::size_t f = 0; f < folds.size(); ++f) {
    const auto& fold = folds[f];
    if (fold.train.empty() || single_class(y, fold.train)) {
      result.skipped.push_back(f);
      continue;
    }
    double chosen = grid.front();
    if (grid.size() > 1) {
      // Inner stratified CV on the outer training set (local indices).
      const auto inner_labels = gather(y, fold.train);
      const SymmetricMatrix inner_k = k.submatrix(fold.train);
      std::size_t inner_k_folds = std::min(options.inner_folds, fold.train.size());
      std::vector<Fold> inner;
      if (inner_k_folds >= 2) {
        inner = make_folds(inner_labels, KFold{inner_k_folds, true}, CounterRng::mix64(seed + 0x1000 + f));
      }
      double best = -1.0;
      for (double c : grid) {
        double acc = 0.0;
        std::size_t used = 0;
        for (const auto& in : inner) {
          if (in.test.empty() || single_class(inner_labels, in.train)) continue;
          acc += fit_and_score(inner_k, inner_labels, in.train, in.test, c, options.tol).first;
          ++used;
        }
        const double mean = used > 0 ? acc / static_cast<double>(used) : 0.0;
        if (mean > best) {
          best = mean;
          chosen = c;
        }
      }
    }
    const auto [acc, scores] = fit_and_score(k, y, fold.train, fold.test, chosen, options.tol);
    result.per_fold.push_back(acc);
    result.chosen_c.push_back(chosen);
    for (std::size_t t = 0; t < fold.test.size(); ++t) {
      result.predictions.push_back({fold.test[t], scores[t], y[fold.test[t]]});
    }
  }
  if (!result.per_fold.empty()) {
    result.accuracy = std::accumulate(result.per_fold.begin(), result.per_fold.end(), 0.0) /
                      static_cast<double>(result.per_fold.size());
  }
  return result;
}

CvResult cross_validate(const LabeledCorpus& corpus, double p, const EssentialPolicy& policy, const CvScheme& scheme,
                        std::span<const double> c_grid, std::uint64_t seed, const CvOptions& options) {
  if (corpus.diagrams.size() != corpus.labels.size()) throw ArgumentError("one label per diagram required");
  const auto k = pairwise_matrix(corpus.diagrams, p, MatrixKind::Kernel, policy, default_worker_count());
  return cross_validate(k, corpus.labels, scheme, c_grid, seed, options);
}

PrCurve precision_recall(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) throw ArgumentError("one label per score required");
  const auto positives = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), 1));
  if (positives == 0) throw ArgumentError("precision-recall needs at least one positive label");
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

  PrCurve curve;
  std::size_t tp = 0;
  std::size_t fp = 0;
  double prev_recall = 0.0;
  for (std::size_t i = 0; i < order.size();) {
    const double threshold = scores[order[i]];
    while (i < order.size() && scores[order[i]] == threshold) {
      (labels[order[i]] == 1 ? tp : fp) += 1;
      ++i;
    }
    const double recall = static_cast<double>(tp) / static_cast<double>(positives);
    const double precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
    curve.auc += (recall - prev_recall) * precision;
    curve.points.emplace_back(recall, precision);
    prev_recall = recall;
  }
  return curve;
}

}  // namespace pif
