#include <doctest.h>

#include <Eigen/Dense>
#include <algorithm>
#include <numeric>
#include <set>

#include "oracles.hpp"
#include "pif/errors.hpp"
#include "pif/learn.hpp"

using pif::SymmetricMatrix;

namespace {

// -|x_i - x_j| on the line: conditionally positive definite.
SymmetricMatrix line_kernel(const std::vector<double>& x) {
  SymmetricMatrix k(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) k.set(i, j, -std::abs(x[i] - x[j]));
  }
  return k;
}

struct Toy {
  std::vector<double> x;
  std::vector<int> y;
};

Toy separated(pif::CounterRng& rng, std::size_t per_class) {
  Toy t;
  for (std::size_t i = 0; i < per_class; ++i) {
    t.x.push_back(rng.uniform(0, 1));
    t.y.push_back(-1);
    t.x.push_back(rng.uniform(10, 11));
    t.y.push_back(1);
  }
  return t;
}

double training_accuracy(const SymmetricMatrix& k, const std::vector<int>& y, const pif::SvmModel& m) {
  std::size_t ok = 0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    std::vector<double> row(y.size());
    for (std::size_t j = 0; j < y.size(); ++j) row[j] = k(i, j);
    ok += pif::svm_predict(m, row).label == y[i];
  }
  return static_cast<double>(ok) / static_cast<double>(y.size());
}

}  // namespace

TEST_SUITE("learn") {

TEST_CASE("binary labels") {
  CHECK(pif::to_binary_labels(std::vector{3, 7, 3}) == std::vector{-1, 1, -1});
  CHECK_THROWS_AS(pif::to_binary_labels(std::vector{1, 1}), pif::ArgumentError);
  CHECK_THROWS_AS(pif::to_binary_labels(std::vector{1, 2, 3}), pif::ArgumentError);
}

TEST_CASE("kernel_pca of identical diagrams is the origin") {
  const SymmetricMatrix zero(5);
  for (const auto& row : pif::kernel_pca(zero, 2)) CHECK(row == std::vector<double>{0, 0});
  CHECK_THROWS_AS(pif::kernel_pca(zero, 5), pif::ArgumentError);
  CHECK_THROWS_AS(pif::kernel_pca(zero, 0), pif::ArgumentError);
}

TEST_CASE("kernel_pca reproduces the centred geometry of three diagrams") {
  const std::vector<pif::PersistenceDiagram> ds{pif::PersistenceDiagram(1, {{0, 1}}),
                                                pif::PersistenceDiagram(1, {{0.5, 3}}),
                                                pif::PersistenceDiagram(1, {{0.2, 0.4}, {1, 2}})};
  const auto k = pif::pairwise_matrix(ds, 1, pif::MatrixKind::Kernel, pif::EssentialPolicy::drop());
  const auto e = pif::kernel_pca(k, 2);
  // With every positive direction kept, squared embedding distances equal
  // K_ii + K_jj - 2 K_ij = 2 d_ij.
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) {
      const double d2 = std::pow(e[i][0] - e[j][0], 2) + std::pow(e[i][1] - e[j][1], 2);
      CHECK(d2 == doctest::Approx(-2 * k(i, j)).epsilon(1e-6));
    }
  }
  // Components come in descending variance and obey the sign convention.
  double v0 = 0;
  double v1 = 0;
  for (const auto& row : e) {
    v0 += row[0] * row[0];
    v1 += row[1] * row[1];
  }
  CHECK(v0 >= v1);
  for (std::size_t c = 0; c < 2; ++c) {
    std::size_t arg = 0;
    for (std::size_t i = 1; i < 3; ++i) {
      if (std::abs(e[i][c]) > std::abs(e[arg][c])) arg = i;
    }
    CHECK(e[arg][c] > 0);
  }
}

TEST_CASE("kernel_pca zero-pads and rejects negative-only spectra") {
  // Two distinct points: one positive direction, second component padded.
  SymmetricMatrix k(3);
  k.set(1, 0, -1);
  k.set(2, 0, -1);
  k.set(2, 1, 0);
  const auto e = pif::kernel_pca(k, 2);
  for (const auto& row : e) CHECK(row[1] == 0.0);

  // A positive kernel between distinct points centres to a negative semidefinite matrix.
  SymmetricMatrix bad(2);
  bad.set(1, 0, 1);
  CHECK_THROWS_AS(pif::kernel_pca(bad, 1), pif::EmbeddingError);
}

TEST_CASE("kernel_pca is equivariant under relabelling") {
  pif::CounterRng rng(501);
  std::vector<double> x(8);
  for (auto& v : x) v = rng.uniform(0, 5);
  const auto e = pif::kernel_pca(line_kernel(x), 2);
  std::vector<std::size_t> perm(8);
  std::iota(perm.begin(), perm.end(), 0);
  std::reverse(perm.begin(), perm.end());
  std::swap(perm[0], perm[3]);
  std::vector<double> px;
  for (auto i : perm) px.push_back(x[i]);
  const auto pe = pif::kernel_pca(line_kernel(px), 2);
  for (std::size_t i = 0; i < 8; ++i) {
    for (std::size_t c = 0; c < 2; ++c) CHECK(pe[i][c] == doctest::Approx(e[perm[i]][c]).epsilon(1e-8));
  }
}

TEST_CASE("svm on two points") {
  const auto k = line_kernel({0, 1});
  const std::vector y{1, -1};
  const auto m = pif::svm_train(k, y, 10);
  CHECK(m.converged);
  CHECK(m.support.size() == 2);
  CHECK(training_accuracy(k, y, m) == 1.0);
}

TEST_CASE("svm on a block kernel") {
  const std::size_t n = 10;
  SymmetricMatrix k(n);
  std::vector<int> y;
  for (std::size_t i = 0; i < n; ++i) y.push_back(i < n / 2 ? 1 : -1);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) k.set(i, j, y[i] == y[j] ? 1.0 : -1.0);
  }
  const auto m = pif::svm_train(k, y, 1);
  CHECK(training_accuracy(k, y, m) == 1.0);
}

TEST_CASE("svm dual feasibility and KKT on random problems") {
  pif::CounterRng rng(503);
  for (int t = 0; t < 30; ++t) {
    std::vector<double> x(20);
    std::vector<int> y(20);
    for (std::size_t i = 0; i < 20; ++i) {
      y[i] = i % 2 ? 1 : -1;
      x[i] = rng.normal() + (y[i] == 1 ? 1.0 : 0.0);
    }
    const auto k = line_kernel(x);
    const double c = std::pow(10.0, static_cast<double>(rng.below(4)) - 1);
    const auto m = pif::svm_train(k, y, c, 1e-4);
    REQUIRE(m.converged);
    double balance = 0;
    for (std::size_t i = 0; i < 20; ++i) {
      CHECK(m.alpha[i] >= 0);
      CHECK(m.alpha[i] <= c);
      balance += m.alpha[i] * y[i];
    }
    CHECK(std::abs(balance) < 1e-9 * std::max(1.0, c));
    CHECK(pif::kkt_violation(k, y, m.alpha, c) < 1e-4 + 1e-9);
    for (std::size_t s = 0; s < m.support.size(); ++s) CHECK(m.dual[s] > 0);

    // A constant shift of K does not change training labels.
    SymmetricMatrix shifted(20);
    for (std::size_t i = 0; i < 20; ++i) {
      for (std::size_t j = 0; j <= i; ++j) shifted.set(i, j, k(i, j) + 7.5);
    }
    const auto ms = pif::svm_train(shifted, y, c, 1e-4);
    for (std::size_t i = 0; i < 20; ++i) {
      std::vector<double> row(20);
      std::vector<double> srow(20);
      for (std::size_t j = 0; j < 20; ++j) {
        row[j] = k(i, j);
        srow[j] = shifted(i, j);
      }
      const auto a = pif::svm_predict(m, row);
      const auto b = pif::svm_predict(ms, srow);
      // Labels agree except where the score sits within solver tolerance of zero.
      if (std::abs(a.score) > 1e-3) CHECK(a.label == b.label);
    }
  }
}

TEST_CASE("svm_predict rules") {
  pif::SvmModel m;
  m.training_size = 2;
  m.bias = -0.5;
  CHECK(pif::svm_predict(m, std::vector<double>{0, 0}).label == -1);
  m.bias = 0.0;
  CHECK(pif::svm_predict(m, std::vector<double>{0, 0}).label == 1);
  CHECK_THROWS_AS(pif::svm_predict(m, std::vector<double>{0}), pif::ArgumentError);

  pif::CounterRng rng(505);
  auto toy = separated(rng, 8);
  const auto k = line_kernel(toy.x);
  const auto model = pif::svm_train(k, toy.y, 1);
  std::vector<double> row(toy.x.size());
  for (std::size_t j = 0; j < row.size(); ++j) row[j] = k(1, j);  // index 1 is a +1 point
  CHECK(pif::svm_predict(model, row).label == 1);
  CHECK_THROWS_AS(pif::svm_train(k, toy.y, 0), pif::ArgumentError);
  CHECK_THROWS_AS(pif::svm_train(k, std::vector<int>(toy.y.size(), 2), 1), pif::ArgumentError);
}

TEST_CASE("fold construction") {
  std::vector<int> y;
  for (int i = 0; i < 23; ++i) y.push_back(i % 3 == 0 ? 1 : -1);
  const auto folds = pif::make_folds(y, pif::KFold{5, true}, 9);
  REQUIRE(folds.size() == 5);
  std::vector<int> covered(y.size(), 0);
  for (const auto& f : folds) {
    CHECK(f.train.size() + f.test.size() == y.size());
    for (auto i : f.test) ++covered[i];
    const auto pos = std::count_if(f.test.begin(), f.test.end(), [&](std::size_t i) { return y[i] == 1; });
    CHECK(pos >= 1);
    CHECK(pos <= 2);
  }
  for (int c : covered) CHECK(c == 1);
  CHECK(pif::make_folds(y, pif::KFold{5, true}, 9)[2].test == folds[2].test);

  const auto loo = pif::make_folds(y, pif::LeaveOneOut{}, 4);
  CHECK(loo.size() == y.size());
  for (const auto& f : loo) CHECK(f.test.size() == 1);

  const auto lpo = pif::make_folds(std::vector<int>(6, 1), pif::LeavePOut{2}, 0);
  CHECK(lpo.size() == 15);
  CHECK(lpo.front().test == std::vector<std::size_t>{0, 1});
  CHECK(lpo.back().test == std::vector<std::size_t>{4, 5});
  CHECK_THROWS_AS(pif::make_folds(std::vector<int>(200, 1), pif::LeavePOut{4}, 0), pif::CapacityError);
  CHECK_THROWS_AS(pif::make_folds(y, pif::LeavePOut{23}, 0), pif::ArgumentError);

  const auto split = pif::make_folds(y, pif::HoldoutSplit{0.75}, 1);
  REQUIRE(split.size() == 1);
  CHECK(split[0].test.size() + split[0].train.size() == y.size());
  CHECK(split[0].test.size() >= 5);
  CHECK(split[0].test.size() <= 7);
  CHECK_THROWS_AS(pif::make_folds(y, pif::HoldoutSplit{1.0}, 1), pif::ArgumentError);
  CHECK_THROWS_AS(pif::make_folds(y, pif::KFold{1, true}, 1), pif::ArgumentError);
}

TEST_CASE("cross validation on a separating kernel is perfect under every scheme") {
  pif::CounterRng rng(507);
  const auto toy = separated(rng, 6);
  const auto k = line_kernel(toy.x);
  const std::vector<pif::CvScheme> schemes{pif::KFold{3, true}, pif::KFold{4, false}, pif::LeaveOneOut{},
                                           pif::LeavePOut{2}, pif::HoldoutSplit{0.7}};
  for (const auto& scheme : schemes) {
    const auto r = pif::cross_validate(k, toy.y, scheme, pif::kDefaultCGrid, 3);
    CHECK(r.accuracy == 1.0);
  }
}

TEST_CASE("shuffled labels stay near chance") {
  double total = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    pif::CounterRng rng(600 + seed);
    std::vector<double> x(40);
    for (auto& v : x) v = rng.uniform(0, 1);
    std::vector<int> y(40);
    for (std::size_t i = 0; i < 40; ++i) y[i] = i < 20 ? 1 : -1;
    for (std::size_t i = 39; i > 0; --i) std::swap(y[i], y[rng.below(i + 1)]);
    total += pif::cross_validate(line_kernel(x), y, pif::KFold{5, true}, pif::kDefaultCGrid, seed).accuracy;
  }
  const double mean = total / 10;
  CHECK(mean >= 0.3);
  CHECK(mean <= 0.7);
}

TEST_CASE("leave-one-out equals unstratified n-fold") {
  pif::CounterRng rng(509);
  std::vector<double> x(14);
  std::vector<int> y(14);
  for (std::size_t i = 0; i < 14; ++i) {
    y[i] = i % 2 ? 4 : 2;
    x[i] = rng.normal() + (y[i] == 4 ? 1.5 : 0.0);
  }
  const auto k = line_kernel(x);
  const auto a = pif::cross_validate(k, y, pif::LeaveOneOut{}, pif::kDefaultCGrid, 21);
  const auto b = pif::cross_validate(k, y, pif::KFold{14, false}, pif::kDefaultCGrid, 21);
  CHECK(a.accuracy == b.accuracy);
  CHECK(a.per_fold == b.per_fold);
  CHECK(a.chosen_c == b.chosen_c);
}

TEST_CASE("single-class training folds are skipped") {
  const auto k = line_kernel({0, 1, 2, 10});
  const std::vector<int> labels{1, 1, 1, 2};
  const auto r = pif::cross_validate(k, labels, pif::LeaveOneOut{}, pif::kDefaultCGrid, 0);
  REQUIRE(r.skipped.size() == 1);
  const auto folds = pif::make_folds(pif::to_binary_labels(labels), pif::LeaveOneOut{}, 0);
  CHECK(folds[r.skipped[0]].test == std::vector<std::size_t>{3});
  CHECK(r.per_fold.size() == 3);
}

TEST_CASE("corpus overload matches the kernel overload") {
  pif::CounterRng rng(511);
  pif::LabeledCorpus corpus;
  for (int i = 0; i < 16; ++i) {
    const double len = i % 2 ? 2.0 + rng.uniform() : 0.5 + rng.uniform();
    corpus.diagrams.push_back(pif::PersistenceDiagram(1, {{0.1, 0.1 + len}}));
    corpus.labels.push_back(i % 2);
  }
  const auto k = pif::pairwise_matrix(corpus.diagrams, 2, pif::MatrixKind::Kernel, pif::EssentialPolicy::drop());
  const auto a = pif::cross_validate(corpus, 2, pif::EssentialPolicy::drop(), pif::KFold{4, true}, pif::kDefaultCGrid, 5);
  const auto b = pif::cross_validate(k, corpus.labels, pif::KFold{4, true}, pif::kDefaultCGrid, 5);
  CHECK(a.per_fold == b.per_fold);
  CHECK(a.accuracy == 1.0);
}

TEST_CASE("precision-recall") {
  const auto perfect = pif::precision_recall(std::vector{0.9, 0.8, 0.1, 0.0}, std::vector{1, 1, -1, -1});
  CHECK(perfect.auc == 1.0);

  const auto flat = pif::precision_recall(std::vector{0.5, 0.5, 0.5, 0.5}, std::vector{1, -1, 1, -1});
  REQUIRE(flat.points.size() == 1);
  CHECK(flat.points[0].second == 0.5);

  // Inverted ranking: every threshold enumerated by hand from its confusion counts.
  const std::vector scores{0.9, 0.8, 0.7, 0.2, 0.1};
  const std::vector labels{-1, -1, -1, 1, 1};
  double oracle_ap = 0;
  double prev = 0;
  for (std::size_t cut = 1; cut <= scores.size(); ++cut) {
    std::size_t tp = 0;
    for (std::size_t i = 0; i < cut; ++i) tp += labels[i] == 1;
    const double recall = tp / 2.0;
    oracle_ap += (recall - prev) * static_cast<double>(tp) / static_cast<double>(cut);
    prev = recall;
  }
  CHECK(pif::precision_recall(scores, labels).auc == doctest::Approx(oracle_ap).epsilon(1e-15));
  CHECK(oracle_ap == doctest::Approx(0.5 * 0.25 + 0.5 * 0.4));

  CHECK_THROWS_AS(pif::precision_recall(std::vector{0.1}, std::vector{-1}), pif::ArgumentError);
}

}  // TEST_SUITE
