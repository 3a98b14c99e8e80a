#include <doctest.h>

#include <sstream>

#include "oracles.hpp"
#include "pif/diagram.hpp"
#include "pif/errors.hpp"

using pif::EssentialPolicy;
using pif::kInfinity;
using pif::PersistenceDiagram;
using pif::StepFunction;

TEST_SUITE("diagram") {

TEST_CASE("to_pif examples") {
  CHECK(pif::to_pif(PersistenceDiagram(0)).empty());
  CHECK(pif::to_pif(PersistenceDiagram(0, {{1, 1}})).empty());

  const PersistenceDiagram d(0, {{0, 2}, {1, 3}});
  const auto f = pif::to_pif(d);
  CHECK(f == StepFunction({0, 1, 2, 3}, {1, 2, 1}));
  for (double x = -0.5; x < 3.5; x += 0.01) CHECK(f(x) == oracle::brute_pif_count(d, x));
}

TEST_CASE("essential pairs need a policy") {
  const PersistenceDiagram d(1, {{0.5, kInfinity}, {0, 1}});
  CHECK_THROWS_AS(pif::to_pif(d), pif::PreconditionError);
  CHECK(pif::to_pif(d, EssentialPolicy::drop()) == StepFunction::indicator(0, 1));
  CHECK(pif::to_pif(d, EssentialPolicy::truncate_at(2)) == StepFunction({0, 0.5, 1, 2}, {1, 2, 1}));
  CHECK_THROWS_AS(pif::to_pif(d, EssentialPolicy::truncate_at(0.75)), pif::PreconditionError);
  CHECK_THROWS_AS(EssentialPolicy::truncate_at(kInfinity), pif::ArgumentError);
  // Truncating exactly at the birth of an essential class yields a zero-persistence pair.
  CHECK(pif::to_pif(PersistenceDiagram(1, {{1, kInfinity}}), EssentialPolicy::truncate_at(1)).empty());
}

TEST_CASE("pair validation") {
  CHECK_THROWS_AS(PersistenceDiagram(0, {{2, 1}}), pif::ArgumentError);
  CHECK_THROWS_AS(PersistenceDiagram(0, {{-kInfinity, 1}}), pif::ArgumentError);
  PersistenceDiagram d(0);
  CHECK_THROWS_AS(d.add({1, 0}), pif::ArgumentError);
  CHECK_THROWS_AS(d.merged_with(PersistenceDiagram(1)), pif::ArgumentError);
}

TEST_CASE("count_containing examples") {
  const PersistenceDiagram d(0, {{0, 2}});
  CHECK(pif::count_containing(d, 2) == 1);
  CHECK(pif::count_containing(d, 2.5) == 0);
  const PersistenceDiagram e(0, {{0, 2}, {1, 3}, {1, 3}});
  CHECK(pif::count_containing(e, 1) == 3);
  CHECK_THROWS_AS(pif::count_containing(e, kInfinity), pif::ArgumentError);
}

TEST_CASE("total_persistence examples") {
  CHECK(pif::total_persistence(PersistenceDiagram(0)) == 0.0);
  CHECK(pif::total_persistence(PersistenceDiagram(0, {{0, 2}, {1, 3}})) == 4.0);
  CHECK_THROWS_AS(pif::total_persistence(PersistenceDiagram(0, {{0, kInfinity}})), pif::PreconditionError);
}

TEST_CASE("norm identity on random diagrams") {
  pif::CounterRng rng(101);
  for (int t = 0; t < 1000; ++t) {
    const auto d = oracle::random_diagram(rng, 30, t % 2 == 0);
    double brute = 0;
    for (const auto& p : d.pairs()) brute += p.death - p.birth;
    const double norm = pif::lp_norm(pif::to_pif(d, EssentialPolicy::drop()), 1);
    CHECK(std::abs(norm - pif::total_persistence(d)) <= 1e-9 * std::max(1.0, brute));
    CHECK(std::abs(norm - brute) <= 1e-9 * std::max(1.0, brute));
  }
}

TEST_CASE("union additivity") {
  pif::CounterRng rng(103);
  for (int t = 0; t < 300; ++t) {
    const auto a = oracle::random_diagram(rng, 12, true);
    const auto b = oracle::random_diagram(rng, 12, true);
    CHECK(pif::to_pif(a.merged_with(b)) == pif::linear_combine(1, pif::to_pif(a), 1, pif::to_pif(b)));
  }
}

TEST_CASE("closed count dominates the half-open PIF, integer valued") {
  pif::CounterRng rng(107);
  for (int t = 0; t < 200; ++t) {
    const auto d = oracle::random_diagram(rng, 15, true);
    const auto f = pif::to_pif(d);
    for (double v : f.values()) {
      CHECK(v >= 0);
      CHECK(v == std::floor(v));
    }
    std::vector<double> deaths;
    for (const auto& p : d.pairs()) deaths.push_back(p.death);
    for (int k = -4; k <= 40; ++k) {
      const double eps = k / 16.0;  // lattice abscissae hit births and deaths exactly
      const auto closed = static_cast<double>(pif::count_containing(d, eps));
      CHECK(closed >= f(eps));
      if (std::find(deaths.begin(), deaths.end(), eps) == deaths.end()) CHECK(closed == f(eps));
      CHECK(f(eps) == oracle::brute_pif_count(d, eps));
    }
  }
}

TEST_CASE("multiset equality ignores order") {
  const PersistenceDiagram a(1, {{0, 1}, {0, 2}, {0, 1}});
  const PersistenceDiagram b(1, {{0, 2}, {0, 1}, {0, 1}});
  CHECK(a == b);
  CHECK_FALSE(a == PersistenceDiagram(1, {{0, 2}, {0, 1}}));
  CHECK_FALSE(a == PersistenceDiagram(0, {{0, 2}, {0, 1}, {0, 1}}));
}

TEST_CASE("read_diagrams examples") {
  std::istringstream one("0 2\n1 3\n");
  const auto d1 = pif::read_diagrams(one);
  REQUIRE(d1.size() == 1);
  CHECK(d1[0].dimension() == 0);
  CHECK(d1[0].size() == 2);

  std::istringstream two("# dim 1\n0.5 inf\n");
  const auto d2 = pif::read_diagrams(two);
  REQUIRE(d2.size() == 1);
  CHECK(d2[0].dimension() == 1);
  CHECK(d2[0].pairs()[0] == pif::PersistencePair{0.5, kInfinity});

  std::istringstream bad("3 1\n");
  try {
    pif::read_diagrams(bad);
    FAIL("expected a validation error");
  } catch (const pif::ValidationError& e) {
    CHECK(e.line() == 1);
  }

  std::istringstream malformed("0 1\n0 1 2\n");
  try {
    pif::read_diagrams(malformed);
    FAIL("expected a parse error");
  } catch (const pif::ParseError& e) {
    CHECK(e.line() == 2);
  }
}

TEST_CASE("blank lines and headers start blocks") {
  std::istringstream in("0 1\n0 1\n\n\n0.5 2\n# dim 5\n# a comment\n1 4\n\n2 3\n");
  const auto ds = pif::read_diagrams(in);
  REQUIRE(ds.size() == 4);
  CHECK(ds[0].dimension() == 0);
  CHECK(ds[0].size() == 2);
  CHECK(ds[1].dimension() == 1);
  CHECK(ds[2].dimension() == 5);
  CHECK(ds[3].dimension() == 6);

  std::istringstream empty_block("# dim 0\n# dim 1\n0 1\n");
  const auto eb = pif::read_diagrams(empty_block);
  REQUIRE(eb.size() == 2);
  CHECK(eb[0].empty());
}

TEST_CASE("write/read round trip") {
  pif::CounterRng rng(109);
  for (int t = 0; t < 100; ++t) {
    std::vector<PersistenceDiagram> ds;
    for (std::size_t k = 0; k < 3; ++k) {
      auto d = oracle::random_diagram(rng, 10, false);
      std::vector<pif::PersistencePair> pairs(d.pairs().begin(), d.pairs().end());
      if (rng.below(3) == 0) pairs.push_back({0.25, kInfinity});
      ds.emplace_back(k, pairs);
    }
    std::stringstream io;
    pif::write_diagrams(io, ds);
    const auto back = pif::read_diagrams(io);
    REQUIRE(back.size() == ds.size());
    for (std::size_t k = 0; k < ds.size(); ++k) CHECK(back[k] == ds[k]);
  }
}

}  // TEST_SUITE
