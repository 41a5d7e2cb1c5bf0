#include <gtest/gtest.h>

#include <random>

#include "bklab/verify.hpp"

using namespace bklab;

TEST(Generators, ShapesAndDeterminism) {
  std::mt19937_64 a(1);
  std::mt19937_64 b(1);
  const auto x = random_step_function(a, 3, 3);
  const auto y = random_step_function(b, 3, 3);
  EXPECT_EQ(x, y);
  EXPECT_EQ(x.branching(), 3);
  EXPECT_LE(x.resolution(), 3);
  for (double v : x.values()) EXPECT_GE(v, 0.0);

  const auto r = random_rational_function(a, 2, 4);
  for (const auto& v : r.values()) {
    EXPECT_EQ(boost::multiprecision::denominator(v), 1);
    EXPECT_LE(v, 9);
  }
}

TEST(Generators, MaximalFamiliesAreDisjointAndInSPhi) {
  std::mt19937_64 rng(17);
  for (int t = 0; t < 50; ++t) {
    const auto phi = random_step_function(rng, 2, 5);
    const auto lin = linearize(phi);
    const auto fam = random_maximal_family(lin, rng);
    EXPECT_NO_THROW(require_disjoint(2, fam));
    for (const auto& n : fam) EXPECT_GE(lin.find(n), 0);
    const auto sub = random_subfamily(fam, rng);
    EXPECT_LE(sub.size(), fam.size());
  }
}

TEST(Generators, LogGrid) {
  const auto g = log_grid(1e-2, 1e2, 5);
  ASSERT_EQ(g.size(), 5u);
  EXPECT_DOUBLE_EQ(g.front(), 1e-2);
  EXPECT_NEAR(g[2], 1.0, 1e-15);
  EXPECT_NEAR(g.back(), 1e2, 1e-12);
}

TEST(Suites, SmallRunsAreClean) {
  SuiteOptions o;
  o.count = 20;
  o.depth = 4;
  for (const char* name : {"kernel", "linearization", "inequalities", "gphi"}) {
    const auto s = run_suite(name, o);
    EXPECT_EQ(s.violations, 0) << name;
    EXPECT_GT(s.checks, 0) << name;
  }
  EXPECT_THROW(run_suite("nope", o), DomainError);
}

TEST(Suites, RowsAreRecordedOnRequest) {
  std::vector<GapRow> rows;
  SuiteOptions o;
  o.count = 3;
  o.depth = 3;
  o.beta_points = 4;
  o.rows = &rows;
  const auto s = verify_inequalities(o);
  EXPECT_FALSE(rows.empty());
  EXPECT_LE(static_cast<std::int64_t>(rows.size()), s.checks);
}
