#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "bklab/transforms.hpp"
#include "bklab/verify.hpp"

using namespace bklab;

namespace {

StepFunctionD two_on_left_half() { return StepFunctionD(2, 1, {0, 1, 2}, {2.0, 0.0}); }

void expect_dominates(const StepFunctionD& upper, const StepFunctionD& lower) {
  for_each_common_piece(upper, lower, [](std::int64_t, std::int64_t, double u, double l) {
    EXPECT_GE(u, l * (1.0 - 1e-12));
  });
}

}  // namespace

TEST(Families, OutsideUnionHandCase) {
  const std::vector<Node> fam{Node{1, 0}};
  const auto g = theorem41_gap(two_on_left_half(), fam, 0.5, 1.0);
  EXPECT_NEAR(g.lhs, 0.5, 1e-15);
  EXPECT_NEAR(g.rhs, 1.1715728752538099, 1e-14);
  EXPECT_DOUBLE_EQ(g.beta, 1.0);
}

TEST(Families, InsideUnionHandCase) {
  const std::vector<Node> fam{Node{1, 0}};
  const auto g = theorem42_gap(two_on_left_half(), fam, 0.5, 1.0);
  EXPECT_NEAR(g.lhs, std::sqrt(2.0) / 2.0, 1e-15);
  EXPECT_NEAR(g.rhs, 0.82842712474619010, 1e-14);

  const std::vector<Node> whole{root_node()};
  const auto w = theorem42_gap(two_on_left_half(), whole, 0.5, 1.0);
  EXPECT_NEAR(w.lhs, 1.2071067811865475, 1e-15);
  EXPECT_NEAR(w.rhs, 2.0, 1e-14);
}

TEST(Families, RelaxedVariantAgreesOnMaximalFamilies) {
  const std::vector<Node> fam{Node{1, 0}};
  for (double beta : {0.1, 1.0, 7.0}) {
    const auto a = theorem41_gap(two_on_left_half(), fam, 0.5, beta);
    const auto b = corollary41_gap(two_on_left_half(), fam, 0.5, beta);
    EXPECT_DOUBLE_EQ(a.slack, b.slack);
  }
}

TEST(Families, HypothesesAreChecked) {
  const auto phi = StepFunctionD::from_leaves(2, 2, {3.0, 1.0, 2.0, 0.0});
  const std::vector<Node> outside{Node{1, 1}};  // average 1, not in S_phi
  EXPECT_THROW(theorem42_gap(phi, outside, 0.5, 1.0), FamilyNotInSPhi);
  const std::vector<Node> partial{Node{2, 0}};  // Node{2, 2} could still be added
  EXPECT_THROW(theorem41_gap(phi, partial, 0.5, 1.0), FamilyNotMaximal);
  EXPECT_NO_THROW(corollary41_gap(phi, partial, 0.5, 1.0));
  const std::vector<Node> nested{Node{1, 0}, Node{2, 0}};
  EXPECT_THROW(theorem42_gap(phi, nested, 0.5, 1.0), DomainError);
  const std::vector<Node> fam{Node{1, 0}};
  EXPECT_THROW(theorem42_gap(phi, fam, 0.5, 0.0), DomainError);
}

TEST(Families, RandomSlacksAreNonnegative) {
  std::mt19937_64 rng(21);
  for (int t = 0; t < 100; ++t) {
    const auto phi = random_step_function(rng, 2, 5);
    const auto lin = linearize(phi);
    const auto fam = random_maximal_family(lin, rng);
    const auto sub = random_subfamily(fam, rng);
    for (double beta : log_grid(1e-3, 1e3, 7)) {
      EXPECT_GE(theorem41_gap(phi, fam, 0.5, beta).slack, -1e-12);
      EXPECT_GE(theorem42_gap(phi, sub, 0.5, beta).slack, -1e-12);
      EXPECT_GE(corollary41_gap(phi, sub, 0.5, beta).slack, -1e-12);
    }
  }
}

TEST(Objective, TwoOnLeftHalf) {
  EXPECT_NEAR(objective(two_on_left_half(), 1.2, 0.5), 1.2548293386917136, 1e-15);
  EXPECT_NEAR(objective(two_on_left_half(), 3.0, 0.5), std::sqrt(3.0), 1e-15);
}

TEST(Objective, NeverExceedsBellmanBound) {
  std::mt19937_64 rng(4);
  for (int t = 0; t < 100; ++t) {
    const auto phi = random_step_function(rng, 2, 5);
    const auto mom = moments(phi, 0.5);
    if (mom.mass <= 0.0) continue;
    const double L = mom.mass * 1.3;
    const auto p = BellmanParams::make(0.5, mom.mass, std::min(mom.q_mass, std::sqrt(mom.mass)), L);
    EXPECT_LE(objective(phi, L, 0.5), bellman_value(p) * (1.0 + 1e-12));
  }
}

TEST(Residual, TwoOnLeftHalf) {
  const auto phi = two_on_left_half();
  const auto p = BellmanParams::make(0.5, 1.0, std::sqrt(2.0) / 2.0, 1.5);
  EXPECT_NEAR(p.c, 2.4842086727071308, 1e-13);
  const auto r = eigen_residual(phi, 1.5, p);
  EXPECT_NEAR(r.on_excess, 1.6079945164013036, 1e-12);
  EXPECT_NEAR(r.off_excess, 0.61237243569579452, 1e-15);
  EXPECT_NEAR(r.total, r.on_excess + r.off_excess, 1e-15);
}

TEST(Young, ZeroOnlyAtOne) {
  for (double q : {0.1, 0.5, 0.9}) {
    EXPECT_NEAR(young_gap(1.0, q), 0.0, 1e-15);
    EXPECT_GT(young_gap(0.5, q), 0.0);
    EXPECT_GT(young_gap(2.0, q), 0.0);
    EXPECT_GT(young_gap(0.0, q), 0.0);
  }
}

TEST(GPhi, ConstantOnSetsIsAFixedPoint) {
  const auto phi = two_on_left_half();
  const auto r = g_phi(phi, 1.5, 0.5);
  EXPECT_EQ(r.g.normalized(), phi.normalized());
  ASSERT_EQ(r.records.size(), 1u);
  EXPECT_DOUBLE_EQ(r.records[0].c, 2.0);
  EXPECT_DOUBLE_EQ(r.records[0].gamma, 0.5);

  const auto one = StepFunctionD::constant(2, 1.0);
  EXPECT_EQ(g_phi(one, 1.0, 0.3).g.normalized(), one);
}

TEST(GPhi, HandExampleOnRoot) {
  // A(phi, X) = [1/4, 3/4) with values 0 and 1: gamma = (Q / P^q)^2 = 1/4, c = 1.
  const auto phi = StepFunctionD::from_leaves(2, 2, {4.0, 0.0, 1.0, 3.0});
  const auto r = g_phi(phi, 2.0, 0.5);
  const GPhiRecord* root = nullptr;
  for (const auto& rec : r.records) {
    if (rec.element == root_node()) root = &rec;
  }
  ASSERT_NE(root, nullptr);
  EXPECT_NEAR(root->c, 1.0, 1e-12);
  EXPECT_NEAR(root->gamma, 0.25, 1e-12);
  EXPECT_DOUBLE_EQ(root->alpha, 0.5);
  EXPECT_NEAR(r.g.integral(), phi.integral(), 1e-12);
  EXPECT_NEAR(moments(r.g, 0.5).q_mass, moments(phi, 0.5).q_mass, 1e-12);
}

TEST(GPhi, ContractOnRandomFunctions) {
  std::mt19937_64 rng(8);
  for (int t = 0; t < 60; ++t) {
    const auto phi = random_step_function(rng, 2, 6);
    const double L = phi.integral() * 1.2;
    const auto r = g_phi(phi, L, 0.5);
    const auto a = moments(phi, 0.5);
    const auto b = moments(r.g, 0.5);
    EXPECT_NEAR(a.mass, b.mass, 1e-9);
    EXPECT_NEAR(a.q_mass, b.q_mass, 1e-9);
    expect_dominates(maximal_function(r.g), maximal_function(phi));
    for (const auto& rec : r.records) EXPECT_GE(rec.alpha, rec.gamma);
  }
}

TEST(GPhi, CoarseGridEitherWorksOrSaysSo) {
  std::mt19937_64 rng(13);
  int refused = 0;
  for (int t = 0; t < 40; ++t) {
    const auto phi = random_step_function(rng, 2, 4);
    GPhiOptions opts;
    opts.refine = 4;
    try {
      const auto r = g_phi(phi, phi.integral(), 0.5, opts);
      EXPECT_NEAR(r.g.integral(), phi.integral(), 1e-9);
    } catch (const RefinementTooCoarse&) {
      ++refused;
    }
  }
  EXPECT_GT(refused, 0);
}

TEST(GPhi, RejectsRefineBelowResolution) {
  const auto phi = StepFunctionD::from_leaves(2, 3, {1, 2, 3, 4, 5, 6, 7, 8});
  GPhiOptions opts;
  opts.refine = 2;
  EXPECT_THROW(g_phi(phi, 5.0, 0.5, opts), DomainError);
}
