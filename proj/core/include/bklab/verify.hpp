#pragma once

// Randomized self-checks: generators for random tree step functions and
// families, and suites that count violations of the inequalities and
// identities the library relies on.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "bklab/dyadic.hpp"
#include "bklab/step_function.hpp"

namespace bklab {

/// Leaf-aligned random function at `depth`: some subtrees are constant, about
/// one value in seven is zero, the rest are log-normal.
StepFunctionD random_step_function(std::mt19937_64& rng, int m, int depth);

/// Same shape with small integer values, for exact rational checks.
StepFunctionQ random_rational_function(std::mt19937_64& rng, int m, int depth);

/// Random family of pairwise disjoint S_phi elements that is maximal in S_phi
/// (a random cut through the S_phi tree).
template <typename T>
std::vector<Node> random_maximal_family(const Linearization<T>& lin, std::mt19937_64& rng);

/// Keeps each element of `family` with probability 1/2.
std::vector<Node> random_subfamily(const std::vector<Node>& family, std::mt19937_64& rng);

/// `count` log-spaced points on [lo, hi].
std::vector<double> log_grid(double lo, double hi, int count);

struct GapRow {
  std::string inequality;
  std::int64_t phi_id = 0;
  std::int64_t family_id = 0;
  double beta = 0.0;
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;
};

struct SuiteSummary {
  std::string suite;
  std::int64_t cases = 0;
  std::int64_t checks = 0;
  std::int64_t violations = 0;
  double worst_slack = 0.0;
  std::vector<std::string> messages;  // first few violations
};

struct SuiteOptions {
  std::int64_t count = 1000;
  std::uint64_t seed = 7;
  int m = 2;
  int depth = 6;
  double tolerance = 1e-12;
  int beta_points = 50;
  std::vector<GapRow>* rows = nullptr;  // filled when set (inequalities suite)
};

SuiteSummary verify_inequalities(const SuiteOptions& opts);
SuiteSummary verify_kernel(const SuiteOptions& opts);
SuiteSummary verify_linearization(const SuiteOptions& opts);
SuiteSummary verify_gphi(const SuiteOptions& opts);

/// One of "inequalities", "kernel", "linearization", "gphi". Throws
/// DomainError for anything else.
SuiteSummary run_suite(const std::string& name, const SuiteOptions& opts);

// ---------------------------------------------------------------------------

template <typename T>
std::vector<Node> random_maximal_family(const Linearization<T>& lin, std::mt19937_64& rng) {
  std::vector<std::vector<int>> kids(lin.elements.size());
  for (std::size_t i = 1; i < lin.elements.size(); ++i) {
    kids[static_cast<std::size_t>(lin.elements[i].star)].push_back(static_cast<int>(i));
  }
  std::bernoulli_distribution stop(0.35);
  std::vector<Node> out;
  std::vector<int> stack{0};
  while (!stack.empty()) {
    const int i = stack.back();
    stack.pop_back();
    const auto& ks = kids[static_cast<std::size_t>(i)];
    if (ks.empty() || stop(rng)) {
      out.push_back(lin.elements[static_cast<std::size_t>(i)].node);
      continue;
    }
    stack.insert(stack.end(), ks.begin(), ks.end());
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace bklab
