#pragma once

// Numerical maximization of int max(M_T phi, L)^q over leaf-constant step
// functions with prescribed int phi = f and int phi^q = h. The Bellman value
// h*c is a certified upper bound, so the gap to it measures quality.

#include <cstdint>
#include <optional>
#include <vector>

#include "bklab/dyadic.hpp"
#include "bklab/kernel.hpp"
#include "bklab/step_function.hpp"
#include "bklab/transforms.hpp"

namespace bklab {

struct SearchReport {
  BellmanParams params;
  int m = 2;
  int depth = 1;
  StepFunctionD best_phi;
  double objective = 0.0;
  double bound = 0.0;      // h * c
  double gap = 0.0;        // bound - objective
  double gap_ratio = 0.0;  // gap / bound
  EigenResidual residual;
  double k = 0.0;  // |E|
  double A = 0.0;  // int_E phi^q
  double B = 0.0;  // int_E phi
  Moments moments;
  std::int64_t iterations = 0;
  std::int64_t accepted = 0;
  std::uint64_t seed = 0;
  int best_restart = 0;
};

/// Builds the report for a given phi (objective, bound, residual, excess set).
SearchReport make_report(const BellmanParams& params, const StepFunctionD& phi,
                         std::int64_t iterations, std::uint64_t seed);

/// Moment repair phi -> a * phi^b with int = f and int ^q = h (mean over
/// leaves). Throws InfeasibleStart when no b >= 0 reaches h.
std::vector<double> repair_moments(const std::vector<double>& leaves, double f, double h,
                                   double q);

/// Smallest q-moment a depth-N function with mean f can have: f^q n^(q-1).
double min_feasible_h(double f, double q, std::int64_t leaves);

struct SearchOptions {
  int restarts = 16;
  // 0 means BKLAB_THREADS if set, else the hardware concurrency.
  int threads = 0;
};

/// Multi-start three-cell local search at depth tree.depth. `budget` is the
/// number of proposed moves per restart. Deterministic for fixed inputs.
SearchReport local_search(const BellmanParams& params, const TreeSpec& tree, std::uint64_t seed,
                          std::int64_t budget, const SearchOptions& opts = {});

struct OracleOptions {
  int grid_size = 12;  // 0 plus grid_size - 1 geometric values
  double ratio = 1.5;  // geometric step of the value grid
  // Accept candidates with |int phi^q - h| <= tolerance; negative means 1e-2 * h.
  double tolerance = -1.0;
  // Refuse enumerations with more candidates than this.
  double max_candidates = 5e7;
};

/// Exhaustive search over quantized functions (up to tree symmetries), each
/// rescaled to mass f; the best candidate within tolerance of h is
/// moment-repaired and reported. Throws ComplexityGuard when m^N > 16,
/// grid_size > 12 or the candidate count is too large.
SearchReport brute_force_oracle(const BellmanParams& params, const TreeSpec& tree,
                                const OracleOptions& opts = {});

struct StudyRow {
  int depth = 0;
  double objective = 0.0;
  double bound = 0.0;
  double gap = 0.0;
  double residual = 0.0;
  double k = 0.0;
  double b_over_k = 0.0;
};

struct StudyResult {
  std::vector<SearchReport> reports;
  std::vector<StudyRow> rows;
  std::optional<double> k0;  // limit of the k column
  double L = 0.0;            // limit of the B/k column
  // Trend checks with 10% slack, and their strict versions.
  bool gap_nonincreasing = true;
  bool residual_nonincreasing = true;
  bool gap_strictly_nonincreasing = true;
  bool residual_strictly_nonincreasing = true;
};

StudyResult convergence_study(const BellmanParams& params, int m, const std::vector<int>& depths,
                              std::uint64_t seed, std::int64_t budget,
                              const SearchOptions& opts = {});

}  // namespace bklab
