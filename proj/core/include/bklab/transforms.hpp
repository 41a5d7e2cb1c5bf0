#pragma once

// Transforms and inequality evaluators built on the linearization: the
// two-valued g_phi transform, the three family inequalities for the tree
// maximal operator, the objective int max(M_T phi, L)^q and the eigenfunction
// residual.

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "bklab/dyadic.hpp"
#include "bklab/kernel.hpp"
#include "bklab/step_function.hpp"

namespace bklab {

struct GPhiOptions {
  // Grid depth for the supports; -1 picks the deepest grid with m^depth <= 2^50.
  int refine = -1;
  // Allowed |int_{A_I} g^q - int_{A_I} phi^q| per set, relative to max(1, int phi^q).
  double q_tolerance = 1e-10;
};

/// Per-set data of g_phi on A(phi, I).
struct GPhiRecord {
  Node element;
  double c = 0.0;      // the positive value of g on its support
  double gamma = 0.0;  // measure of the realized support
  double alpha = 0.0;  // mu(A(phi, I))
  double mass = 0.0;   // int_{A_I} phi
  double q_mass = 0.0; // int_{A_I} phi^q
  // Support as [start, end) in units of m^-resolution.
  std::vector<std::pair<std::int64_t, std::int64_t>> support;
  // False when some sub-block of A_I had average above c, so its mass could
  // not be kept exactly.
  bool atom_masses_exact = true;
};

struct GPhiResult {
  StepFunctionD g;
  int resolution = 0;
  std::vector<GPhiRecord> records;
};

/// Replaces phi on every A(phi, I) with I in S_phi, Av_I(phi) >= L, by a
/// function taking one positive value c_I and 0, with the same first and
/// q-th moments. Left untouched elsewhere. Throws NotTGood,
/// RefinementTooCoarse.
GPhiResult g_phi(const StepFunctionD& phi, double L, double q, const GPhiOptions& opts = {});

/// Which hypothesis a family must satisfy.
enum class FamilyRule { in_s_phi, maximal_in_s_phi };

/// Beta-independent ingredients of the three family inequalities.
struct FamilyTerms {
  double q = 0.5;
  double f_q = 0.0;         // (int phi)^q
  double sum_mu_yq = 0.0;   // sum mu(I_j) y_{I_j}^q
  double inside_mq = 0.0;   // int over the union of (M_T phi)^q
  double inside_phiq = 0.0; // int over the union of phi^q
  double outside_mq = 0.0;
  double outside_phiq = 0.0;
};

/// Validates the family (pairwise disjoint, in S_phi, optionally maximal) and
/// integrates the terms. Throws FamilyNotInSPhi, FamilyNotMaximal, DomainError.
FamilyTerms family_terms(const Linearization<double>& lin, const StepFunctionD& phi,
                         std::span<const Node> family, double q, FamilyRule rule);

InequalityGap theorem41_from_terms(const FamilyTerms& t, double beta);
InequalityGap theorem42_from_terms(const FamilyTerms& t, double beta);
// Same right side as theorem41, without the maximality hypothesis.
InequalityGap corollary41_from_terms(const FamilyTerms& t, double beta);

InequalityGap theorem41_gap(const StepFunctionD& phi, std::span<const Node> family, double q,
                            double beta);
InequalityGap theorem42_gap(const StepFunctionD& phi, std::span<const Node> family, double q,
                            double beta);
InequalityGap corollary41_gap(const StepFunctionD& phi, std::span<const Node> family, double q,
                              double beta);

/// int max(M_T phi, L)^q.
double objective(const StepFunctionD& phi, double L, double q);

struct EigenResidual {
  double total = 0.0;
  double on_excess = 0.0;   // over {M_T phi >= L}
  double off_excess = 0.0;  // over the complement
};

/// int |max(M_T phi, L) - c^(1/q) phi|^q with c = params.c.
EigenResidual eigen_residual(const StepFunctionD& phi, double L, const BellmanParams& params);

/// t + (1-q)/q - t^q/q, nonnegative with a zero only at t = 1.
double young_gap(double t, double q);

}  // namespace bklab
