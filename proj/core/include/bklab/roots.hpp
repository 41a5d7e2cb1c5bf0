#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "bklab/errors.hpp"

namespace bklab {

struct BisectOptions {
  int max_iterations = 200;
  // Stop once hi - lo <= abs_tol + rel_tol * max(|lo|, |hi|). Zero tolerances
  // bisect down to adjacent doubles.
  double abs_tol = 0.0;
  double rel_tol = 0.0;
};

struct BisectResult {
  double root = 0.0;
  double residual = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  int iterations = 0;
};

/// Bisection for a continuous f on [lo, hi] with f(lo) and f(hi) of opposite
/// signs (zero at an end is accepted). Returns the bracket end with the
/// smaller residual. Throws ConvergenceError when the ends do not bracket a
/// sign change or the iteration cap is hit before the tolerance.
template <typename F>
BisectResult bisect(F&& f, double lo, double hi, const BisectOptions& opts = {},
                    const char* what = "bisection") {
  double f_lo = f(lo);
  double f_hi = f(hi);
  if (f_lo == 0.0) return {lo, 0.0, lo, lo, 0};
  if (f_hi == 0.0) return {hi, 0.0, hi, hi, 0};
  if (std::isnan(f_lo) || std::isnan(f_hi) || (f_lo > 0) == (f_hi > 0)) {
    throw ConvergenceError(std::string(what) + ": endpoints do not bracket a root",
                           lo, hi, f_lo, f_hi);
  }
  int it = 0;
  for (; it < opts.max_iterations; ++it) {
    const double width = hi - lo;
    if (width <= opts.abs_tol + opts.rel_tol * std::max(std::abs(lo), std::abs(hi))) break;
    const double mid = lo + 0.5 * width;
    if (mid <= lo || mid >= hi) break;  // adjacent doubles
    const double f_mid = f(mid);
    if (f_mid == 0.0) return {mid, 0.0, mid, mid, it + 1};
    if ((f_mid > 0) == (f_lo > 0)) {
      lo = mid;
      f_lo = f_mid;
    } else {
      hi = mid;
      f_hi = f_mid;
    }
  }
  if (it == opts.max_iterations) {
    const double width = hi - lo;
    const double mid = lo + 0.5 * width;
    const bool at_resolution = mid <= lo || mid >= hi;
    const bool within_tol =
        width <= opts.abs_tol + opts.rel_tol * std::max(std::abs(lo), std::abs(hi));
    if (!at_resolution && !within_tol) {
      throw ConvergenceError(std::string(what) + ": iteration cap reached", lo, hi,
                             f_lo, f_hi);
    }
  }
  if (std::abs(f_lo) <= std::abs(f_hi)) return {lo, f_lo, lo, hi, it};
  return {hi, f_hi, lo, hi, it};
}

}  // namespace bklab
