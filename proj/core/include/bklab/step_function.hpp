#pragma once

// Nonnegative step functions on [0, 1) whose breakpoints are m-adic
// rationals, and the m-adic interval tree they live on.

#include <algorithm>
#include <compare>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "bklab/errors.hpp"

namespace bklab {

using Rational = boost::multiprecision::cpp_rational;

/// Largest power m^d we allow; keeps every breakpoint numerator exact as a
/// double as well as an int64.
inline constexpr std::int64_t kMaxUnits = std::int64_t{1} << 53;

std::int64_t checked_power(int m, int depth);
int max_depth_for(int m);

/// m-adic tree on [0, 1) truncated at a maximum depth.
struct TreeSpec {
  int m = 2;
  int depth = 1;

  static TreeSpec make(int m, int depth);
  std::int64_t leaves() const { return checked_power(m, depth); }
};

/// Tree element [index / m^depth, (index + 1) / m^depth).
struct Node {
  int depth = 0;
  std::int64_t index = 0;

  friend auto operator<=>(const Node&, const Node&) = default;
};

inline Node root_node() { return {0, 0}; }

Node parent(int m, Node n);
/// True when `outer` contains `inner` (not necessarily properly).
bool contains(int m, Node outer, Node inner);
/// Two tree elements intersect iff one contains the other.
bool intersects(int m, Node a, Node b);
/// Node span [first, last) in units of m^-resolution; requires depth <= resolution.
std::pair<std::int64_t, std::int64_t> node_span(int m, Node n, int resolution);

template <typename T>
T node_measure(int m, Node n) {
  return T(1) / T(checked_power(m, n.depth));
}

/// A breakpoint num / m^den_pow in lowest terms.
struct DyadicPoint {
  std::int64_t num = 0;
  int den_pow = 0;

  friend bool operator==(const DyadicPoint&, const DyadicPoint&) = default;
};

DyadicPoint reduce_point(int m, std::int64_t units, int resolution);

/// Step function with cuts 0 = c_0 < c_1 < ... < c_P = m^R (in units of
/// m^-R) and value v_i on [c_i, c_{i+1}). Values are nonnegative.
template <typename T>
class StepFunction {
 public:
  StepFunction() : StepFunction(2, 0, {0, 1}, {T(0)}) {}

  StepFunction(int m, int resolution, std::vector<std::int64_t> cuts, std::vector<T> values)
      : m_(m), resolution_(resolution), cuts_(std::move(cuts)), values_(std::move(values)) {
    validate();
    build_prefix();
  }

  static StepFunction constant(int m, T value) { return StepFunction(m, 0, {0, 1}, {value}); }

  /// Function constant on each depth-`depth` tree element.
  static StepFunction from_leaves(int m, int depth, std::vector<T> leaf_values) {
    const std::int64_t n = checked_power(m, depth);
    if (static_cast<std::int64_t>(leaf_values.size()) != n) {
      throw DomainError("from_leaves: expected m^depth leaf values");
    }
    std::vector<std::int64_t> cuts(static_cast<std::size_t>(n) + 1);
    for (std::int64_t i = 0; i <= n; ++i) cuts[static_cast<std::size_t>(i)] = i;
    return StepFunction(m, depth, std::move(cuts), std::move(leaf_values));
  }

  int branching() const { return m_; }
  int resolution() const { return resolution_; }
  std::int64_t units() const { return cuts_.back(); }
  std::size_t piece_count() const { return values_.size(); }
  std::span<const std::int64_t> cuts() const { return cuts_; }
  std::span<const T> values() const { return values_; }

  T length(std::size_t i) const { return T(cuts_[i + 1] - cuts_[i]) / T(units()); }

  /// Integral over [a, b) given in units of m^-R.
  T integral_units(std::int64_t a, std::int64_t b) const {
    if (b <= a) return T(0);
    return (partial(b) - partial(a)) / T(units());
  }

  T integral() const { return prefix_.back() / T(units()); }

  T integral_over(Node n) const {
    if (n.depth > resolution_) {
      const auto piece = piece_at_units(start_units(n));
      return values_[piece] * node_measure<T>(m_, n);
    }
    const auto [a, b] = node_span(m_, n, resolution_);
    return integral_units(a, b);
  }

  T average(Node n) const { return integral_over(n) / node_measure<T>(m_, n); }

  /// Index of the piece containing the unit cell starting at `u`.
  std::size_t piece_at_units(std::int64_t u) const {
    auto it = std::upper_bound(cuts_.begin(), cuts_.end(), u);
    return static_cast<std::size_t>(it - cuts_.begin()) - 1;
  }

  /// The piece that contains the whole element, if any.
  std::optional<std::size_t> piece_containing(Node n) const {
    if (n.depth >= resolution_) return piece_at_units(start_units(n));
    const auto [a, b] = node_span(m_, n, resolution_);
    const auto i = piece_at_units(a);
    if (cuts_[i + 1] >= b) return i;
    return std::nullopt;
  }

  /// Same function with cuts expressed at a finer resolution.
  StepFunction refined_to(int resolution) const {
    if (resolution < resolution_) throw DomainError("refined_to: cannot coarsen");
    const std::int64_t scale = checked_power(m_, resolution - resolution_);
    checked_power(m_, resolution);
    std::vector<std::int64_t> cuts(cuts_.size());
    std::transform(cuts_.begin(), cuts_.end(), cuts.begin(),
                   [scale](std::int64_t c) { return c * scale; });
    return StepFunction(m_, resolution, std::move(cuts), values_);
  }

  /// Leaf values at `depth`; requires every cut to lie on that grid.
  std::vector<T> leaf_values(int depth) const {
    const std::int64_t n = checked_power(m_, depth);
    std::vector<T> out(static_cast<std::size_t>(n));
    if (depth >= resolution_) {
      const std::int64_t scale = checked_power(m_, depth - resolution_);
      for (std::size_t i = 0; i < values_.size(); ++i) {
        for (std::int64_t u = cuts_[i] * scale; u < cuts_[i + 1] * scale; ++u) {
          out[static_cast<std::size_t>(u)] = values_[i];
        }
      }
      return out;
    }
    const std::int64_t scale = checked_power(m_, resolution_ - depth);
    for (std::int64_t leaf = 0; leaf < n; ++leaf) {
      const auto i = piece_at_units(leaf * scale);
      if (cuts_[i + 1] < (leaf + 1) * scale) {
        throw DomainError("leaf_values: function has breakpoints below the requested depth");
      }
      out[static_cast<std::size_t>(leaf)] = values_[i];
    }
    return out;
  }

  /// Merges adjacent pieces with equal values and drops unused resolution.
  StepFunction normalized() const {
    std::vector<std::int64_t> cuts{0};
    std::vector<T> values;
    for (std::size_t i = 0; i < values_.size(); ++i) {
      if (!values.empty() && values.back() == values_[i]) {
        cuts.back() = cuts_[i + 1];
      } else {
        values.push_back(values_[i]);
        cuts.push_back(cuts_[i + 1]);
      }
    }
    int res = resolution_;
    while (res > 0 && std::all_of(cuts.begin(), cuts.end(),
                                  [this](std::int64_t c) { return c % m_ == 0; })) {
      for (auto& c : cuts) c /= m_;
      --res;
    }
    return StepFunction(m_, res, std::move(cuts), std::move(values));
  }

  template <typename Fn>
  auto map(Fn&& fn) const {
    using U = decltype(fn(values_.front()));
    std::vector<U> out;
    out.reserve(values_.size());
    for (const auto& v : values_) out.push_back(fn(v));
    return StepFunction<U>(m_, resolution_, cuts_, std::move(out));
  }

  DyadicPoint cut_point(std::size_t i) const { return reduce_point(m_, cuts_[i], resolution_); }

  friend bool operator==(const StepFunction& a, const StepFunction& b) {
    return a.m_ == b.m_ && a.resolution_ == b.resolution_ && a.cuts_ == b.cuts_ &&
           a.values_ == b.values_;
  }

 private:
  std::int64_t start_units(Node n) const {
    if (n.depth <= resolution_) return n.index * checked_power(m_, resolution_ - n.depth);
    return n.index / checked_power(m_, n.depth - resolution_);
  }

  // Integral of value * units over [0, u).
  T partial(std::int64_t u) const {
    if (u >= units()) return prefix_.back();
    const auto i = piece_at_units(u);
    return prefix_[i] + values_[i] * T(u - cuts_[i]);
  }

  void validate() const {
    if (m_ < 2) throw DomainError("StepFunction: branching must be >= 2");
    const std::int64_t n = checked_power(m_, resolution_);
    if (cuts_.size() < 2 || cuts_.size() != values_.size() + 1) {
      throw DomainError("StepFunction: need one value per piece");
    }
    if (cuts_.front() != 0 || cuts_.back() != n) {
      throw DomainError("StepFunction: breakpoints must start at 0 and end at 1");
    }
    for (std::size_t i = 0; i + 1 < cuts_.size(); ++i) {
      if (cuts_[i] >= cuts_[i + 1]) {
        throw DomainError("StepFunction: breakpoints must be strictly increasing");
      }
    }
    for (const auto& v : values_) {
      if (!(v >= T(0))) throw DomainError("StepFunction: values must be nonnegative");
    }
  }

  void build_prefix() {
    prefix_.assign(values_.size() + 1, T(0));
    for (std::size_t i = 0; i < values_.size(); ++i) {
      prefix_[i + 1] = prefix_[i] + values_[i] * T(cuts_[i + 1] - cuts_[i]);
    }
  }

  int m_;
  int resolution_;
  std::vector<std::int64_t> cuts_;
  std::vector<T> values_;
  std::vector<T> prefix_;
};

/// Walks the common refinement of a and b, calling fn(start, end, va, vb) with
/// [start, end) in units of m^-R, R the finer of the two resolutions. Returns R.
template <typename T, typename U, typename Fn>
int for_each_common_piece(const StepFunction<T>& a, const StepFunction<U>& b, Fn&& fn) {
  if (a.branching() != b.branching()) throw DomainError("step functions on different trees");
  const int R = std::max(a.resolution(), b.resolution());
  const auto ra = a.refined_to(R);
  const auto rb = b.refined_to(R);
  const auto ca = ra.cuts();
  const auto cb = rb.cuts();
  std::size_t i = 0;
  std::size_t j = 0;
  std::int64_t pos = 0;
  while (i + 1 < ca.size() && j + 1 < cb.size()) {
    const std::int64_t end = std::min(ca[i + 1], cb[j + 1]);
    fn(pos, end, ra.values()[i], rb.values()[j]);
    pos = end;
    if (ca[i + 1] == end) ++i;
    if (cb[j + 1] == end) ++j;
  }
  return R;
}

using StepFunctionD = StepFunction<double>;
using StepFunctionQ = StepFunction<Rational>;

StepFunctionD to_double(const StepFunctionQ& phi);
StepFunctionQ to_rational(const StepFunctionD& phi);

struct Moments {
  double mass = 0.0;    // integral of phi
  double q_mass = 0.0;  // integral of phi^q
};

Moments moments(const StepFunctionD& phi, double q);

}  // namespace bklab
