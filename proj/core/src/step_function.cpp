#include "bklab/step_function.hpp"

#include <cmath>
#include <string>

namespace bklab {

std::int64_t checked_power(int m, int depth) {
  if (m < 2) throw DomainError("branching m must be >= 2");
  if (depth < 0) throw DomainError("depth must be nonnegative");
  std::int64_t p = 1;
  for (int i = 0; i < depth; ++i) {
    if (p > kMaxUnits / m) {
      throw DomainError("m^depth exceeds 2^53 (m=" + std::to_string(m) +
                        ", depth=" + std::to_string(depth) + ")");
    }
    p *= m;
  }
  return p;
}

int max_depth_for(int m) {
  if (m < 2) throw DomainError("branching m must be >= 2");
  int d = 0;
  std::int64_t p = 1;
  while (p <= kMaxUnits / m) {
    p *= m;
    ++d;
  }
  return d;
}

TreeSpec TreeSpec::make(int m, int depth) {
  if (m < 2) throw DomainError("tree branching m must be >= 2");
  if (depth < 1) throw DomainError("tree depth N must be >= 1");
  checked_power(m, depth);
  return TreeSpec{m, depth};
}

Node parent(int m, Node n) {
  if (n.depth == 0) throw DomainError("the root has no parent");
  return {n.depth - 1, n.index / m};
}

bool contains(int m, Node outer, Node inner) {
  if (outer.depth > inner.depth) return false;
  return inner.index / checked_power(m, inner.depth - outer.depth) == outer.index;
}

bool intersects(int m, Node a, Node b) { return contains(m, a, b) || contains(m, b, a); }

std::pair<std::int64_t, std::int64_t> node_span(int m, Node n, int resolution) {
  if (n.depth > resolution) throw DomainError("node_span: node deeper than resolution");
  const std::int64_t w = checked_power(m, resolution - n.depth);
  return {n.index * w, (n.index + 1) * w};
}

DyadicPoint reduce_point(int m, std::int64_t units, int resolution) {
  DyadicPoint p{units, resolution};
  while (p.den_pow > 0 && p.num % m == 0) {
    p.num /= m;
    --p.den_pow;
  }
  return p;
}

StepFunctionD to_double(const StepFunctionQ& phi) {
  return phi.map([](const Rational& v) { return static_cast<double>(v); });
}

StepFunctionQ to_rational(const StepFunctionD& phi) {
  return phi.map([](double v) { return Rational(v); });
}

Moments moments(const StepFunctionD& phi, double q) {
  Moments out;
  const auto cuts = phi.cuts();
  const auto values = phi.values();
  const double n = static_cast<double>(phi.units());
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double len = static_cast<double>(cuts[i + 1] - cuts[i]) / n;
    out.mass += values[i] * len;
    if (values[i] > 0.0) out.q_mass += std::pow(values[i], q) * len;
  }
  return out;
}

}  // namespace bklab
