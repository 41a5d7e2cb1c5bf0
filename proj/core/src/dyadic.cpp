#include "bklab/dyadic.hpp"

#include <cmath>

namespace bklab {

ExcessSet excess_set(const StepFunctionD& phi, double L, double q) {
  ExcessSet out;
  const int m = phi.branching();
  const auto phi_q = phi.map([q](double v) { return v > 0.0 ? std::pow(v, q) : 0.0; });
  std::vector<Node> stack{root_node()};
  while (!stack.empty()) {
    const Node n = stack.back();
    stack.pop_back();
    if (phi.average(n) >= L) {
      out.elements.push_back(n);
      continue;
    }
    if (phi.piece_containing(n)) continue;
    for (int c = m - 1; c >= 0; --c) stack.push_back({n.depth + 1, n.index * m + c});
  }
  for (const auto& n : out.elements) {
    out.k += node_measure<double>(m, n);
    out.B += phi.integral_over(n);
    out.A += phi_q.integral_over(n);
  }
  return out;
}

InequalityGap weak_type_gap(const StepFunctionD& phi, double lambda) {
  if (!(lambda > 0.0)) throw DomainError("weak type check requires lambda > 0");
  InequalityGap g;
  double mass = 0.0;
  for (const auto& c : maximal_cells(phi)) {
    if (c.maximal > lambda) {
      const double mu = node_measure<double>(phi.branching(), c.node);
      g.lhs += mu;
      mass += c.value * mu;
    }
  }
  g.rhs = mass / lambda;
  g.slack = g.rhs - g.lhs;
  return g;
}

void require_disjoint(int m, std::span<const Node> family) {
  for (std::size_t i = 0; i < family.size(); ++i) {
    for (std::size_t j = i + 1; j < family.size(); ++j) {
      if (intersects(m, family[i], family[j])) {
        throw DomainError("family elements are not pairwise disjoint");
      }
    }
  }
}

double integral_over(const StepFunctionD& g, std::span<const Node> nodes) {
  double total = 0.0;
  for (const auto& n : nodes) total += g.integral_over(n);
  return total;
}

InequalityGap kolmogorov_gap(const StepFunctionD& phi, std::span<const Node> E, double q) {
  if (!(q > 0.0 && q < 1.0)) throw DomainError("exponent q must lie in (0, 1)");
  const int m = phi.branching();
  require_disjoint(m, E);
  const auto mq = maximal_function(phi).map([q](double v) { return std::pow(v, q); });
  double measure = 0.0;
  for (const auto& n : E) measure += node_measure<double>(m, n);
  InequalityGap g;
  g.lhs = integral_over(mq, E);
  g.rhs = std::pow(measure, 1.0 - q) * std::pow(phi.integral(), q) / (1.0 - q);
  g.slack = g.rhs - g.lhs;
  return g;
}

DenseMaximal::DenseMaximal(int m, int depth)
    : m_(m), depth_(depth), n_(static_cast<std::size_t>(checked_power(m, depth))) {
  level_.resize(static_cast<std::size_t>(depth) + 1);
  for (int d = 0; d <= depth; ++d) {
    level_[static_cast<std::size_t>(d)].resize(static_cast<std::size_t>(checked_power(m, d)));
  }
  scratch_.resize(n_);
}

void DenseMaximal::evaluate(std::span<const double> leaves, std::span<double> out) {
  if (leaves.size() != n_ || out.size() != n_) {
    throw DomainError("DenseMaximal: expected m^depth leaf values");
  }
  const auto N = static_cast<std::size_t>(depth_);
  const auto m = static_cast<std::size_t>(m_);
  std::copy(leaves.begin(), leaves.end(), level_[N].begin());
  // Bottom-up sums.
  for (std::size_t d = N; d-- > 0;) {
    auto& up = level_[d];
    const auto& down = level_[d + 1];
    for (std::size_t i = 0; i < up.size(); ++i) {
      double s = 0.0;
      for (std::size_t c = 0; c < m; ++c) s += down[i * m + c];
      up[i] = s;
    }
  }
  // Sums to averages, then running max top-down.
  double width = static_cast<double>(n_);
  for (std::size_t d = 0; d <= N; ++d) {
    auto& lv = level_[d];
    for (auto& v : lv) v /= width;
    if (d > 0) {
      const auto& above = level_[d - 1];
      for (std::size_t i = 0; i < lv.size(); ++i) lv[i] = std::max(lv[i], above[i / m]);
    }
    width /= static_cast<double>(m);
  }
  std::copy(level_[N].begin(), level_[N].end(), out.begin());
}

double DenseMaximal::objective(std::span<const double> leaves, double L, double q) {
  evaluate(leaves, scratch_);
  const double Lq = std::pow(L, q);
  double total = 0.0;
  for (double v : scratch_) total += v > L ? std::pow(v, q) : Lq;
  return total / static_cast<double>(n_);
}

}  // namespace bklab
