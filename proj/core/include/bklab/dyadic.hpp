#pragma once

// Exact maximal operator on the m-adic tree and its linearization.
//
// A step function is traversed top-down. Elements that straddle a breakpoint
// ("split" elements) are averaged explicitly; an element that lies inside a
// single piece is a "cell": every descendant of a cell has the same average
// as the cell, so M_T phi is constant on it and equals the larger of the
// piece value and the split-ancestor averages.

#include <algorithm>
#include <cstdint>
#include <span>
#include <vector>

#include "bklab/errors.hpp"
#include "bklab/step_function.hpp"

namespace bklab {

template <typename T>
struct ChainLink {
  Node node;
  T average;
};

template <typename T>
struct Cell {
  Node node;
  std::size_t piece = 0;
  T value{};        // phi on the cell
  T maximal{};      // M_T phi on the cell
  Node attained{};  // I_phi(x): largest element whose average equals `maximal`
};

namespace detail {

template <typename T, typename OnSplit, typename OnCell>
void walk_tree(const StepFunction<T>& phi, Node n, std::vector<ChainLink<T>>& chain,
               OnSplit& on_split, OnCell& on_cell) {
  if (auto piece = phi.piece_containing(n)) {
    on_cell(n, *piece, std::span<const ChainLink<T>>(chain));
    return;
  }
  const T avg = phi.average(n);
  on_split(n, avg, std::span<const ChainLink<T>>(chain));
  chain.push_back({n, avg});
  const int m = phi.branching();
  for (int c = 0; c < m; ++c) {
    walk_tree(phi, Node{n.depth + 1, n.index * m + c}, chain, on_split, on_cell);
  }
  chain.pop_back();
}

}  // namespace detail

/// Visits every split element (with its ancestor chain) and every cell, left
/// to right.
template <typename T, typename OnSplit, typename OnCell>
void walk_tree(const StepFunction<T>& phi, OnSplit&& on_split, OnCell&& on_cell) {
  std::vector<ChainLink<T>> chain;
  detail::walk_tree(phi, root_node(), chain, on_split, on_cell);
}

/// Cells of phi with M_T phi and the attaining element, left to right.
template <typename T>
std::vector<Cell<T>> maximal_cells(const StepFunction<T>& phi) {
  std::vector<Cell<T>> cells;
  auto on_split = [](Node, const T&, std::span<const ChainLink<T>>) {};
  auto on_cell = [&](Node n, std::size_t piece, std::span<const ChainLink<T>> chain) {
    Cell<T> c;
    c.node = n;
    c.piece = piece;
    c.value = phi.values()[piece];
    c.maximal = c.value;
    for (const auto& link : chain) c.maximal = std::max(c.maximal, link.average);
    c.attained = n;
    // Shallowest element attaining the sup; the cell itself is the largest
    // element inside its piece.
    for (const auto& link : chain) {
      if (link.average == c.maximal) {
        c.attained = link.node;
        break;
      }
    }
    cells.push_back(std::move(c));
  };
  walk_tree(phi, on_split, on_cell);
  return cells;
}

/// M_T phi as a step function on the same grid as phi.
template <typename T>
StepFunction<T> maximal_function(const StepFunction<T>& phi) {
  const auto cells = maximal_cells(phi);
  std::vector<std::int64_t> cuts{0};
  std::vector<T> values;
  for (const auto& c : cells) {
    cuts.push_back(node_span(phi.branching(), c.node, phi.resolution()).second);
    values.push_back(c.maximal);
  }
  return StepFunction<T>(phi.branching(), phi.resolution(), std::move(cuts), std::move(values))
      .normalized();
}

template <typename T>
T average(const StepFunction<T>& phi, Node n) {
  return phi.average(n);
}

/// True iff at every cell M_T phi is attained by some element containing it.
template <typename T>
bool is_t_good(const StepFunction<T>& phi) {
  for (const auto& c : maximal_cells(phi)) {
    if (c.value == c.maximal) continue;
    if (c.attained == c.node) return false;
  }
  return true;
}

template <typename T>
struct SPhiElement {
  Node node;
  T average{};    // y_I
  T alpha{};      // mu(A(phi, I))
  int star = -1;  // index of I*, -1 for the root
};

/// S_phi, the sets A(phi, I) (as unions of cells), averages, weights and the
/// star map.
template <typename T>
struct Linearization {
  int m = 2;
  int resolution = 0;
  std::vector<SPhiElement<T>> elements;  // sorted by (depth, index); [0] is X
  std::vector<Cell<T>> cells;            // left to right, covering [0, 1)
  std::vector<int> owner;                // owner[i]: element whose A-set holds cells[i]

  int find(Node n) const {
    auto it = std::lower_bound(elements.begin(), elements.end(), n,
                               [](const SPhiElement<T>& e, Node key) { return e.node < key; });
    if (it == elements.end() || it->node != n) return -1;
    return static_cast<int>(it - elements.begin());
  }

  /// Cell indices making up A(phi, elements[i]).
  std::vector<std::size_t> a_set(int i) const {
    std::vector<std::size_t> out;
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (owner[c] == i) out.push_back(c);
    }
    return out;
  }
};

/// Direct construction via I_phi(x). Throws NotTGood if some cell's maximal
/// value is not attained.
template <typename T>
Linearization<T> linearize(const StepFunction<T>& phi) {
  Linearization<T> lin;
  lin.m = phi.branching();
  lin.resolution = phi.resolution();
  lin.cells = maximal_cells(phi);
  std::vector<Node> nodes{root_node()};
  for (const auto& c : lin.cells) {
    if (c.value != c.maximal && c.attained == c.node) {
      throw NotTGood("linearize: maximal value not attained on a cell");
    }
    nodes.push_back(c.attained);
  }
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
  lin.elements.reserve(nodes.size());
  for (const auto& n : nodes) {
    SPhiElement<T> e;
    e.node = n;
    e.average = phi.average(n);
    e.alpha = T(0);
    lin.elements.push_back(std::move(e));
  }
  lin.owner.resize(lin.cells.size());
  for (std::size_t i = 0; i < lin.cells.size(); ++i) {
    const int k = lin.find(lin.cells[i].attained);
    lin.owner[i] = k;
    lin.elements[static_cast<std::size_t>(k)].alpha += node_measure<T>(lin.m, lin.cells[i].node);
  }
  for (std::size_t i = 1; i < lin.elements.size(); ++i) {
    Node up = lin.elements[i].node;
    do {
      up = parent(lin.m, up);
      lin.elements[i].star = lin.find(up);
    } while (lin.elements[i].star < 0);
  }
  return lin;
}

/// S_phi through the ancestor criterion: I != X belongs to S_phi iff every
/// element properly containing I has a strictly smaller average.
template <typename T>
std::vector<Node> s_phi_by_criterion(const StepFunction<T>& phi) {
  std::vector<Node> out{root_node()};
  auto dominates = [](const T& value, std::span<const ChainLink<T>> chain) {
    return std::all_of(chain.begin(), chain.end(),
                       [&](const ChainLink<T>& link) { return link.average < value; });
  };
  auto on_split = [&](Node n, const T& avg, std::span<const ChainLink<T>> chain) {
    if (!chain.empty() && dominates(avg, chain)) out.push_back(n);
  };
  auto on_cell = [&](Node n, std::size_t piece, std::span<const ChainLink<T>> chain) {
    if (!chain.empty() && dominates(phi.values()[piece], chain)) out.push_back(n);
  };
  walk_tree(phi, on_split, on_cell);
  std::sort(out.begin(), out.end());
  return out;
}

/// Maximal elements with average >= L, and k = |E|, A = int_E phi^q,
/// B = int_E phi for their union E.
struct ExcessSet {
  std::vector<Node> elements;
  double k = 0.0;
  double A = 0.0;
  double B = 0.0;
};

ExcessSet excess_set(const StepFunctionD& phi, double L, double q);

struct InequalityGap {
  double lhs = 0.0;
  double rhs = 0.0;
  double beta = 0.0;
  double slack = 0.0;
};

/// |{M phi > lambda}| <= (1/lambda) int_{M phi > lambda} phi.
InequalityGap weak_type_gap(const StepFunctionD& phi, double lambda);

/// int_E (M phi)^q <= |E|^(1-q) (int phi)^q / (1-q) for a disjoint union E of
/// tree elements.
InequalityGap kolmogorov_gap(const StepFunctionD& phi, std::span<const Node> E, double q);

/// Throws DomainError unless the elements are pairwise disjoint.
void require_disjoint(int m, std::span<const Node> family);

/// Integral of g over a disjoint union of tree elements.
double integral_over(const StepFunctionD& g, std::span<const Node> nodes);

/// Dense evaluation of M_T on leaf values at a fixed depth, for inner loops.
class DenseMaximal {
 public:
  DenseMaximal(int m, int depth);

  int branching() const { return m_; }
  int depth() const { return depth_; }
  std::size_t size() const { return n_; }

  /// Writes M_T phi per leaf into `out`.
  void evaluate(std::span<const double> leaves, std::span<double> out);

  /// int max(M_T phi, L)^q over [0, 1).
  double objective(std::span<const double> leaves, double L, double q);

 private:
  int m_;
  int depth_;
  std::size_t n_;
  std::vector<std::vector<double>> level_;  // running max per level
  std::vector<double> scratch_;
};

}  // namespace bklab
