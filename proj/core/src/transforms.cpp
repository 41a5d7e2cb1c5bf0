#include "bklab/transforms.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <string>

namespace bklab {

namespace {

int default_refine(int m) {
  int d = 0;
  std::int64_t p = 1;
  while (p <= (std::int64_t{1} << 50) / m) {
    p *= m;
    ++d;
  }
  return d;
}

struct Piece {
  std::int64_t start;
  std::int64_t end;
  double value;
};

}  // namespace

GPhiResult g_phi(const StepFunctionD& phi, double L, double q, const GPhiOptions& opts) {
  check_exponent(q);
  const int m = phi.branching();
  const int R = opts.refine < 0 ? default_refine(m) : opts.refine;
  if (R < phi.resolution()) {
    throw DomainError("g_phi: refinement depth is coarser than the function's breakpoints");
  }
  const std::int64_t grid = checked_power(m, R);
  const double grid_d = static_cast<double>(grid);

  const auto lin = linearize(phi);
  const std::size_t ncells = lin.cells.size();
  std::vector<std::int64_t> support_units(ncells, -1);  // -1: g = phi on the cell
  std::vector<double> support_value(ncells, 0.0);

  GPhiResult result;
  result.resolution = R;

  for (std::size_t i = 0; i < lin.elements.size(); ++i) {
    const auto& el = lin.elements[i];
    if (el.average < L) continue;
    const auto cells = lin.a_set(static_cast<int>(i));
    if (cells.empty()) continue;

    GPhiRecord rec;
    rec.element = el.node;
    rec.alpha = el.alpha;
    for (auto ci : cells) {
      const double mu = node_measure<double>(m, lin.cells[ci].node);
      rec.mass += lin.cells[ci].value * mu;
      rec.q_mass += std::pow(lin.cells[ci].value, q) * mu;
    }
    if (rec.mass <= 0.0) {
      for (auto ci : cells) support_units[ci] = 0;
      result.records.push_back(std::move(rec));
      continue;
    }
    const double gamma =
        std::min(rec.alpha, std::pow(rec.q_mass / std::pow(rec.mass, q), 1.0 / (1.0 - q)));
    const double c = rec.mass / gamma;

    // Blocks of A_I that every intermediate tree element is a union of: cells
    // grouped by the smallest element between I and a child of I in S_phi.
    std::set<Node> between;
    for (const auto& other : lin.elements) {
      if (other.star != static_cast<int>(i)) continue;
      for (Node up = parent(m, other.node); up != el.node; up = parent(m, up)) between.insert(up);
    }
    std::map<Node, std::vector<std::size_t>> atoms;
    for (auto ci : cells) {
      Node n = lin.cells[ci].node;
      while (n != el.node && !between.count(n)) n = parent(m, n);
      atoms[n].push_back(ci);
    }

    struct Atom {
      std::vector<std::size_t> cells;
      double cap = 0.0;
      double want = 0.0;
    };
    std::vector<Atom> blocks;
    double excess = 0.0;
    double room = 0.0;
    for (auto& [node, list] : atoms) {
      Atom a;
      a.cells = std::move(list);
      double mass = 0.0;
      for (auto ci : a.cells) {
        const double mu = node_measure<double>(m, lin.cells[ci].node);
        a.cap += mu;
        mass += lin.cells[ci].value * mu;
      }
      a.want = mass / c;
      if (a.want > a.cap) {
        excess += a.want - a.cap;
      } else {
        room += a.cap - a.want;
      }
      blocks.push_back(std::move(a));
    }
    // Water-fill whatever saturated blocks could not hold.
    rec.atom_masses_exact = excess <= 0.0;
    for (auto& a : blocks) {
      if (a.want >= a.cap) {
        a.want = a.cap;
      } else if (excess > 0.0 && room > 0.0) {
        a.want += excess * (a.cap - a.want) / room;
      }
    }

    std::int64_t total_units = 0;
    for (const auto& a : blocks) {
      std::int64_t cap_units = 0;
      for (auto ci : a.cells) {
        const auto [s, e] = node_span(m, lin.cells[ci].node, R);
        cap_units += e - s;
      }
      std::int64_t left = std::min(cap_units, static_cast<std::int64_t>(std::floor(a.want * grid_d)));
      total_units += left;
      for (auto ci : a.cells) {
        const auto [s, e] = node_span(m, lin.cells[ci].node, R);
        const std::int64_t take = std::min(left, e - s);
        support_units[ci] = take;
        left -= take;
      }
    }
    if (total_units == 0) {
      throw RefinementTooCoarse("g_phi: support of measure " + std::to_string(gamma) +
                                " is below the refinement grid");
    }
    rec.gamma = static_cast<double>(total_units) / grid_d;
    rec.c = rec.mass / rec.gamma;
    const double q_mass_g = std::pow(rec.c, q) * rec.gamma;
    if (std::abs(q_mass_g - rec.q_mass) > opts.q_tolerance * std::max(1.0, rec.q_mass)) {
      throw RefinementTooCoarse("g_phi: q-moment error " +
                                std::to_string(std::abs(q_mass_g - rec.q_mass)) +
                                " exceeds tolerance at the requested refinement");
    }
    for (auto ci : cells) {
      support_value[ci] = rec.c;
      if (support_units[ci] <= 0) continue;
      const std::int64_t s = node_span(m, lin.cells[ci].node, R).first;
      if (!rec.support.empty() && rec.support.back().second == s) {
        rec.support.back().second = s + support_units[ci];
      } else {
        rec.support.emplace_back(s, s + support_units[ci]);
      }
    }
    std::sort(rec.support.begin(), rec.support.end());
    result.records.push_back(std::move(rec));
  }

  std::vector<Piece> pieces;
  for (std::size_t ci = 0; ci < ncells; ++ci) {
    const auto [s, e] = node_span(m, lin.cells[ci].node, R);
    if (support_units[ci] < 0) {
      pieces.push_back({s, e, lin.cells[ci].value});
      continue;
    }
    const std::int64_t mid = s + support_units[ci];
    if (mid > s) pieces.push_back({s, mid, support_value[ci]});
    if (mid < e) pieces.push_back({mid, e, 0.0});
  }
  std::vector<std::int64_t> cuts{0};
  std::vector<double> values;
  for (const auto& p : pieces) {
    cuts.push_back(p.end);
    values.push_back(p.value);
  }
  result.g = StepFunctionD(m, R, std::move(cuts), std::move(values)).normalized();
  return result;
}

FamilyTerms family_terms(const Linearization<double>& lin, const StepFunctionD& phi,
                         std::span<const Node> family, double q, FamilyRule rule) {
  check_exponent(q);
  const int m = lin.m;
  require_disjoint(m, family);
  FamilyTerms t;
  t.q = q;
  t.f_q = std::pow(phi.integral(), q);
  for (const auto& n : family) {
    const int idx = lin.find(n);
    if (idx < 0) throw FamilyNotInSPhi("family element is not in S_phi");
    t.sum_mu_yq += node_measure<double>(m, n) *
                   std::pow(lin.elements[static_cast<std::size_t>(idx)].average, q);
  }
  if (rule == FamilyRule::maximal_in_s_phi) {
    for (const auto& e : lin.elements) {
      const bool hit = std::any_of(family.begin(), family.end(),
                                   [&](const Node& n) { return intersects(m, e.node, n); });
      if (!hit) throw FamilyNotMaximal("an element of S_phi misses the family's union");
    }
  }
  for (const auto& cell : lin.cells) {
    const double mu = node_measure<double>(m, cell.node);
    const double mq = std::pow(cell.maximal, q) * mu;
    const double pq = std::pow(cell.value, q) * mu;
    const bool inside = std::any_of(family.begin(), family.end(),
                                    [&](const Node& n) { return contains(m, n, cell.node); });
    if (inside) {
      t.inside_mq += mq;
      t.inside_phiq += pq;
    } else {
      t.outside_mq += mq;
      t.outside_phiq += pq;
    }
  }
  return t;
}

namespace {

InequalityGap finish(double lhs, double numerator, double q, double beta) {
  InequalityGap g;
  g.beta = beta;
  g.lhs = lhs;
  g.rhs = numerator / ((1.0 - q) * beta);
  g.slack = g.rhs - g.lhs;
  return g;
}

void check_beta(double beta) {
  if (!(beta > 0.0) || !std::isfinite(beta)) throw DomainError("beta must be positive");
}

}  // namespace

InequalityGap theorem41_from_terms(const FamilyTerms& t, double beta) {
  check_beta(beta);
  const double b1 = beta + 1.0;
  return finish(t.outside_mq, b1 * (t.f_q - t.sum_mu_yq) - std::pow(b1, t.q) * t.outside_phiq,
                t.q, beta);
}

InequalityGap theorem42_from_terms(const FamilyTerms& t, double beta) {
  check_beta(beta);
  const double b1 = beta + 1.0;
  return finish(t.inside_mq, b1 * t.sum_mu_yq - std::pow(b1, t.q) * t.inside_phiq, t.q, beta);
}

InequalityGap corollary41_from_terms(const FamilyTerms& t, double beta) {
  return theorem41_from_terms(t, beta);
}

InequalityGap theorem41_gap(const StepFunctionD& phi, std::span<const Node> family, double q,
                            double beta) {
  const auto lin = linearize(phi);
  return theorem41_from_terms(
      family_terms(lin, phi, family, q, FamilyRule::maximal_in_s_phi), beta);
}

InequalityGap theorem42_gap(const StepFunctionD& phi, std::span<const Node> family, double q,
                            double beta) {
  const auto lin = linearize(phi);
  return theorem42_from_terms(family_terms(lin, phi, family, q, FamilyRule::in_s_phi), beta);
}

InequalityGap corollary41_gap(const StepFunctionD& phi, std::span<const Node> family, double q,
                              double beta) {
  const auto lin = linearize(phi);
  return corollary41_from_terms(family_terms(lin, phi, family, q, FamilyRule::in_s_phi), beta);
}

double objective(const StepFunctionD& phi, double L, double q) {
  check_exponent(q);
  double total = 0.0;
  for (const auto& cell : maximal_cells(phi)) {
    total += std::pow(std::max(cell.maximal, L), q) * node_measure<double>(phi.branching(), cell.node);
  }
  return total;
}

EigenResidual eigen_residual(const StepFunctionD& phi, double L, const BellmanParams& params) {
  const double q = params.q;
  const double scale = std::pow(params.c, 1.0 / q);
  EigenResidual r;
  for (const auto& cell : maximal_cells(phi)) {
    const double mu = node_measure<double>(phi.branching(), cell.node);
    const double d = std::abs(std::max(cell.maximal, L) - scale * cell.value);
    const double term = std::pow(d, q) * mu;
    if (cell.maximal >= L) {
      r.on_excess += term;
    } else {
      r.off_excess += term;
    }
  }
  r.total = r.on_excess + r.off_excess;
  return r;
}

double young_gap(double t, double q) {
  check_exponent(q);
  if (!(t >= 0.0)) throw DomainError("young_gap requires t >= 0");
  return t + (1.0 - q) / q - std::pow(t, q) / q;
}

}  // namespace bklab
