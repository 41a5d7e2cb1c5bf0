#include "bklab/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "bklab/kernel.hpp"
#include "bklab/transforms.hpp"

namespace bklab {

namespace {

template <typename T, typename Draw>
void fill_subtree(std::vector<T>& leaves, std::int64_t first, std::int64_t width, int m,
                  bool top, std::mt19937_64& rng, Draw& draw) {
  std::bernoulli_distribution flat(0.25);
  if (width == 1 || (!top && flat(rng))) {
    const T v = draw();
    for (std::int64_t i = 0; i < width; ++i) leaves[static_cast<std::size_t>(first + i)] = v;
    return;
  }
  const std::int64_t w = width / m;
  for (int c = 0; c < m; ++c) fill_subtree(leaves, first + c * w, w, m, false, rng, draw);
}

class Tally {
 public:
  explicit Tally(std::string name) { s_.suite = std::move(name); s_.worst_slack = std::numeric_limits<double>::infinity(); }

  void check(bool ok, const std::string& what) {
    ++s_.checks;
    if (!ok) fail(what);
  }

  void slack(double value, double tol, const std::string& what) {
    ++s_.checks;
    s_.worst_slack = std::min(s_.worst_slack, value);
    if (!(value >= -tol)) {
      std::ostringstream os;
      os.precision(17);
      os << what << " (slack " << value << ")";
      fail(os.str());
    }
  }

  void next_case() { ++s_.cases; }
  SuiteSummary done() {
    if (!std::isfinite(s_.worst_slack)) s_.worst_slack = 0.0;
    return s_;
  }

 private:
  void fail(const std::string& what) {
    ++s_.violations;
    if (s_.messages.size() < 10) s_.messages.push_back(what);
  }
  SuiteSummary s_;
};

std::string tag(const char* what, std::int64_t id) { return std::string(what) + " #" + std::to_string(id); }

}  // namespace

StepFunctionD random_step_function(std::mt19937_64& rng, int m, int depth) {
  const std::int64_t n = checked_power(m, depth);
  std::vector<double> leaves(static_cast<std::size_t>(n));
  std::bernoulli_distribution zero(1.0 / 7.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  auto draw = [&] { return zero(rng) ? 0.0 : std::exp(normal(rng)); };
  fill_subtree(leaves, 0, n, m, true, rng, draw);
  if (std::all_of(leaves.begin(), leaves.end(), [](double v) { return v == 0.0; })) leaves[0] = 1.0;
  return StepFunctionD::from_leaves(m, depth, std::move(leaves)).normalized();
}

StepFunctionQ random_rational_function(std::mt19937_64& rng, int m, int depth) {
  const std::int64_t n = checked_power(m, depth);
  std::vector<Rational> leaves(static_cast<std::size_t>(n));
  std::uniform_int_distribution<int> digit(0, 9);
  auto draw = [&] { return Rational(digit(rng)); };
  fill_subtree(leaves, 0, n, m, true, rng, draw);
  return StepFunctionQ::from_leaves(m, depth, std::move(leaves)).normalized();
}

std::vector<Node> random_subfamily(const std::vector<Node>& family, std::mt19937_64& rng) {
  std::bernoulli_distribution keep(0.5);
  std::vector<Node> out;
  for (const auto& n : family) {
    if (keep(rng)) out.push_back(n);
  }
  return out;
}

std::vector<double> log_grid(double lo, double hi, int count) {
  if (!(lo > 0.0) || !(hi >= lo) || count < 1) throw DomainError("log_grid: need 0 < lo <= hi");
  std::vector<double> out(static_cast<std::size_t>(count));
  if (count == 1) {
    out[0] = lo;
    return out;
  }
  const double a = std::log(lo);
  const double step = (std::log(hi) - a) / (count - 1);
  for (int i = 0; i < count; ++i) out[static_cast<std::size_t>(i)] = std::exp(a + step * i);
  out.back() = hi;
  return out;
}

SuiteSummary verify_inequalities(const SuiteOptions& opts) {
  Tally tally("inequalities");
  std::mt19937_64 rng(opts.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const auto betas = log_grid(1e-3, 1e3, opts.beta_points);
  const std::int64_t leaves = checked_power(opts.m, opts.depth);
  std::int64_t family_id = 0;
  auto record = [&](const char* name, std::int64_t phi_id, std::int64_t fam, const InequalityGap& g) {
    if (opts.rows) opts.rows->push_back({name, phi_id, fam, g.beta, g.lhs, g.rhs, g.slack});
  };

  for (std::int64_t id = 0; id < opts.count; ++id) {
    tally.next_case();
    const auto phi = random_step_function(rng, opts.m, opts.depth);
    const double q = 0.05 + 0.9 * unit(rng);
    const auto lin = linearize(phi);
    tally.check(is_t_good(phi), tag("T-good", id));

    const auto maximal = random_maximal_family(lin, rng);
    const auto sub = random_subfamily(maximal, rng);
    const auto t_max = family_terms(lin, phi, maximal, q, FamilyRule::maximal_in_s_phi);
    const auto t_sub = family_terms(lin, phi, sub, q, FamilyRule::in_s_phi);
    const std::int64_t fam_max = family_id++;
    const std::int64_t fam_sub = family_id++;
    for (double beta : betas) {
      const auto g41 = theorem41_from_terms(t_max, beta);
      const auto g42 = theorem42_from_terms(t_sub, beta);
      const auto c41 = corollary41_from_terms(t_sub, beta);
      tally.slack(g41.slack, opts.tolerance, tag("theorem41", id));
      tally.slack(g42.slack, opts.tolerance, tag("theorem42", id));
      tally.slack(c41.slack, opts.tolerance, tag("corollary41", id));
      record("theorem41", id, fam_max, g41);
      record("theorem42", id, fam_sub, g42);
      record("corollary41", id, fam_sub, c41);
    }

    // Weak type on a lambda grid spanning the range of M_T phi.
    const auto M = maximal_function(phi);
    const auto mv = M.values();
    const double top = *std::max_element(mv.begin(), mv.end());
    for (double t : log_grid(0.05, 1.2, 20)) {
      const auto g = weak_type_gap(phi, t * top);
      tally.slack(g.slack, opts.tolerance, tag("weak type", id));
    }

    // Kolmogorov on a random union of leaves.
    std::vector<Node> E;
    for (std::int64_t leaf = 0; leaf < leaves; ++leaf) {
      if (unit(rng) < 0.4) E.push_back({opts.depth, leaf});
    }
    const auto gk = kolmogorov_gap(phi, E, q);
    tally.slack(gk.slack, opts.tolerance, tag("kolmogorov", id));

    // Pointwise facts about M_T phi.
    const double f = phi.integral();
    for_each_common_piece(phi, M, [&](std::int64_t, std::int64_t, double v, double mval) {
      tally.check(mval >= v, tag("M >= phi", id));
      tally.check(mval >= f * (1.0 - 1e-15), tag("M >= Av_X", id));
    });
  }
  return tally.done();
}

SuiteSummary verify_kernel(const SuiteOptions& opts) {
  Tally tally("kernel");
  std::mt19937_64 rng(opts.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double tol = 1e-9;

  // Shape checks on a 500-point grid of [1, 100].
  for (double q : {0.2, 0.5, 0.8}) {
    tally.next_case();
    std::vector<double> z(500);
    std::vector<double> w(500);
    for (int i = 0; i < 500; ++i) {
      z[static_cast<std::size_t>(i)] = 1.0 + 99.0 * i / 499.0;
      w[static_cast<std::size_t>(i)] = omega_q(z[static_cast<std::size_t>(i)], q);
    }
    for (std::size_t i = 0; i < 500; ++i) {
      if (i > 0) {
        tally.check(w[i] > w[i - 1], "omega_q increasing");
        tally.check(w[i] / z[i] > w[i - 1] / z[i - 1], "U_q increasing");
      }
      if (i > 0 && i + 1 < 500) {
        tally.check(w[i] > 0.5 * (w[i - 1] + w[i + 1]), "omega_q midpoint concave");
      }
      const double back = h_q(std::pow(w[i], 1.0 / q), q);
      tally.check(std::abs(back - z[i]) <= 1e-12 * std::max(1.0, z[i]), "omega_q roundtrip");
    }
  }

  for (std::int64_t id = 0; id < opts.count; ++id) {
    tally.next_case();
    const double q = 0.1 + 0.8 * unit(rng);
    const double lambda = 1.0 + 2.0 * unit(rng) + 1e-3;
    const double mu = 1.0 + 2.0 * unit(rng) + 1e-3;
    const double k = k0(lambda, mu, q);
    tally.check(k > 0.0 && k < 1.0 / mu, tag("k0 in (0, 1/mu)", id));
    tally.check(std::abs(sigma_q(k, mu, q) - lambda) <= tol * lambda, tag("sigma(k0, mu) = lambda", id));
    tally.check(std::abs(chi_lambda(lambda, k, q) - mu) <= 1e-8 * mu, tag("chi(lambda, k0) = mu", id));
    const double t = 3.0 * unit(rng);
    tally.slack(young_gap(t, q), 1e-15, tag("t + (1-q)/q >= t^q/q", id));
  }
  return tally.done();
}

SuiteSummary verify_linearization(const SuiteOptions& opts) {
  Tally tally("linearization");
  std::mt19937_64 rng(opts.seed);
  const int m = opts.m;
  for (std::int64_t id = 0; id < opts.count; ++id) {
    tally.next_case();
    const auto phi = random_rational_function(rng, m, opts.depth);
    const auto lin = linearize(phi);

    // Weight identity: alpha_I = mu(I) - sum over J with J* = I of mu(J).
    std::vector<Rational> expected(lin.elements.size());
    for (std::size_t i = 0; i < lin.elements.size(); ++i) {
      expected[i] = node_measure<Rational>(m, lin.elements[i].node);
    }
    for (std::size_t i = 1; i < lin.elements.size(); ++i) {
      expected[static_cast<std::size_t>(lin.elements[i].star)] -=
          node_measure<Rational>(m, lin.elements[i].node);
    }
    for (std::size_t i = 0; i < lin.elements.size(); ++i) {
      tally.check(lin.elements[i].alpha == expected[i], tag("weight identity", id));
      if (i > 0) tally.check(lin.elements[i].alpha > 0, tag("alpha > 0 on S_phi", id));
    }

    // Reconstruction against a leaf-by-leaf supremum over all ancestors.
    const int N = opts.depth;
    const std::int64_t n = checked_power(m, N);
    std::size_t cell = 0;
    for (std::int64_t leaf = 0; leaf < n; ++leaf) {
      Rational best = 0;
      for (int d = 0; d <= N; ++d) {
        const Node a{d, leaf / checked_power(m, N - d)};
        const Rational avg = phi.average(a);
        if (avg > best) best = avg;
      }
      const int R = std::max(N, phi.resolution());
      const std::int64_t at = leaf * checked_power(m, R - N);
      while (node_span(m, lin.cells[cell].node, R).second <= at) ++cell;
      const auto owner = static_cast<std::size_t>(lin.owner[cell]);
      tally.check(lin.elements[owner].average == best, tag("reconstruction", id));
    }

    // The ancestor criterion gives the same S_phi.
    const auto crit = s_phi_by_criterion(phi);
    std::vector<Node> direct;
    for (const auto& e : lin.elements) direct.push_back(e.node);
    tally.check(crit == direct, tag("criterion vs direct S_phi", id));

    // Each element of S_phi has a child outside S_phi.
    for (const auto& e : lin.elements) {
      bool found = false;
      for (int c = 0; c < m && !found; ++c) {
        found = lin.find({e.node.depth + 1, e.node.index * m + c}) < 0;
      }
      tally.check(found, tag("child outside S_phi", id));
    }
  }
  return tally.done();
}

SuiteSummary verify_gphi(const SuiteOptions& opts) {
  Tally tally("gphi");
  std::mt19937_64 rng(opts.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double tol = 1e-9;
  for (std::int64_t id = 0; id < opts.count; ++id) {
    tally.next_case();
    const auto phi = random_step_function(rng, opts.m, opts.depth);
    const double q = 0.05 + 0.9 * unit(rng);
    const auto M = maximal_function(phi);
    const auto mv = M.values();
    const double f = phi.integral();
    const double top = *std::max_element(mv.begin(), mv.end());
    const double L = f + (top - f) * unit(rng);
    const auto res = g_phi(phi, L, q);
    const auto before = moments(phi, q);
    const auto after = moments(res.g, q);
    tally.check(std::abs(after.mass - before.mass) <= tol, tag("first moment", id));
    tally.check(std::abs(after.q_mass - before.q_mass) <= tol, tag("q-moment", id));

    const auto Mg = maximal_function(res.g);
    for_each_common_piece(Mg, M, [&](std::int64_t, std::int64_t, double a, double b) {
      tally.check(a >= b * (1.0 - 1e-12), tag("M g >= M phi", id));
    });

    // Zero sets inside E, counted in grid units.
    const auto ex = excess_set(phi, L, q);
    std::int64_t zero_g = 0;
    std::int64_t zero_phi = 0;
    const int R = for_each_common_piece(res.g, phi, [](std::int64_t, std::int64_t, double, double) {});
    for_each_common_piece(res.g, phi, [&](std::int64_t s, std::int64_t e, double gv, double pv) {
      for (const auto& node : ex.elements) {
        const auto [a, b] = node_span(opts.m, node, R);
        const std::int64_t lo = std::max(a, s);
        const std::int64_t hi = std::min(b, e);
        if (hi <= lo) continue;
        if (gv == 0.0) zero_g += hi - lo;
        if (pv == 0.0) zero_phi += hi - lo;
      }
    });
    tally.check(zero_g >= zero_phi, tag("zero set grows on E", id));

    for (const auto& rec : res.records) {
      tally.check(rec.gamma <= rec.alpha * (1.0 + 1e-15), tag("gamma <= alpha", id));
    }
  }
  return tally.done();
}

SuiteSummary run_suite(const std::string& name, const SuiteOptions& opts) {
  if (name == "inequalities") return verify_inequalities(opts);
  if (name == "kernel") return verify_kernel(opts);
  if (name == "linearization") return verify_linearization(opts);
  if (name == "gphi") return verify_gphi(opts);
  throw DomainError("unknown verification suite '" + name + "'");
}

}  // namespace bklab
