#include "bklab/search.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <random>
#include <string>
#include <thread>

#include "bklab/roots.hpp"

namespace bklab {

namespace {

bool is_degenerate(const BellmanParams& p) { return p.lambda <= 1.0; }

int resolve_threads(int requested, int restarts) {
  int t = requested;
  if (t <= 0) {
    if (const char* env = std::getenv("BKLAB_THREADS")) t = std::atoi(env);
  }
  if (t <= 0) t = static_cast<int>(std::thread::hardware_concurrency());
  return std::clamp(t, 1, std::max(1, restarts));
}

// a in [0, s/2] with a^q + (s - a)^q = p, or -1 when p is out of reach.
double solve_pair(double s, double p, double q) {
  if (s <= 0.0) return p <= 0.0 ? 0.0 : -1.0;
  const double lo_val = std::pow(s, q);
  const double hi_val = std::pow(2.0, 1.0 - q) * lo_val;
  const double slop = 1e-14 * hi_val;
  if (p < lo_val - slop || p > hi_val + slop) return -1.0;
  if (p <= lo_val) return 0.0;
  if (p >= hi_val) return 0.5 * s;
  auto g = [s, p, q](double a) { return std::pow(a, q) + std::pow(s - a, q) - p; };
  return bisect(g, 0.0, 0.5 * s, BisectOptions{}, "three-cell move").root;
}

struct RestartOutcome {
  std::vector<double> leaves;
  double objective = -1.0;
  std::int64_t accepted = 0;
};

std::vector<double> initial_leaves(const BellmanParams& p, std::int64_t n, std::mt19937_64& rng,
                                   int restart) {
  const auto k0 = k0_of(p);
  std::int64_t kE = n;
  if (k0) kE = std::clamp<std::int64_t>(std::llround(*k0 * static_cast<double>(n)), 1, n - 1);
  if (n == 1) kE = 1;
  std::uniform_real_distribution<double> unif(0.2, 0.9);
  std::normal_distribution<double> noise(0.0, 0.2);
  const double alpha = restart == 0 ? 0.5 : unif(rng);

  std::vector<double> v(static_cast<std::size_t>(n));
  double sum = 0.0;
  for (std::int64_t i = 0; i < kE; ++i) {
    v[static_cast<std::size_t>(i)] = std::pow(static_cast<double>(i) + 0.5, -alpha);
    sum += v[static_cast<std::size_t>(i)];
  }
  const double scale = p.L * static_cast<double>(kE) / sum;
  for (std::int64_t i = 0; i < kE; ++i) v[static_cast<std::size_t>(i)] *= scale;
  const double tau = tau_target(p);
  for (std::int64_t i = kE; i < n; ++i) v[static_cast<std::size_t>(i)] = tau;
  if (restart > 0) {
    for (auto& x : v) x *= std::exp(noise(rng));
  }
  return v;
}

RestartOutcome run_restart(const BellmanParams& p, const TreeSpec& tree, std::uint64_t seed,
                           int restart, std::int64_t budget) {
  const double q = p.q;
  const std::int64_t n = tree.leaves();
  std::mt19937_64 rng(seed + static_cast<std::uint64_t>(restart));
  RestartOutcome out;
  out.leaves = repair_moments(initial_leaves(p, n, rng, restart), p.f, p.h, q);
  DenseMaximal dense(tree.m, tree.depth);
  out.objective = dense.objective(out.leaves, p.L, q);
  if (n < 3) return out;

  static constexpr double kSigmas[] = {1.0, 0.3, 0.1, 0.03, 0.01};
  std::uniform_int_distribution<std::int64_t> pick(0, n - 1);
  std::uniform_int_distribution<int> pick_sigma(0, 4);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  auto& v = out.leaves;

  for (std::int64_t it = 0; it < budget; ++it) {
    const auto i = static_cast<std::size_t>(pick(rng));
    auto j = static_cast<std::size_t>(pick(rng));
    auto l = static_cast<std::size_t>(pick(rng));
    if (i == j || i == l || j == l) continue;
    const double S = v[i] + v[j] + v[l];
    const double Q = std::pow(v[i], q) + std::pow(v[j], q) + std::pow(v[l], q);
    double vi = 0.0;
    const double sigma = kSigmas[pick_sigma(rng)];
    if (unit(rng) >= 0.05) {
      const double base = v[i] > 0.0 ? v[i] : S / 3.0;
      vi = base * std::exp(sigma * normal(rng));
    }
    const double s = S - vi;
    if (s < 0.0) continue;
    const double a = solve_pair(s, Q - std::pow(vi, q), q);
    if (a < 0.0) continue;
    const double b = s - a;
    if (unit(rng) < 0.5) std::swap(j, l);
    const double old_i = v[i];
    const double old_j = v[j];
    const double old_l = v[l];
    v[i] = vi;
    v[j] = a;
    v[l] = b;
    const double obj = dense.objective(v, p.L, q);
    if (obj > out.objective) {
      out.objective = obj;
      ++out.accepted;
    } else {
      v[i] = old_i;
      v[j] = old_j;
      v[l] = old_l;
    }
  }
  return out;
}

}  // namespace

double min_feasible_h(double f, double q, std::int64_t leaves) {
  return std::pow(f, q) * std::pow(static_cast<double>(leaves), q - 1.0);
}

std::vector<double> repair_moments(const std::vector<double>& leaves, double f, double h,
                                   double q) {
  check_exponent(q);
  if (leaves.empty()) throw DomainError("repair_moments: no leaves");
  const double vmax = *std::max_element(leaves.begin(), leaves.end());
  if (!(vmax > 0.0)) throw InfeasibleStart("repair_moments: function vanishes identically");
  const double n = static_cast<double>(leaves.size());
  const double fq = std::pow(f, q);
  std::vector<double> u(leaves.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (leaves[i] < 0.0) throw DomainError("repair_moments: negative leaf value");
    u[i] = leaves[i] / vmax;
  }
  // q-moment after rescaling u^b to mean f; decreasing in b.
  auto G = [&](double b) {
    double s1 = 0.0;
    double sq = 0.0;
    for (double x : u) {
      if (x <= 0.0) continue;
      const double xb = std::pow(x, b);
      s1 += xb;
      sq += std::pow(xb, q);
    }
    return fq * (sq / n) / std::pow(s1 / n, q);
  };
  double b = 0.0;
  const double top = G(0.0);
  if (h > top) {
    if (h - top > 1e-12 * fq) {
      throw InfeasibleStart("repair_moments: q-moment " + std::to_string(h) +
                            " exceeds what the support allows (" + std::to_string(top) + ")");
    }
  } else {
    double hi = 1.0;
    while (G(hi) > h) {
      hi *= 2.0;
      if (hi > 4096.0) {
        throw InfeasibleStart("repair_moments: q-moment " + std::to_string(h) +
                              " is below what this support can reach");
      }
    }
    b = bisect([&](double x) { return G(x) - h; }, 0.0, hi, BisectOptions{}, "moment repair")
            .root;
  }
  std::vector<double> out(u.size());
  double s1 = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    out[i] = u[i] > 0.0 ? std::pow(u[i], b) : 0.0;
    s1 += out[i];
  }
  const double a = f * n / s1;
  for (auto& x : out) x *= a;
  return out;
}

SearchReport make_report(const BellmanParams& params, const StepFunctionD& phi,
                         std::int64_t iterations, std::uint64_t seed) {
  SearchReport r;
  r.params = params;
  r.m = phi.branching();
  r.depth = phi.resolution();
  r.best_phi = phi;
  r.objective = objective(phi, params.L, params.q);
  r.bound = bellman_value(params);
  r.gap = r.bound - r.objective;
  r.gap_ratio = r.gap / r.bound;
  r.residual = eigen_residual(phi, params.L, params);
  const auto ex = excess_set(phi, params.L, params.q);
  r.k = ex.k;
  r.A = ex.A;
  r.B = ex.B;
  r.moments = moments(phi, params.q);
  r.iterations = iterations;
  r.seed = seed;
  return r;
}

SearchReport local_search(const BellmanParams& params, const TreeSpec& tree, std::uint64_t seed,
                          std::int64_t budget, const SearchOptions& opts) {
  if (budget <= 0) throw DomainError("search budget must be positive");
  if (opts.restarts < 1) throw DomainError("need at least one restart");
  const std::int64_t n = tree.leaves();
  if (is_degenerate(params)) {
    auto r = make_report(params, StepFunctionD::constant(tree.m, params.f), 0, seed);
    r.depth = tree.depth;
    return r;
  }
  if (params.h < min_feasible_h(params.f, params.q, n)) {
    throw InfeasibleStart("no depth-" + std::to_string(tree.depth) +
                          " step function has these moments (h below f^q n^(q-1))");
  }

  const int restarts = opts.restarts;
  std::vector<RestartOutcome> outcomes(static_cast<std::size_t>(restarts));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(restarts));
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int r = next++; r < restarts; r = next++) {
      try {
        outcomes[static_cast<std::size_t>(r)] = run_restart(params, tree, seed, r, budget);
      } catch (...) {
        errors[static_cast<std::size_t>(r)] = std::current_exception();
      }
    }
  };
  const int threads = resolve_threads(opts.threads, restarts);
  std::vector<std::thread> pool;
  for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  int best = 0;
  std::int64_t accepted = 0;
  for (int r = 0; r < restarts; ++r) {
    accepted += outcomes[static_cast<std::size_t>(r)].accepted;
    if (outcomes[static_cast<std::size_t>(r)].objective >
        outcomes[static_cast<std::size_t>(best)].objective) {
      best = r;
    }
  }
  auto leaves = repair_moments(outcomes[static_cast<std::size_t>(best)].leaves, params.f,
                               params.h, params.q);
  auto phi = StepFunctionD::from_leaves(tree.m, tree.depth, std::move(leaves));
  auto report = make_report(params, phi, budget * restarts, seed);
  report.accepted = accepted;
  report.best_restart = best;
  return report;
}

namespace {

double multiset_count(double n, int m) {
  double c = 1.0;
  for (int i = 0; i < m; ++i) c = c * (n + i) / (i + 1);
  return c;
}

struct ClassLevel {
  int width = 1;              // leaves per class
  std::vector<double> leaves; // classes stored back to back
  std::size_t size() const { return leaves.size() / static_cast<std::size_t>(width); }
};

// Calls fn(indices) for every nondecreasing m-tuple of indices below count.
template <typename Fn>
void for_each_multiset(std::size_t count, int m, Fn&& fn) {
  std::vector<std::size_t> idx(static_cast<std::size_t>(m), 0);
  if (count == 0) return;
  while (true) {
    fn(idx);
    int pos = m - 1;
    while (pos >= 0 && idx[static_cast<std::size_t>(pos)] + 1 == count) --pos;
    if (pos < 0) return;
    const std::size_t nv = idx[static_cast<std::size_t>(pos)] + 1;
    for (int k = pos; k < m; ++k) idx[static_cast<std::size_t>(k)] = nv;
  }
}

}  // namespace

SearchReport brute_force_oracle(const BellmanParams& params, const TreeSpec& tree,
                                const OracleOptions& opts) {
  const int m = tree.m;
  const int N = tree.depth;
  const std::int64_t n = tree.leaves();
  if (n > 16) throw ComplexityGuard("brute force limited to m^N <= 16 leaves");
  if (opts.grid_size > 12) throw ComplexityGuard("brute force limited to 12 grid values");
  if (opts.grid_size < 2) throw DomainError("value grid needs at least two points");
  if (!(opts.ratio > 1.0)) throw DomainError("value grid ratio must exceed 1");
  if (is_degenerate(params)) {
    auto r = make_report(params, StepFunctionD::constant(m, params.f), 0, 0);
    r.depth = N;
    return r;
  }
  double count = opts.grid_size;
  for (int d = 0; d < N; ++d) {
    count = multiset_count(count, m);
    if (count > opts.max_candidates) {
      throw ComplexityGuard("brute force would enumerate about " + std::to_string(count) +
                            " candidates");
    }
  }
  const double q = params.q;
  const double tol = opts.tolerance < 0.0 ? 1e-2 * params.h : opts.tolerance;

  ClassLevel level;
  level.leaves.push_back(0.0);
  for (int g = 0; g + 1 < opts.grid_size; ++g) level.leaves.push_back(std::pow(opts.ratio, g));
  for (int d = 1; d < N; ++d) {
    ClassLevel up;
    up.width = level.width * m;
    const auto w = static_cast<std::size_t>(level.width);
    for_each_multiset(level.size(), m, [&](const std::vector<std::size_t>& idx) {
      for (auto k : idx) {
        up.leaves.insert(up.leaves.end(), level.leaves.begin() + static_cast<std::ptrdiff_t>(k * w),
                         level.leaves.begin() + static_cast<std::ptrdiff_t>((k + 1) * w));
      }
    });
    level = std::move(up);
  }
  const auto w = static_cast<std::size_t>(level.width);
  std::vector<double> sum(level.size());
  std::vector<double> qsum(level.size());
  for (std::size_t c = 0; c < level.size(); ++c) {
    for (std::size_t k = 0; k < w; ++k) {
      const double x = level.leaves[c * w + k];
      sum[c] += x;
      qsum[c] += std::pow(x, q);
    }
  }

  struct Candidate {
    double objective;
    std::vector<double> leaves;
  };
  constexpr std::size_t kKeep = 32;
  std::vector<Candidate> best;
  DenseMaximal dense(m, N);
  std::vector<double> leaves(static_cast<std::size_t>(n));
  const double nd = static_cast<double>(n);
  std::int64_t visited = 0;
  for_each_multiset(level.size(), m, [&](const std::vector<std::size_t>& idx) {
    ++visited;
    double s1 = 0.0;
    double sq = 0.0;
    for (auto c : idx) {
      s1 += sum[c];
      sq += qsum[c];
    }
    if (s1 <= 0.0) return;
    const double scale = params.f * nd / s1;
    const double h_cand = std::pow(scale, q) * sq / nd;
    if (std::abs(h_cand - params.h) > tol) return;
    std::size_t pos = 0;
    for (auto c : idx) {
      for (std::size_t k = 0; k < w; ++k) leaves[pos++] = level.leaves[c * w + k] * scale;
    }
    const double obj = dense.objective(leaves, params.L, q);
    if (best.size() == kKeep && obj <= best.back().objective) return;
    Candidate cand{obj, leaves};
    auto at = std::upper_bound(best.begin(), best.end(), obj,
                               [](double o, const Candidate& c) { return o > c.objective; });
    best.insert(at, std::move(cand));
    if (best.size() > kKeep) best.pop_back();
  });
  for (const auto& cand : best) {
    try {
      auto repaired = repair_moments(cand.leaves, params.f, params.h, q);
      auto phi = StepFunctionD::from_leaves(m, N, std::move(repaired));
      return make_report(params, phi, visited, 0);
    } catch (const InfeasibleStart&) {
    } catch (const ConvergenceError&) {
    }
  }
  throw InfeasibleStart("no quantized candidate matches the q-moment within tolerance");
}

StudyResult convergence_study(const BellmanParams& params, int m, const std::vector<int>& depths,
                              std::uint64_t seed, std::int64_t budget,
                              const SearchOptions& opts) {
  if (depths.empty()) throw DomainError("convergence study needs at least one depth");
  if (!std::is_sorted(depths.begin(), depths.end()) ||
      std::adjacent_find(depths.begin(), depths.end()) != depths.end()) {
    throw DomainError("convergence study depths must be strictly ascending");
  }
  StudyResult out;
  out.k0 = k0_of(params);
  out.L = params.L;
  for (int N : depths) {
    auto report = local_search(params, TreeSpec::make(m, N), seed, budget, opts);
    StudyRow row;
    row.depth = N;
    row.objective = report.objective;
    row.bound = report.bound;
    row.gap = report.gap;
    row.residual = report.residual.total;
    row.k = report.k;
    row.b_over_k = report.k > 0.0 ? report.B / report.k : 0.0;
    out.rows.push_back(row);
    out.reports.push_back(std::move(report));
  }
  for (std::size_t i = 1; i < out.rows.size(); ++i) {
    const auto& a = out.rows[i - 1];
    const auto& b = out.rows[i];
    if (b.gap > 1.1 * a.gap) out.gap_nonincreasing = false;
    if (b.residual > 1.1 * a.residual) out.residual_nonincreasing = false;
    if (b.gap > a.gap) out.gap_strictly_nonincreasing = false;
    if (b.residual > a.residual) out.residual_strictly_nonincreasing = false;
  }
  return out;
}

}  // namespace bklab
