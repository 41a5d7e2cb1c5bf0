// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero if any selected criterion fails.
//
//   bklab_acceptance                 all eight criteria
//   bklab_acceptance --criterion 4   just one

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "bklab/kernel.hpp"
#include "bklab/search.hpp"
#include "bklab/verify.hpp"

using namespace bklab;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  const char* name;
  double limit_s;
  std::function<Outcome()> run;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double omega_half(double z) { return z + std::sqrt(z * z - 1.0); }

Outcome closed_form_oracle() {
  double worst = 0.0;
  for (int i = 0; i < 200; ++i) {
    const double z = 1.0 + 49.0 * i / 199.0;
    worst = std::max(worst, std::abs(omega_q(z, 0.5) - omega_half(z)));
  }
  return {worst <= 1e-10, fmt("max |omega - (z + sqrt(z^2-1))| = %.3e over 200 points", worst)};
}

Outcome shape_properties() {
  int violations = 0;
  for (double q : {0.2, 0.5, 0.8}) {
    std::vector<double> z(500), w(500);
    for (std::size_t i = 0; i < 500; ++i) {
      z[i] = 1.0 + 99.0 * static_cast<double>(i) / 499.0;
      w[i] = omega_q(z[i], q);
    }
    for (std::size_t i = 1; i < 500; ++i) {
      if (!(w[i] > w[i - 1])) ++violations;
      if (!(w[i] / z[i] > w[i - 1] / z[i - 1])) ++violations;
      if (i + 1 < 500 && !(w[i] > 0.5 * (w[i - 1] + w[i + 1]))) ++violations;
    }
  }
  return {violations == 0, fmt("%d violations (omega increasing, midpoint concave, U increasing)",
                               violations)};
}

Outcome kernel_cross_checks() {
  double worst_sigma = 0.0;
  double worst_chi = 0.0;
  for (int i = 0; i < 10; ++i) {
    for (int j = 0; j < 10; ++j) {
      const double lambda = 1.05 + 0.25 * i;
      const double mu = 1.05 + 0.25 * j;
      const double k = k0(lambda, mu, 0.5);
      worst_sigma = std::max(worst_sigma, std::abs(sigma_q(k, mu, 0.5) - lambda));
      worst_chi = std::max(worst_chi, std::abs(chi_lambda(lambda, k, 0.5) - mu));
    }
  }

  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst_value = 0.0;
  double worst_cells = 0.0;
  for (int t = 0; t < 20; ++t) {
    const double q = 0.1 + 0.8 * u(rng);
    const double f = 0.25 + 3.75 * u(rng);
    const double h = std::pow(f, q) * (0.2 + 0.75 * u(rng));
    const double k = 0.05 + 0.9 * u(rng);
    const auto p = BellmanParams::make(q, f, h, f);
    const auto d = rk_domain(k, p);
    const auto best = maximize_r_k(k, p);
    const int n = 10000;
    const double cell = (d.rho1 - d.rho0) / n;
    double grid_value = -1.0;
    double grid_arg = 0.0;
    for (int i = 0; i <= n; ++i) {
      const double b = std::min(d.rho1, d.rho0 + cell * i);
      const double v = r_k(b, k, p);
      if (v > grid_value) {
        grid_value = v;
        grid_arg = b;
      }
    }
    worst_value = std::max(worst_value, std::abs(best.value - grid_value));
    worst_cells = std::max(worst_cells, std::abs(best.b_star - grid_arg) / cell);
  }
  const bool pass =
      worst_sigma <= 1e-9 && worst_chi <= 1e-8 && worst_value <= 1e-6 && worst_cells <= 1.0;
  return {pass, fmt("sigma err %.2e, chi err %.2e; R_k value err %.2e, argmax off by %.3f cells",
                    worst_sigma, worst_chi, worst_value, worst_cells)};
}

Outcome desk_scale_value() {
  const auto p = BellmanParams::make(0.5, 1.0, 0.8, 1.2);
  const double z = (std::sqrt(p.L) / 2.0 + p.f / (2.0 * std::sqrt(p.L))) / p.h;
  const double bound = p.h * omega_half(z);
  bool below = true;
  std::string detail = fmt("h*c = %.10f; brute", bound);
  for (int n = 1; n <= 3; ++n) {
    const auto r = brute_force_oracle(p, TreeSpec::make(2, n));
    below = below && r.objective <= bound;
    detail += fmt(" N=%d %.6f", n, r.objective);
  }
  const auto local = local_search(p, TreeSpec::make(2, 8), 1, 200000);
  below = below && local.objective <= bound;
  const double ratio = (bound - local.objective) / bound;
  detail += fmt("; local N=8 %.6f, gap %.2f%% (limit 5%%)", local.objective, 100.0 * ratio);
  return {below && ratio <= 0.05, detail};
}

Outcome convergence_trend() {
  const auto p = BellmanParams::make(0.5, 1.0, 0.8, 1.2);
  const auto s = convergence_study(p, 2, {4, 6, 8}, 1, 200000);
  std::string detail;
  for (const auto& r : s.rows) {
    detail += fmt("N=%d gap %.4f residual %.4f k %.3f B/k %.3f; ", r.depth, r.gap, r.residual,
                  r.k, r.b_over_k);
  }
  detail += fmt("k0 %.3f, L %.2f", s.k0.value_or(NAN), s.L);
  return {s.gap_nonincreasing && s.residual_nonincreasing, detail};
}

Outcome suite_outcome(const SuiteSummary& s) {
  return {s.violations == 0, fmt("%lld cases, %lld checks, %lld violations, worst slack %.3e",
                                 static_cast<long long>(s.cases), static_cast<long long>(s.checks),
                                 static_cast<long long>(s.violations), s.worst_slack)};
}

Outcome inequality_fuzzing() {
  SuiteOptions o;
  o.count = 1000;
  o.m = 2;
  o.depth = 6;
  o.beta_points = 50;
  o.tolerance = 1e-12;
  return suite_outcome(verify_inequalities(o));
}

Outcome linearization_exactness() {
  SuiteOptions o;
  o.count = 200;
  o.depth = 5;
  return suite_outcome(verify_linearization(o));
}

Outcome gphi_contract() {
  SuiteOptions o;
  o.count = 200;
  o.depth = 6;
  return suite_outcome(verify_gphi(o));
}

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) {
      only = std::atoi(argv[++i]);
    } else {
      std::fprintf(stderr, "usage: %s [--criterion N]\n", argv[0]);
      return 2;
    }
  }

  const std::vector<Criterion> all = {
      {1, "omega closed form at q = 1/2", 1.0, closed_form_oracle},
      {2, "omega / U shape on a 500-point grid", 1.0, shape_properties},
      {3, "k0, chi and R_k maximizer cross-checks", 10.0, kernel_cross_checks},
      {4, "Bellman value at desk scale", 300.0, desk_scale_value},
      {5, "convergence trend over N = 4, 6, 8", 900.0, convergence_trend},
      {6, "inequality fuzzing", 120.0, inequality_fuzzing},
      {7, "exact linearization identities", 60.0, linearization_exactness},
      {8, "g_phi contract", 60.0, gphi_contract},
  };

  bool ok = true;
  for (const auto& c : all) {
    if (only != 0 && c.id != only) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool pass = o.pass && secs < c.limit_s;
    ok = ok && pass;
    std::printf("criterion %d %s: %s (%.2fs, limit %.0fs) %s\n", c.id, c.name,
                pass ? "PASS" : "FAIL", secs, c.limit_s, o.detail.c_str());
    std::fflush(stdout);
  }
  return ok ? 0 : 1;
}
