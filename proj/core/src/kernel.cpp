#include "bklab/kernel.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include "bklab/errors.hpp"
#include "bklab/roots.hpp"

namespace bklab {

ConvergenceError::ConvergenceError(const std::string& what, double lo, double hi,
                                   double f_lo, double f_hi)
    : NumericalError([&] {
        std::ostringstream os;
        os.precision(17);
        os << what << " (bracket [" << lo << ", " << hi << "], residuals " << f_lo
           << ", " << f_hi << ")";
        return os.str();
      }()),
      lo_(lo),
      hi_(hi),
      f_lo_(f_lo),
      f_hi_(f_hi) {}

namespace {

constexpr double kRoundoff = 8.0 * std::numeric_limits<double>::epsilon();

double h_raw(double z, double q) {
  return (1.0 - q) * std::pow(z, q) + q * std::pow(z, q - 1.0);
}

// omega_q(z) solved directly for w = y^q, where H_q(y) = (1-q) w + q w^(1 - 1/q).
// The bracket [1, z/(1-q)] holds since H_q(y) >= (1-q) y^q. Working in w keeps
// the result accurate to a few ulps, which the concavity checks need.
double omega_root(double z, double q) {
  if (z == 1.0) return 1.0;
  const double e = 1.0 - 1.0 / q;
  auto g = [z, q, e](double w) { return (1.0 - q) * w + q * std::pow(w, e) - z; };
  return bisect(g, 1.0, z / (1.0 - q), BisectOptions{}, "omega_q").root;
}

void require(bool ok, const std::string& msg) {
  if (!ok) throw DomainError(msg);
}

}  // namespace

void check_exponent(double q) {
  require(q > 0.0 && q < 1.0, "exponent q must lie in (0, 1)");
}

BellmanParams BellmanParams::make(double q, double f, double h, double L) {
  check_exponent(q);
  require(std::isfinite(f) && f > 0.0, "f must be positive");
  require(std::isfinite(h) && h > 0.0, "h must be positive");
  require(std::isfinite(L), "L must be finite");
  const double fq = std::pow(f, q);
  require(h <= fq * (1.0 + kRoundoff), "Hoelder admissibility requires h <= f^q");
  require(L >= f * (1.0 - kRoundoff), "L must satisfy L >= f");
  BellmanParams p;
  p.q = q;
  p.f = f;
  p.h = h;
  p.L = L;
  p.lambda = std::max(1.0, fq / h);
  p.mu = std::max(1.0, L / f);
  const double arg = ((1.0 - q) * std::pow(L, q) + q * std::pow(L, q - 1.0) * f) / h;
  p.c = omega_q(std::max(1.0, arg), q);
  return p;
}

double h_q(double z, double q) {
  check_exponent(q);
  require(z >= 1.0, "H_q is defined for z >= 1");
  return h_raw(z, q);
}

double omega_q(double z, double q) {
  check_exponent(q);
  require(z >= 1.0, "omega_q is defined for z >= 1");
  require(std::isfinite(z), "omega_q argument must be finite");
  return omega_root(z, q);
}

double u_q(double x, double q) { return omega_q(x, q) / x; }

double sigma_q(double k, double x, double q) {
  check_exponent(q);
  require(k > 0.0 && k < 1.0, "sigma_q requires 0 < k < 1");
  require(x > 0.0 && k * x < 1.0, "sigma_q requires 0 < x < 1/k");
  const double num = (1.0 - q) * x + q - k * x;
  const double den = std::pow(1.0 - k, 1.0 - q) * std::pow(1.0 - k * x, q) *
                     ((1.0 - q) * x + q);
  return num / den;
}

double sigma_q_ratio(double k, double x, double q) {
  check_exponent(q);
  require(k > 0.0 && k < 1.0, "sigma_q requires 0 < k < 1");
  require(x >= 1.0 && k * x < 1.0, "ratio form requires 1 <= x < 1/k");
  const double w = x * (1.0 - k) / (1.0 - k * x);
  return h_q(w, q) / h_q(x, q);
}

double chi_lambda(double lambda, double k, double q) {
  check_exponent(q);
  require(lambda > 1.0, "chi_lambda requires lambda > 1");
  require(k > 0.0 && k < 1.0, "chi_lambda requires 0 < k < 1");
  const double span = 1.0 / k - 1.0;
  const double eps = 1e-13 * span;
  const double lo = 1.0 + eps;
  const double hi = 1.0 / k - eps;
  auto residual = [lambda, k, q](double x) {
    const double w = x * (1.0 - k) / (1.0 - k * x);
    return h_raw(w, q) - lambda * h_raw(x, q);
  };
  const double x = bisect(residual, lo, hi, BisectOptions{}, "chi_lambda").root;
  const double rel = std::abs(residual(x)) / (lambda * h_raw(x, q));
  if (!(rel <= 1e-10)) {
    throw ConvergenceError("chi_lambda: residual above 1e-10", lo, hi, residual(lo),
                           residual(hi));
  }
  return x;
}

double k0(double lambda, double mu, double q) {
  check_exponent(q);
  require(lambda > 1.0, "k0 requires lambda > 1");
  require(mu > 1.0, "k0 requires mu > 1");
  const double y = std::pow(omega_root(lambda * h_raw(mu, q), q), 1.0 / q);
  if (!(y > mu)) {
    throw DomainError("k0: omega_q(lambda H_q(mu))^(1/q) <= mu gives k0 <= 0");
  }
  return (y - mu) / (mu * (y - 1.0));
}

double r_q_mu(double k, double x, double mu, double q) {
  check_exponent(q);
  require(k > 0.0 && k < 1.0, "R_{q,mu} requires 0 < k < 1");
  require(x > 1.0 && k * x < 1.0, "R_{q,mu} requires 1 < x < 1/k");
  require(mu >= 1.0, "R_{q,mu} requires mu >= 1");
  const double w = x * (1.0 - k) / (1.0 - k * x);
  return std::pow(w, q) / sigma_q(k, x, q) +
         (std::pow(mu, q) - std::pow(x, q)) * (1.0 - k);
}

double ell_k(double b, double k, const BellmanParams& p) {
  require(k > 0.0 && k < 1.0, "l_k requires 0 < k < 1");
  require(b >= 0.0 && b <= p.f, "l_k is defined for 0 <= B <= f");
  return std::pow(1.0 - k, 1.0 - p.q) * std::pow(p.f - b, p.q) +
         std::pow(k, 1.0 - p.q) * std::pow(b, p.q);
}

RkDomain rk_domain(double k, const BellmanParams& p) {
  require(k > 0.0 && k < 1.0, "R_k requires 0 < k < 1");
  require(p.h < std::pow(p.f, p.q), "R_k requires h < f^q");
  const double peak = k * p.f;
  auto excess = [&](double b) { return ell_k(b, k, p) - p.h; };
  RkDomain d;
  d.k = k;
  // l_k increases on (0, kf) and decreases on (kf, f).
  if (excess(0.0) >= 0.0) {
    d.rho0 = 0.0;
  } else {
    d.rho0 = bisect(excess, 0.0, peak, BisectOptions{}, "rho0").root;
  }
  if (excess(p.f) >= 0.0) {
    d.rho1 = p.f;
  } else {
    d.rho1 = bisect(excess, peak, p.f, BisectOptions{}, "rho1").root;
  }
  return d;
}

double r_k(double b, double k, const BellmanParams& p) {
  require(k > 0.0 && k < 1.0, "R_k requires 0 < k < 1");
  require(b >= 0.0 && b <= p.f, "R_k is defined for 0 <= B <= f");
  const double off = std::pow(1.0 - k, 1.0 - p.q) * std::pow(p.f - b, p.q);
  const double on = std::pow(k, 1.0 - p.q) * std::pow(b, p.q);
  if (off + on < p.h * (1.0 - kRoundoff)) {
    throw DomainError("R_k: l_k(B) < h, B outside [rho0, rho1]");
  }
  if (p.h <= off) return on / (1.0 - p.q);
  const double slack = p.h - off;
  return slack * omega_q(std::max(1.0, on / slack), p.q);
}

RkMaximum maximize_r_k(double k, const BellmanParams& p) {
  require(k > 0.0 && k < 1.0, "R_k requires 0 < k < 1");
  require(p.lambda > 1.0, "maximize_r_k requires h < f^q");
  const double x = chi_lambda(p.lambda, k, p.q);
  RkMaximum m;
  m.x = x;
  m.b_star = x * k * p.f;
  m.value = p.h * omega_q(p.lambda * h_raw(x, p.q), p.q) -
            (1.0 - k) * std::pow(p.f, p.q) * std::pow(x, p.q);
  const double off = std::pow(1.0 - k, 1.0 - p.q) * std::pow(p.f - m.b_star, p.q);
  if (!(off < p.h && p.h < ell_k(m.b_star, k, p))) {
    throw NumericalError("maximize_r_k: maximizer fails (1-k)^(1-q)(f-B)^q < h < l_k(B)");
  }
  return m;
}

double bellman_value(const BellmanParams& p) {
  check_exponent(p.q);
  const double arg =
      ((1.0 - p.q) * std::pow(p.L, p.q) + p.q * std::pow(p.L, p.q - 1.0) * p.f) / p.h;
  if (arg < 1.0 - kRoundoff) {
    throw DomainError("bellman_value: omega_q argument below 1, parameters inadmissible");
  }
  return p.h * omega_q(std::max(1.0, arg), p.q);
}

double tau_target(const BellmanParams& p) { return p.L / std::pow(p.c, 1.0 / p.q); }

std::optional<double> k0_of(const BellmanParams& p) {
  if (p.lambda <= 1.0 || p.mu <= 1.0) return std::nullopt;
  return k0(p.lambda, p.mu, p.q);
}

}  // namespace bklab
