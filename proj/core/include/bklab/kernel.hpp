#pragma once

// Special functions behind the Bellman function of the tree maximal operator
// for Kolmogorov's inequality, 0 < q < 1.
//
//   H_q(z)      = (1-q) z^q + q z^(q-1),             z >= 1
//   omega_q(z)  = [H_q^{-1}(z)]^q,                   z >= 1
//   sigma_q     = H_q(x(1-k)/(1-kx)) / H_q(x)
//   B(f,h,L)    = h * omega_q(((1-q)L^q + q L^(q-1) f) / h)
//
// Every function here is pure and reentrant.

#include <optional>

namespace bklab {

/// Admissible (q, f, h, L) together with the derived quantities
/// lambda = f^q / h, mu = L / f and the eigenvalue constant c.
struct BellmanParams {
  double q = 0.5;
  double f = 1.0;
  double h = 1.0;
  double L = 1.0;
  double lambda = 1.0;
  double mu = 1.0;
  double c = 1.0;

  /// Validates 0 < q < 1, f > 0, 0 < h <= f^q and L >= f, then fills the
  /// derived fields. Throws DomainError naming the violated constraint.
  static BellmanParams make(double q, double f, double h, double L);
};

/// Endpoints of the interval W_k = [rho0, rho1] on which R_k is defined.
struct RkDomain {
  double rho0 = 0.0;
  double rho1 = 0.0;
  double k = 0.0;
};

struct RkMaximum {
  double b_star = 0.0;
  double value = 0.0;
  double x = 0.0;  // X_lambda(k)
};

void check_exponent(double q);

double h_q(double z, double q);
double omega_q(double z, double q);
double u_q(double x, double q);

/// Closed form of sigma_q(k, x) on 0 < k < 1, 0 < x < 1/k.
double sigma_q(double k, double x, double q);
/// sigma_q through the ratio of H_q values; requires x >= 1 and
/// x(1-k)/(1-kx) >= 1.
double sigma_q_ratio(double k, double x, double q);

/// The unique root in (1, 1/k) of H_q(x(1-k)/(1-kx)) = lambda H_q(x).
double chi_lambda(double lambda, double k, double q);

/// Closed form of the unique k in (0, 1/mu) with sigma_q(k, mu) = lambda.
double k0(double lambda, double mu, double q);

double r_q_mu(double k, double x, double mu, double q);

/// l_k(B) = (1-k)^(1-q) (f-B)^q + k^(1-q) B^q on [0, f].
double ell_k(double b, double k, const BellmanParams& params);
RkDomain rk_domain(double k, const BellmanParams& params);
double r_k(double b, double k, const BellmanParams& params);
RkMaximum maximize_r_k(double k, const BellmanParams& params);

double bellman_value(const BellmanParams& params);

/// tau = L / c^(1/q), the limiting value of extremal sequences off the excess
/// set.
double tau_target(const BellmanParams& params);

/// k0(lambda, mu) for the given parameters, or nullopt when lambda == 1 or
/// mu == 1 (no interior excess set).
std::optional<double> k0_of(const BellmanParams& params);

}  // namespace bklab
