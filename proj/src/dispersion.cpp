#include "fputw/dispersion.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "fputw/errors.hpp"

namespace fputw::dispersion {

namespace {

void require_mass(double mu) {
  if (!(mu > -1.0)) throw ContractViolation("dispersion: mu must exceed -1, got " + std::to_string(mu));
}

double root_term(double omega, double mu) {
  const double c = std::cos(omega);
  return std::sqrt(mu * mu + 4.0 * (1.0 + mu) * c * c);
}

// Bisection on a sign change of g over [lo, hi] with g(lo) > 0 > g(hi).
template <class G>
double bisect(G&& g, double lo, double hi) {
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (g(mid) > 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

double sound_speed(double mu) {
  require_mass(mu);
  return std::sqrt(2.0 * (1.0 + mu) / (2.0 + mu));
}

double sound_speed_from_mass(double m) {
  if (!(m > 0.0)) throw ContractViolation("dispersion: mass ratio must be positive");
  return std::sqrt(2.0 / (1.0 + m));
}

double lambda_pm(double omega, double mu, Branch branch) {
  require_mass(mu);
  const double r = root_term(omega, mu);
  return branch == Branch::Plus ? 2.0 + mu + r : 2.0 + mu - r;
}

double b_pm(double omega, double c, double mu, Branch branch) {
  return -c * c * omega * omega + lambda_pm(omega, mu, branch);
}

double b_plus_prime(double omega, double c, double mu) {
  require_mass(mu);
  const double r = root_term(omega, mu);
  if (r == 0.0 || (mu == 0.0 && std::abs(std::cos(omega)) < 1e-14))
    throw ContractViolation("b_plus_prime: B_+ is not differentiable at this frequency");
  const double dr = -4.0 * (1.0 + mu) * std::cos(omega) * std::sin(omega) / r;
  return -2.0 * c * c * omega + dr;
}

Eigen::Matrix2cd characteristic_matrix(double omega, double c, double mu) {
  using namespace std::complex_literals;
  const double w2 = c * c * omega * omega;
  Eigen::Matrix2cd d;
  d(0, 0) = -w2 + (2.0 + mu) * (1.0 - std::cos(omega));
  d(0, 1) = 1i * mu * std::sin(omega);
  d(1, 0) = -1i * mu * std::sin(omega);
  d(1, 1) = -w2 + (2.0 + mu) * (1.0 + std::cos(omega));
  return d;
}

CriticalMode critical_frequency(double c, double mu) {
  require_mass(mu);
  const double cmu = sound_speed(mu);
  if (!(c > cmu))
    throw NoBracket("critical_frequency: speed " + std::to_string(c) + " does not exceed C_mu = " +
                    std::to_string(cmu));
  auto g = [&](double w) { return b_pm(w, c, mu, Branch::Plus); };
  double lo = 1e-8;
  double hi = std::numbers::pi / c;
  for (int grow = 0; g(hi) > 0.0; ++grow) {
    lo = hi;
    hi *= 2.0;
    if (grow > 60) throw NoBracket("critical_frequency: no sign change of B_+");
  }
  double w = bisect(g, lo, hi);
  // Newton polish where B_+ is smooth
  for (int it = 0; it < 4; ++it) {
    double d = 0.0;
    try {
      d = b_plus_prime(w, c, mu);
    } catch (const ContractViolation&) {
      break;
    }
    const double step = g(w) / d;
    if (!std::isfinite(step) || std::abs(step) > 1e-6) break;
    w -= step;
  }

  CriticalMode mode;
  mode.omega = w;
  const double lam = lambda_pm(w, mu, Branch::Plus);
  const double s = std::sin(w), co = std::cos(w);
  // two equivalent null vectors of the real symmetric form; keep the better conditioned one
  double a1 = mu * s, a2 = lam - (2.0 + mu) * (1.0 - co);
  double b1 = lam - (2.0 + mu) * (1.0 + co), b2 = mu * s;
  double n1, n2;
  if (std::hypot(a1, a2) >= std::hypot(b1, b2)) {
    n1 = a1;
    n2 = a2;
  } else {
    n1 = b1;
    n2 = b2;
  }
  const double norm = std::hypot(n1, n2);
  n1 /= norm;
  n2 /= norm;
  if (n2 < 0.0 || (n2 == 0.0 && n1 < 0.0)) {
    n1 = -n1;
    n2 = -n2;
  }
  mode.nu1 = n1;
  mode.nu2 = n2;
  mode.oriented = n2 > 0.0;
  return mode;
}

double jost_frequency(double sigma) {
  if (!(sigma > 1.0))
    throw ContractViolation("jost_frequency: wave speed must exceed 1, got " + std::to_string(sigma));
  auto g = [&](double w) { return 2.0 + 2.0 * std::cos(w) - sigma * sigma * w * w; };
  double w = bisect(g, 0.0, std::numbers::pi);
  for (int it = 0; it < 3; ++it) {
    const double d = -2.0 * std::sin(w) - 2.0 * sigma * sigma * w;
    const double step = g(w) / d;
    if (!std::isfinite(step) || std::abs(step) > 1e-8) break;
    w -= step;
  }
  return w;
}

}  // namespace fputw::dispersion
