#pragma once

#include <Eigen/Core>
#include <complex>

namespace fputw::dispersion {

enum class Branch { Minus, Plus };

/// Frequency/speed/mass-deviation triple; mu = 1/m - 1.
struct DispersionPoint {
  double omega = 0.0;
  double c = 0.0;
  double mu = 0.0;
};

/// Linear sound speed C_mu = sqrt(2(1+mu)/(2+mu)).
double sound_speed(double mu);

/// Sound speed written in terms of the mass ratio, sqrt(2/(1+m)).
double sound_speed_from_mass(double m);

/// lambda^{+-}_mu(omega) = 2 + mu +- sqrt(mu^2 + 4(1+mu) cos^2 omega).
double lambda_pm(double omega, double mu, Branch branch);

/// B_{+-}(omega; c, mu) = -c^2 omega^2 + lambda^{+-}_mu(omega).
double b_pm(double omega, double c, double mu, Branch branch);

/// d/domega B_+(omega; c, mu). Rejects mu = 0 with cos(omega) = 0, where the
/// square root has a kink.
double b_plus_prime(double omega, double c, double mu);

/// The 2x2 characteristic matrix of the linearised problem for e^{i omega xi}.
Eigen::Matrix2cd characteristic_matrix(double omega, double c, double mu);

struct CriticalMode {
  double omega = 0.0;
  double nu1 = 0.0;
  double nu2 = 1.0;
  /// True when the eigenvector carries the nu2 > 0 orientation (the branch
  /// continuous from (0, 1) at mu = 0).
  bool oriented = true;
};

/// Unique positive root of B_+ and its unit real eigenvector. Throws NoBracket
/// when c <= C_mu.
CriticalMode critical_frequency(double c, double mu);

/// Root of sigma^2 w^2 = 2 + 2 cos w in (0, pi). Requires sigma > 1.
double jost_frequency(double sigma);

}  // namespace fputw::dispersion
