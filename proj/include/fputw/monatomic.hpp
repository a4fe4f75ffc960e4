#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "fputw/mfde.hpp"

namespace fputw::monatomic {

struct SolverOptions {
  double length = 32.0;
  int intervals = 512;
  int gauss = 3;
  NewtonConfig newton;
};

/// Monatomic wave phi(xi) ~ kappa^2 Phi(kappa xi) with tau = kappa xi in [0, L].
/// `phi` has components (Phi, Phi') and the single parameter sigma.
struct MonatomicWave {
  double kappa = 0.0;
  double sigma = 0.0;
  PiecewiseSolution phi;
  NewtonReport report;
  /// Phi dipped below -1e-3 max Phi somewhere on [0, L].
  bool negative_profile = false;
};

/// Jost solution gamma(xi) ~ sin(omega (xi + theta)) + beta Upsilon(kappa xi).
/// `system` holds (Phi, Phi', Upsilon, Upsilon') with parameters (sigma, beta, theta).
struct JostSolution {
  double kappa = 0.0;
  double omega = 0.0;
  double theta = 0.0;
  double beta = 0.0;
  PiecewiseSolution system;
  NewtonReport report;

  double upsilon(double tau) const { return system.value(2, tau); }
  /// gamma_sigma(xi) with the odd continuation to xi < 0.
  double gamma(double xi) const;
};

struct AmplitudeCoefficient {
  double I_eta = 0.0;
  double I_chi = 0.0;
  double K = 0.0;
  /// Relative mismatch |I_eta + B_+'(omega; sigma, 0) sin(omega theta)| / |I_eta|.
  double monitor_residual = 0.0;
  bool reliable = false;
  /// Relative change of I_chi and I_eta when the quadrature grid is doubled.
  double chi_stability = 0.0;
  double eta_stability = 0.0;
};

struct ScanRow {
  double kappa = 0.0;
  double sigma = 0.0;
  double omega = 0.0;
  double theta = 0.0;
  double beta = 0.0;
  AmplitudeCoefficient amplitude;
  int newton_iterations = 0;
};

/// Profile MFDE -kappa^2 sigma^2 Phi'' = (2 - A_kappa)(Phi + kappa^2 Phi^2), Phi(0) = 1/8,
/// Phi'(0) = 0, Phi(L) = 0, free parameter sigma.
MfdeProblem profile_problem(double kappa, double length);

/// Joint (Phi, Upsilon) system with parameters (sigma, beta, theta): seven boundary conditions.
MfdeProblem combined_problem(double kappa, double length);

/// Extension rules of the joint system at the given kappa (Upsilon's rule is affine).
std::vector<Extension> combined_extensions(double kappa);

/// (1/8) sech^2(tau/2) with sigma = 1 + kappa^2/24.
MonatomicWave seed_wave(double kappa, const SolverOptions& opt = {});

MonatomicWave solve_profile(double kappa, const SolverOptions& opt = {},
                            const MonatomicWave* guess = nullptr);

/// Solves the joint system starting from a converged wave. Updates nothing in
/// `wave`; the returned system carries the co-solved Phi and sigma.
JostSolution solve_jost(const MonatomicWave& wave, const SolverOptions& opt = {},
                        const JostSolution* guess = nullptr);

/// Wave view of a joint solution (components 0 and 1).
MonatomicWave wave_from_jost(const JostSolution& jost, double kappa);

enum class PsiKind { Eta, Chi };

/// Psi^(eta) or Psi^(chi) as a function of tau.
std::function<double(double)> compute_psi(const JostSolution& jost, double kappa, PsiKind which);

/// Midpoint quadrature of I_eta and I_chi with `points` nodes; K = -I_chi / I_eta.
/// With strict = true an unstable quadrature raises UnreliableQuadrature.
AmplitudeCoefficient amplitude_coefficient(const JostSolution& jost, double kappa,
                                           long points = 1000000, bool strict = false);

/// Continuation in kappa from `from` to `to` (inclusive, up to rounding) in steps of `step`.
/// Completed rows are passed to `on_row` as they are produced; a NonConvergence
/// stops the scan and is rethrown after the completed rows were delivered.
std::vector<ScanRow> kappa_scan(double from, double to, double step, const SolverOptions& opt = {},
                                const std::function<void(const ScanRow&, const JostSolution&)>& on_row = {},
                                const JostSolution* start = nullptr);

std::string scan_csv_header();
std::string scan_csv_row(const ScanRow& row);

}  // namespace fputw::monatomic
