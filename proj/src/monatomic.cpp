#include "fputw/monatomic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <memory>
#include <optional>

#include "fputw/dispersion.hpp"
#include "fputw/errors.hpp"

namespace fputw::monatomic {

namespace {

constexpr double kPhase0 = 0.2208053960;

// jost_frequency is an explicit root; residual evaluations hit the same sigma
// many times in a row, so remember the last one per thread.
double jost_omega(double sigma) {
  thread_local double last_sigma = std::numeric_limits<double>::quiet_NaN();
  thread_local double last_omega = 0.0;
  if (sigma != last_sigma) {
    last_omega = dispersion::jost_frequency(sigma);
    last_sigma = sigma;
  }
  return last_omega;
}

void require_kappa(double kappa) {
  if (!(kappa > 0.0)) throw ContractViolation("monatomic: kappa must be positive");
}

Mesh make_mesh(const SolverOptions& opt) { return build_mesh(opt.length, opt.intervals, opt.gauss); }

// Upsilon(-t) = -Upsilon(t) + upsilon_offset(t), from the odd continuation of gamma.
Extension::Offset upsilon_offset(double kappa) {
  return [kappa](double t, std::span<const double> p) {
    const double w = jost_omega(p[0]);
    return -2.0 / p[1] * std::sin(w * p[2]) * std::cos(w * t / kappa);
  };
}

Extension::Offset upsilon_prime_offset(double kappa) {
  return [kappa](double t, std::span<const double> p) {
    const double w = jost_omega(p[0]);
    return -2.0 / p[1] * std::sin(w * p[2]) * (w / kappa) * std::sin(w * t / kappa);
  };
}

std::vector<Extension> upsilon_extensions(double kappa) {
  return {Extension::affine_zero(-1.0, upsilon_offset(kappa), "jost_upsilon"),
          Extension::affine_zero(1.0, upsilon_prime_offset(kappa), "jost_upsilon_prime")};
}

double phi_bracket(double kappa, double a) { return a + kappa * kappa * a * a; }

// Upsilon equation with Phi supplied through `phi_at`, components (Upsilon, Upsilon') at
// offsets u0 of the stencil; params (sigma, beta, theta).
void upsilon_rhs(double kappa, double tau, double phi, double u, double up, double um, double du,
                 std::span<const double> p, double& f0, double& f1) {
  const double sigma = p[0], beta = p[1], theta = p[2];
  const double w = jost_omega(sigma);
  const double k2s2 = kappa * kappa * sigma * sigma;
  const double forcing = 2.0 * k2s2 * w * w / beta * phi * std::sin(w * (tau / kappa + theta));
  f0 = du;
  f1 = -((1.0 + 2.0 * kappa * kappa * phi) * (2.0 * u + up + um) + forcing) / k2s2;
}

BoundaryFunctional at(int component, double t, double target) {
  return [=](const PiecewiseSolution& s) { return s.value(component, t) - target; };
}

BoundaryFunctional upsilon_origin(int component) {
  return [component](const PiecewiseSolution& s) {
    const auto& p = s.params();
    const double w = jost_omega(p[0]);
    return s.value(component, 0.0) + std::sin(w * p[2]) / p[1];
  };
}

// Jost presolve with Phi frozen: components (Upsilon, Upsilon'), params (sigma, beta, theta),
// sigma pinned by its own boundary row.
MfdeProblem frozen_jost_problem(const MonatomicWave& wave) {
  const double kappa = wave.kappa;
  const double len = wave.phi.mesh().length();
  auto phi = std::make_shared<PiecewiseSolution>(wave.phi);
  MfdeProblem pb;
  pb.components = 2;
  pb.parameters = 3;
  pb.shifts = {Shift::constant(kappa, {0}), Shift::constant(-kappa, {0})};
  pb.rhs = [kappa, phi](double tau, const Stencil& v, std::span<const double> p, std::span<double> out) {
    upsilon_rhs(kappa, tau, phi->value(0, tau), v(0, 0), v(1, 0), v(2, 0), v(0, 1), p, out[0], out[1]);
  };
  const double sigma = wave.sigma;
  pb.boundary = {upsilon_origin(0), at(1, 0.0, 1.0), at(0, len, 0.0), at(1, len, 0.0),
                 [sigma](const PiecewiseSolution& s) { return s.params()[0] - sigma; }};
  pb.extensions = upsilon_extensions(kappa);
  return pb;
}

void check_negative(MonatomicWave& w) {
  const auto& mesh = w.phi.mesh();
  double lo = 0.0, hi = 0.0;
  for (int i = 0; i <= 4 * mesh.intervals(); ++i) {
    const double v = w.phi.interior_value(0, mesh.length() * i / (4.0 * mesh.intervals()));
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  w.negative_profile = lo < -1e-3 * hi;
}

void copy_components(const PiecewiseSolution& from, int from_first, PiecewiseSolution& to, int to_first,
                     int count) {
  const auto src = from.coefficients();
  auto dst = to.coefficients();
  const int nb = from.coefficients_per_block();
  for (int i = 0; i < from.mesh().intervals(); ++i)
    for (int c = 0; c < count; ++c)
      std::copy_n(src.data() + from.block_offset(i, from_first + c), nb,
                  dst.data() + to.block_offset(i, to_first + c));
}

}  // namespace

MfdeProblem profile_problem(double kappa, double length) {
  require_kappa(kappa);
  MfdeProblem pb;
  pb.components = 2;
  pb.parameters = 1;
  pb.shifts = {Shift::constant(kappa, {0}), Shift::constant(-kappa, {0})};
  pb.rhs = [kappa](double, const Stencil& v, std::span<const double> p, std::span<double> out) {
    const double s = p[0];
    const double lhs = 2.0 * phi_bracket(kappa, v(0, 0)) - phi_bracket(kappa, v(1, 0)) -
                       phi_bracket(kappa, v(2, 0));
    out[0] = v(0, 1);
    out[1] = -lhs / (kappa * kappa * s * s);
  };
  pb.boundary = {at(0, 0.0, 0.125), at(1, 0.0, 0.0), at(0, length, 0.0)};
  pb.extensions = {Extension::even_zero(), Extension::odd_zero()};
  return pb;
}

std::vector<Extension> combined_extensions(double kappa) {
  auto ups = upsilon_extensions(kappa);
  return {Extension::even_zero(), Extension::odd_zero(), ups[0], ups[1]};
}

MfdeProblem combined_problem(double kappa, double length) {
  require_kappa(kappa);
  MfdeProblem pb;
  pb.components = 4;
  pb.parameters = 3;
  pb.shifts = {Shift::constant(kappa, {0, 2}), Shift::constant(-kappa, {0, 2})};
  pb.rhs = [kappa](double tau, const Stencil& v, std::span<const double> p, std::span<double> out) {
    const double s = p[0];
    const double lhs = 2.0 * phi_bracket(kappa, v(0, 0)) - phi_bracket(kappa, v(1, 0)) -
                       phi_bracket(kappa, v(2, 0));
    out[0] = v(0, 1);
    out[1] = -lhs / (kappa * kappa * s * s);
    upsilon_rhs(kappa, tau, v(0, 0), v(0, 2), v(1, 2), v(2, 2), v(0, 3), p, out[2], out[3]);
  };
  pb.boundary = {at(0, 0.0, 0.125), at(1, 0.0, 0.0), at(0, length, 0.0), upsilon_origin(2),
                 at(3, 0.0, 1.0),   at(2, length, 0.0), at(3, length, 0.0)};
  pb.extensions = combined_extensions(kappa);
  return pb;
}

double JostSolution::gamma(double xi) const {
  if (xi < 0.0) return -gamma(-xi);
  return std::sin(omega * (xi + theta)) + beta * system.value(2, kappa * xi);
}

MonatomicWave seed_wave(double kappa, const SolverOptions& opt) {
  require_kappa(kappa);
  MonatomicWave w;
  w.kappa = kappa;
  w.sigma = 1.0 + kappa * kappa / 24.0;
  w.phi = PiecewiseSolution::interpolate(
      make_mesh(opt), 2, {Extension::even_zero(), Extension::odd_zero()},
      [](int c, double t) {
        const double sech = 1.0 / std::cosh(0.5 * t);
        return c == 0 ? 0.125 * sech * sech : -0.125 * sech * sech * std::tanh(0.5 * t);
      },
      {w.sigma});
  return w;
}

MonatomicWave solve_profile(double kappa, const SolverOptions& opt, const MonatomicWave* guess) {
  require_kappa(kappa);
  MonatomicWave start = guess ? *guess : seed_wave(kappa, opt);
  const MfdeProblem pb = profile_problem(kappa, start.phi.mesh().length());
  start.phi.extensions() = pb.extensions;
  NewtonResult res = solve_newton(pb, start.phi, opt.newton);
  MonatomicWave w;
  w.kappa = kappa;
  w.sigma = res.solution.params()[0];
  w.phi = std::move(res.solution);
  w.report = std::move(res.report);
  check_negative(w);
  return w;
}

JostSolution solve_jost(const MonatomicWave& wave, const SolverOptions& opt, const JostSolution* guess) {
  const double kappa = wave.kappa;
  require_kappa(kappa);
  const Mesh& mesh = wave.phi.mesh();
  const double len = mesh.length();
  const MfdeProblem joint = combined_problem(kappa, len);

  PiecewiseSolution start(mesh, 4, combined_extensions(kappa));
  if (guess) {
    if (!(guess->system.mesh() == mesh)) throw ContractViolation("solve_jost: guess lives on another mesh");
    start = guess->system;
    start.extensions() = combined_extensions(kappa);
    copy_components(wave.phi, 0, start, 0, 2);
    start.params()[0] = wave.sigma;
  } else {
    const double w0 = dispersion::jost_frequency(wave.sigma);
    const double theta0 = kPhase0 * kappa / w0;
    const double beta0 = std::sin(w0 * theta0);
    PiecewiseSolution ups = PiecewiseSolution::interpolate(
        mesh, 2, upsilon_extensions(kappa), [](int c, double t) { return c == 0 ? -std::exp(-t) : std::exp(-t); },
        {wave.sigma, beta0, theta0});
    NewtonResult pre = solve_newton(frozen_jost_problem(wave), ups, opt.newton);
    copy_components(wave.phi, 0, start, 0, 2);
    copy_components(pre.solution, 0, start, 2, 2);
    start.params() = pre.solution.params();
  }
  NewtonResult res = solve_newton(joint, start, opt.newton);
  JostSolution j;
  j.kappa = kappa;
  j.system = std::move(res.solution);
  j.report = std::move(res.report);
  j.beta = j.system.params()[1];
  j.theta = j.system.params()[2];
  j.omega = dispersion::jost_frequency(j.system.params()[0]);
  if (std::abs(j.beta) < 1e-12) throw DegenerateNormalization("solve_jost: beta_Upsilon vanished");
  return j;
}

MonatomicWave wave_from_jost(const JostSolution& jost, double kappa) {
  MonatomicWave w;
  w.kappa = kappa;
  w.sigma = jost.system.params()[0];
  w.phi = PiecewiseSolution(jost.system.mesh(), 2, {Extension::even_zero(), Extension::odd_zero()},
                            {w.sigma});
  copy_components(jost.system, 0, w.phi, 0, 2);
  w.report = jost.report;
  check_negative(w);
  return w;
}

std::function<double(double)> compute_psi(const JostSolution& jost, double kappa, PsiKind which) {
  const PiecewiseSolution* sys = &jost.system;
  if (which == PsiKind::Chi) {
    return [sys, kappa](double tau) {
      const double a = sys->value(0, tau + kappa), b = sys->value(0, tau - kappa);
      return -0.5 * (phi_bracket(kappa, a) - phi_bracket(kappa, b));
    };
  }
  // Cross term of s2 + 2 s1 s2 under (2 + A_1) at s1 = phi, s2 = sin(omega .): one
  // lattice site shifts the phase by omega, and the product carries a factor 2.
  const double w = jost.omega;
  return [sys, kappa, w](double tau) {
    const double ph = w * tau / kappa;
    return 2.0 * (sys->value(0, tau + kappa) * std::sin(ph + w) + 2.0 * sys->value(0, tau) * std::sin(ph) +
                  sys->value(0, tau - kappa) * std::sin(ph - w));
  };
}

namespace {

struct Integrals {
  double eta = 0.0;
  double chi = 0.0;
};

Integrals midpoint(const JostSolution& jost, double kappa, long points) {
  const auto psi_eta = compute_psi(jost, kappa, PsiKind::Eta);
  const auto psi_chi = compute_psi(jost, kappa, PsiKind::Chi);
  const double len = jost.system.mesh().length();
  const double h = len / static_cast<double>(points);
  Integrals out;
  for (long i = 0; i < points; ++i) {
    const double tau = (static_cast<double>(i) + 0.5) * h;
    const double g = std::sin(jost.omega * (tau / kappa + jost.theta)) + jost.beta * jost.system.value(2, tau);
    out.eta += g * psi_eta(tau);
    out.chi += g * psi_chi(tau);
  }
  out.eta *= 2.0 * kappa * h;
  out.chi *= 2.0 * kappa * h;
  return out;
}

}  // namespace

AmplitudeCoefficient amplitude_coefficient(const JostSolution& jost, double kappa, long points, bool strict) {
  if (points < 10000) throw ContractViolation("amplitude_coefficient: need at least 1e4 quadrature points");
  const Integrals coarse = midpoint(jost, kappa, points);
  const Integrals fine = midpoint(jost, kappa, 2 * points);
  AmplitudeCoefficient a;
  a.I_eta = coarse.eta;
  a.I_chi = coarse.chi;
  a.K = -a.I_chi / a.I_eta;
  const double sigma = jost.system.params()[0];
  const double predicted = -dispersion::b_plus_prime(jost.omega, sigma, 0.0) * std::sin(jost.omega * jost.theta);
  a.monitor_residual = std::abs(a.I_eta - predicted) / std::abs(a.I_eta);
  a.chi_stability = std::abs(fine.chi - coarse.chi) / std::abs(coarse.chi);
  a.eta_stability = std::abs(fine.eta - coarse.eta) / std::abs(coarse.eta);
  const bool stable = a.chi_stability <= 1e-3;
  a.reliable = kappa >= 0.3 && stable;
  if (strict && !stable)
    throw UnreliableQuadrature("amplitude_coefficient: I_chi moves by " + std::to_string(a.chi_stability) +
                                   " when the grid is doubled",
                               coarse.chi, fine.chi);
  return a;
}

std::vector<ScanRow> kappa_scan(double from, double to, double step, const SolverOptions& opt,
                                const std::function<void(const ScanRow&, const JostSolution&)>& on_row,
                                const JostSolution* start) {
  if (!(from >= 0.125)) throw ContractViolation("kappa_scan: kappa must start at 1/8 or above");
  if (!(step > 0.0) || !(to >= from)) throw ContractViolation("kappa_scan: empty kappa range");
  const long count = static_cast<long>(std::floor((to - from) / step + 1e-9)) + 1;
  std::vector<ScanRow> rows;
  std::optional<JostSolution> prev;
  if (start) prev = *start;
  for (long i = 0; i < count; ++i) {
    const double kappa = from + static_cast<double>(i) * step;
    MonatomicWave wave;
    if (prev) {
      const MonatomicWave guess = wave_from_jost(*prev, kappa);
      wave = solve_profile(kappa, opt, &guess);
    } else {
      wave = solve_profile(kappa, opt);
    }
    JostSolution jost = solve_jost(wave, opt, prev ? &*prev : nullptr);
    ScanRow row;
    row.kappa = kappa;
    row.sigma = jost.system.params()[0];
    row.omega = jost.omega;
    row.theta = jost.theta;
    row.beta = jost.beta;
    row.amplitude = amplitude_coefficient(jost, kappa);
    row.newton_iterations = wave.report.iterations + jost.report.iterations;
    rows.push_back(row);
    if (on_row) on_row(row, jost);
    prev = std::move(jost);
  }
  return rows;
}

std::string scan_csv_header() {
  return "kappa,sigma,omega_ups,theta_ups,beta_ups,I_eta,I_chi,K,monitor_resid,reliable,newton_iters";
}

std::string scan_csv_row(const ScanRow& r) {
  char buf[512];
  std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%d,%d", r.kappa,
                r.sigma, r.omega, r.theta, r.beta, r.amplitude.I_eta, r.amplitude.I_chi, r.amplitude.K,
                r.amplitude.monitor_residual, r.amplitude.reliable ? 1 : 0, r.newton_iterations);
  return buf;
}

}  // namespace fputw::monatomic
