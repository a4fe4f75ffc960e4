#include <cmath>

#include "doctest.h"
#include "fputw/dispersion.hpp"
#include "fputw/errors.hpp"
#include "fputw/monatomic.hpp"

using namespace fputw;
using namespace fputw::monatomic;

namespace {

SolverOptions small_opts() {
  SolverOptions o;
  o.intervals = 256;
  return o;
}

double sech2_profile(double tau) {
  const double s = 1.0 / std::cosh(tau / 2.0);
  return s * s / 8.0;
}

}  // namespace

TEST_SUITE("monatomic") {
  TEST_CASE("profile problem counts") {
    auto pb = profile_problem(1.0, 32.0);
    CHECK(pb.components == 2);
    CHECK(pb.parameters == 1);
    CHECK(pb.boundary.size() == 3);
    auto joint = combined_problem(1.0, 32.0);
    CHECK(joint.boundary.size() == 7);
    CHECK(joint.components == 4);
    CHECK(joint.parameters == 3);
  }

  TEST_CASE("speed near the long-wave limit") {
    auto w = solve_profile(0.5, small_opts());
    const double predicted = 0.25 / 24.0;
    CHECK(std::abs((w.sigma - 1.0) - predicted) < 0.05 * predicted);
    CHECK(w.phi.value(0, 0.0) == doctest::Approx(0.125).epsilon(1e-10));
    CHECK(std::abs(w.phi.value(1, 0.0)) < 1e-10);
    CHECK(std::abs(w.phi.value(0, 32.0)) < 1e-10);
    CHECK_FALSE(w.negative_profile);
  }

  TEST_CASE("small-kappa profile approaches sech^2") {
    auto w = solve_profile(0.125, small_opts());
    double dev = 0.0;
    for (int i = 0; i <= 3200; ++i) {
      const double tau = i * 0.01;
      dev = std::max(dev, std::abs(w.phi.value(0, tau) - sech2_profile(tau)));
    }
    MESSAGE("sup |Phi - sech^2/8| = " << dev);
    CHECK(dev < 0.125 * 0.01);
    CHECK((w.sigma - 1.0) * 24.0 / (0.125 * 0.125) == doctest::Approx(1.0).epsilon(0.1));
  }

  TEST_CASE("converged profile stays converged on a doubled mesh") {
    SolverOptions o;
    auto w = solve_profile(1.0, o);
    auto pb = profile_problem(1.0, 32.0);
    CHECK(assemble_residual(pb, w.phi).lpNorm<Eigen::Infinity>() < 1e-10);
    // The same polynomials violate the finer collocation equations at O(h^k);
    // the oracle is a re-solve on the finer mesh.
    MonatomicWave refined = w;
    refined.phi = w.phi.refined(2);
    MESSAGE("collocation defect of the refined interpolant " << assemble_residual(pb, refined.phi).lpNorm<Eigen::Infinity>());
    SolverOptions fine = o;
    fine.intervals *= 2;
    auto w2 = solve_profile(1.0, fine, &refined);
    CHECK(w2.report.iterations <= 1);
    double dev = 0.0;
    for (int i = 0; i <= 3200; ++i) dev = std::max(dev, std::abs(w2.phi.value(0, i * 0.01) - w.phi.value(0, i * 0.01)));
    CHECK(dev < 1e-8);
    CHECK(std::abs(w2.sigma - w.sigma) < 1e-10);
  }

  TEST_CASE("Jost solution at kappa = 0.3") {
    const double kappa = 0.3;
    auto w = solve_profile(kappa, small_opts());
    auto j = solve_jost(w, small_opts());
    const double target = 0.2208053960 * kappa;
    CHECK(std::abs(j.omega * j.theta - target) < 0.1 * target);
    CHECK(std::abs(j.upsilon(32.0)) < 1e-10);
    CHECK(std::abs(j.system.value(3, 32.0)) < 1e-10);
    CHECK(j.system.value(3, 0.0) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(j.upsilon(0.0) == doctest::Approx(-std::sin(j.omega * j.theta) / j.beta).epsilon(1e-8));
    CHECK(j.omega == doctest::Approx(dispersion::jost_frequency(j.system.params()[0])).epsilon(1e-12));

    double peak = 0.0;
    for (double xi = 0.0; xi <= 32.0 / kappa; xi += 0.05)
      peak = std::max(peak, std::abs(j.gamma(xi) - std::sin(j.omega * (xi + j.theta))));
    const double tail = std::abs(j.gamma(32.0 / kappa) - std::sin(j.omega * (32.0 / kappa + j.theta)));
    CHECK(tail < 0.01 * peak);
    for (double xi : {0.3, 1.7, 4.0, 9.5, 20.0, 33.3, 50.0, 70.0, 90.0, 105.0})
      CHECK(std::abs(j.gamma(xi) + j.gamma(-xi)) < 1e-10);
  }

  TEST_CASE("Psi functions") {
    const double kappa = 1.0;
    auto w = solve_profile(kappa, small_opts());
    auto j = solve_jost(w, small_opts());
    auto eta = compute_psi(j, kappa, PsiKind::Eta);
    auto chi = compute_psi(j, kappa, PsiKind::Chi);
    CHECK(std::abs(chi(0.0)) < 1e-14);
    CHECK(std::abs(eta(0.0)) < 1e-14);

    auto phi = [&](double t) { return j.system.value(0, std::abs(t)); };
    const double tau = 1.0, k2 = kappa * kappa, wv = j.omega, ph = wv * tau / kappa;
    const double chi_ref = -0.5 * (phi(tau + kappa) + k2 * phi(tau + kappa) * phi(tau + kappa) - phi(tau - kappa) -
                                   k2 * phi(tau - kappa) * phi(tau - kappa));
    const double eta_ref = 2.0 * (phi(tau + kappa) * std::sin(ph + wv) + 2.0 * phi(tau) * std::sin(ph) +
                                  phi(tau - kappa) * std::sin(ph - wv));
    CHECK(chi(tau) == doctest::Approx(chi_ref).epsilon(1e-13));
    CHECK(eta(tau) == doctest::Approx(eta_ref).epsilon(1e-13));
  }

  TEST_CASE("amplitude coefficient and monitor at kappa = 1") {
    auto w = solve_profile(1.0, small_opts());
    auto j = solve_jost(w, small_opts());
    auto a = amplitude_coefficient(j, 1.0, 100000);
    CHECK(a.monitor_residual < 1e-3);
    CHECK(a.K < 0.0);
    CHECK(a.reliable);
    CHECK(a.eta_stability < 1e-4);
    CHECK_THROWS_AS(amplitude_coefficient(j, 1.0, 1000), ContractViolation);
  }

  TEST_CASE("kappa scan") {
    std::vector<ScanRow> rows = kappa_scan(0.5, 1.0, 0.25, small_opts());
    REQUIRE(rows.size() == 3);
    for (std::size_t i = 1; i < rows.size(); ++i) CHECK(rows[i].sigma > rows[i - 1].sigma);
    auto single = kappa_scan(0.75, 0.75, 0.25, small_opts());
    REQUIRE(single.size() == 1);
    CHECK(single[0].sigma == doctest::Approx(rows[1].sigma).epsilon(1e-9));
    CHECK_THROWS_AS(kappa_scan(0.1, 1.0, 0.1), ContractViolation);
  }
}
