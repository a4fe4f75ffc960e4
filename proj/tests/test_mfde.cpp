#include <cmath>
#include <random>

#include "doctest.h"
#include "fputw/errors.hpp"
#include "fputw/mfde.hpp"

using namespace fputw;

namespace {

// u'' = -u as (u, u'), u(0) = 0, u'(0) = 1; exact solution sin.
MfdeProblem oscillator() {
  MfdeProblem pb;
  pb.components = 2;
  pb.rhs = [](double, const Stencil& v, std::span<const double>, std::span<double> out) {
    out[0] = v(0, 1);
    out[1] = -v(0, 0);
  };
  pb.boundary = {[](const PiecewiseSolution& s) { return s.value(0, 0.0); },
                 [](const PiecewiseSolution& s) { return s.value(1, 0.0) - 1.0; }};
  pb.extensions = {Extension::odd_zero(), Extension::even_zero()};
  return pb;
}

// phi'(t) = lambda e^{lambda} phi(t - 1) with history phi(t) = e^{lambda t} for t < 0,
// so phi = e^{lambda t} throughout.
MfdeProblem delay_problem(double lambda) {
  MfdeProblem pb;
  pb.components = 1;
  pb.shifts = {Shift::constant(-1.0)};
  const double a = lambda * std::exp(lambda);
  pb.rhs = [a](double, const Stencil& v, std::span<const double>, std::span<double> out) { out[0] = a * v(1, 0); };
  pb.boundary = {[](const PiecewiseSolution& s) { return s.value(0, 0.0) - 1.0; }};
  auto history = [lambda](double t, std::span<const double>) { return std::exp(-lambda * t); };
  pb.extensions = {Extension::affine_zero(0.0, history, "history")};
  return pb;
}

PiecewiseSolution zeros(const Mesh& mesh, const MfdeProblem& pb) {
  return PiecewiseSolution::interpolate(mesh, pb.components, pb.extensions, [](int, double) { return 0.0; });
}

}  // namespace

TEST_SUITE("mfde") {
  TEST_CASE("mesh construction") {
    Mesh m = build_mesh(32.0, 512, 3);
    CHECK(m.intervals() == 512);
    CHECK(m.width() == doctest::Approx(0.0625).epsilon(1e-15));
    CHECK(build_mesh(32.0, 4, 3).width() == doctest::Approx(8.0));
    CHECK_THROWS_AS(build_mesh(0.0, 16, 3), ContractViolation);
    CHECK_THROWS_AS(build_mesh(1.0, 3, 3), ContractViolation);
    CHECK_THROWS_AS(build_mesh(1.0, 8, 6), ContractViolation);
  }

  TEST_CASE("gauss nodes integrate polynomials of degree 2k-1") {
    for (int k = 2; k <= 5; ++k) {
      std::vector<double> x, w;
      gauss_legendre(k, x, w);
      for (int p = 0; p < 2 * k; ++p) {
        double q = 0.0;
        for (int i = 0; i < k; ++i) q += w[i] * std::pow(x[i], p);
        CHECK(q == doctest::Approx(1.0 / (p + 1)).epsilon(1e-13));
      }
    }
  }

  TEST_CASE("extension rules") {
    Mesh mesh = build_mesh(4.0, 8, 3);
    auto f = [](int c, double t) { return c == 0 ? std::sin(t) : std::cos(t); };
    auto s = PiecewiseSolution::interpolate(mesh, 2, {Extension::odd_zero(), Extension::even_zero()}, f);
    CHECK(s.value(0, 0.0) == doctest::Approx(0.0).scale(1.0).epsilon(1e-14));
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> u(0.0, 4.0);
    for (int i = 0; i < 10; ++i) {
      const double t = u(rng);
      CHECK(s.value(1, -t) == s.value(1, t));
      CHECK(s.value(0, -t) == -s.value(0, t));
    }
    CHECK(s.value(1, 5.0) == 0.0);

    auto p = PiecewiseSolution::interpolate(mesh, 1, {Extension::even_periodic(8.0)},
                                            [](int, double t) { return std::cos(M_PI * t / 4.0); });
    CHECK(p.value(0, 5.0) == doctest::Approx(p.value(0, 3.0)).epsilon(1e-14));
    CHECK(p.value(0, 9.5) == doctest::Approx(p.value(0, 1.5)).epsilon(1e-14));

    auto none = PiecewiseSolution::interpolate(mesh, 1, {Extension{}}, [](int, double) { return 1.0; });
    CHECK_THROWS_AS(none.value(0, -1.0), ContractViolation);
  }

  TEST_CASE("constant problem converges immediately") {
    MfdeProblem pb;
    pb.components = 1;
    pb.rhs = [](double, const Stencil&, std::span<const double>, std::span<double> out) { out[0] = 0.0; };
    pb.boundary = {[](const PiecewiseSolution& s) { return s.value(0, 0.0) - 1.0; }};
    pb.extensions = {Extension::even_zero()};
    Mesh mesh = build_mesh(2.0, 8, 3);

    auto zero = zeros(mesh, pb);
    Eigen::VectorXd r = assemble_residual(pb, zero);
    CHECK(r.size() == static_cast<Eigen::Index>(unknown_count(pb, mesh)));
    CHECK(r(r.size() - 1) == -1.0);

    auto exact = PiecewiseSolution::interpolate(mesh, 1, pb.extensions, [](int, double) { return 1.0; });
    CHECK(assemble_residual(pb, exact).lpNorm<Eigen::Infinity>() < 1e-12);
    auto res = solve_newton(pb, exact);
    CHECK(res.report.iterations <= 1);
    CHECK(res.solution.value(0, 1.3) == doctest::Approx(1.0).epsilon(1e-12));
  }

  TEST_CASE("boundary count is enforced") {
    MfdeProblem pb = oscillator();
    pb.boundary.pop_back();
    Mesh mesh = build_mesh(1.0, 4, 3);
    CHECK_THROWS_AS(solve_newton(pb, zeros(mesh, oscillator())), ContractViolation);
    pb = oscillator();
    pb.parameters = 1;
    CHECK_THROWS_AS(pb.validate(), ContractViolation);
  }

  TEST_CASE("delay equation with exponential history") {
    const double lambda = -0.7;
    MfdeProblem pb = delay_problem(lambda);
    Mesh mesh = build_mesh(4.0, 32, 4);
    auto exact = PiecewiseSolution::interpolate(mesh, 1, pb.extensions,
                                                [&](int, double t) { return std::exp(lambda * t); });
    const double tol = NewtonConfig{}.tolerance;
    CHECK(assemble_residual(pb, exact).lpNorm<Eigen::Infinity>() < 1e3 * tol);
    auto res = solve_newton(pb, zeros(mesh, pb));
    CHECK(res.report.residual < tol);
    for (double t : {0.5, 1.0, 2.25, 3.9})
      CHECK(res.solution.value(0, t) == doctest::Approx(std::exp(lambda * t)).epsilon(1e-8));
  }

  TEST_CASE("sparsity of the collocation residual") {
    const double lambda = -0.7;
    MfdeProblem pb = delay_problem(lambda);
    Mesh mesh = build_mesh(4.0, 16, 3);  // width 1/4, so the shift spans 4 intervals
    auto base = PiecewiseSolution::interpolate(mesh, 1, pb.extensions,
                                               [&](int, double t) { return std::exp(lambda * t); });
    Eigen::VectorXd r0 = assemble_residual(pb, base);
    auto bumped = base;
    bumped.coefficients()[bumped.block_offset(8, 0) + 2] += 1e-3;
    Eigen::VectorXd r1 = assemble_residual(pb, bumped);
    const int per_interval = mesh.gauss();
    for (Eigen::Index row = 0; row < mesh.intervals() * per_interval; ++row) {
      const int interval = static_cast<int>(row / per_interval);
      const bool touched = interval == 8 || interval == 12;
      if (!touched) CHECK(r1(row) == r0(row));
    }
    const double changed = (r1 - r0).head(8 * per_interval + per_interval).tail(per_interval).norm();
    CHECK(changed > 0.0);
    auto J = assemble_jacobian(pb, base);
    CHECK(J.nonZeros() < J.rows() * J.cols() / 4);
  }

  TEST_CASE("collocation error decays at the superconvergent rate") {
    MfdeProblem pb = oscillator();
    const double L = 4.0;
    const int k = 3;
    std::vector<double> errors;
    for (int M : {4, 8, 16, 32}) {
      Mesh mesh = build_mesh(L, M, k);
      auto res = solve_newton(pb, zeros(mesh, pb));
      double err = 0.0;
      for (int i = 0; i <= M; ++i) {
        const double t = mesh.left(i);
        err = std::max(err, std::abs(res.solution.interior_value(0, t) - std::sin(t)));
      }
      errors.push_back(err);
    }
    for (std::size_t i = 1; i < errors.size(); ++i) {
      const double order = std::log2(errors[i - 1] / errors[i]);
      MESSAGE("observed order " << order);
      CHECK(order >= 2 * k - 1);
    }
  }

  TEST_CASE("extension coherence and determinism of a converged solution") {
    MfdeProblem pb = oscillator();
    Mesh mesh = build_mesh(3.0, 16, 3);
    auto a = solve_newton(pb, zeros(mesh, pb));
    auto b = solve_newton(pb, zeros(mesh, pb));
    auto ca = a.solution.coefficients();
    auto cb = b.solution.coefficients();
    CHECK(std::equal(ca.begin(), ca.end(), cb.begin()));
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> u(0.0, 3.0);
    for (int i = 0; i < 10; ++i) {
      const double t = u(rng);
      CHECK(a.solution.value(0, -t) == -a.solution.value(0, t));
      CHECK(a.solution.value(1, -t) == a.solution.value(1, t));
    }
  }

  TEST_CASE("refinement preserves the function") {
    Mesh mesh = build_mesh(2.0, 4, 3);
    auto s = PiecewiseSolution::interpolate(mesh, 1, {Extension::even_zero()},
                                            [](int, double t) { return t * t * t - t; });
    auto r = s.refined(2);
    CHECK(r.mesh().intervals() == 8);
    for (double t : {0.1, 0.77, 1.5, 1.99}) CHECK(r.value(0, t) == doctest::Approx(s.value(0, t)).epsilon(1e-13));
    CHECK(s.integral(0) == doctest::Approx(2.0).epsilon(1e-13));
  }

  TEST_CASE("dense and sparse linear solvers agree") {
    MfdeProblem pb = oscillator();
    Mesh mesh = build_mesh(2.0, 8, 3);
    NewtonConfig dense;
    dense.solver = NewtonConfig::LinearSolver::Dense;
    auto a = solve_newton(pb, zeros(mesh, pb));
    auto b = solve_newton(pb, zeros(mesh, pb), dense);
    CHECK(a.solution.value(0, 1.7) == doctest::Approx(b.solution.value(0, 1.7)).epsilon(1e-12));
  }
}
