#include <cmath>
#include <numbers>

#include "doctest.h"
#include "fputw/diatomic.hpp"
#include "fputw/dispersion.hpp"
#include "fputw/errors.hpp"

using namespace fputw;
using namespace fputw::diatomic;

namespace {

Options coarse() {
  Options o;
  o.intervals = 128;
  return o;
}

monatomic::SolverOptions mono_coarse() {
  monatomic::SolverOptions o;
  o.intervals = 128;
  return o;
}

// Converged kappa = 1 wave at mu = 0 with mu fixed, shared across cases.
const DiatomicWave& equal_mass_wave() {
  static const DiatomicWave w = [] {
    auto mono = monatomic::solve_profile(1.0, mono_coarse());
    return solve_wave(1.0, FixedParam::Mu, 0.0, seed_from_monatomic(mono, coarse()), coarse());
  }();
  return w;
}

// Branch from mu = 0 down to mu = -0.5 (m = 2) at kappa = 1.
const Branch& heavy_branch() {
  static const Branch b = [] {
    BranchTarget target{FixedParam::Mu, -0.5, 0.5};
    StepPolicy policy;
    policy.initial = 0.05;
    policy.max_step = 0.1;
    return continue_branch(equal_mass_wave(), FixedParam::Mu, -0.05, target, policy, coarse());
  }();
  return b;
}

double ripple_deviation(const PeriodicRipple& r) {
  // |beta P(omega_P-scaled) - beta * linear mode| over one linear period
  const auto mode = dispersion::critical_frequency(r.scalars.sigma, r.scalars.mu);
  const double k = std::numbers::pi / r.p.mesh().length();
  const double a = 1.0 / std::hypot(mode.nu1, k * mode.nu2);
  const double w = ripple_frequency(r);
  double dev = 0.0;
  for (int i = 0; i <= 400; ++i) {
    const double xi = 2.0 * std::numbers::pi / mode.omega * i / 400.0;
    const auto [p1, p2] = ripple_profile(r, w * xi);
    const double l1 = r.scalars.beta * a * mode.nu1 * std::cos(mode.omega * xi);
    const double l2 = r.scalars.beta * a * mode.nu2 * std::sin(mode.omega * xi);
    dev = std::max(dev, std::hypot(p1 - l1, p2 - l2));
  }
  return dev;
}

}  // namespace

TEST_SUITE("diatomic") {
  TEST_CASE("names round-trip") {
    for (FixedParam p : {FixedParam::Sigma, FixedParam::Mu, FixedParam::BetaP}) CHECK(parse_fixed(to_string(p)) == p);
    for (RippleClass c : {RippleClass::Positive, RippleClass::Negative, RippleClass::SmallRipple, RippleClass::Solitary})
      CHECK(parse_class(to_string(c)) == c);
    CHECK_THROWS_AS(parse_fixed("kappa"), ContractViolation);
    Scalars s{1.2, -0.5, 0.0, 3.0};
    CHECK(s.m() == doctest::Approx(2.0));
  }

  TEST_CASE("boundary counts") {
    auto pb = wave_problem(1.0, FixedParam::BetaP, 0.0, 32.0);
    CHECK(pb.components == 8);
    CHECK(pb.parameters == 3);
    CHECK(pb.boundary.size() == 11);
    auto per = periodic_problem(1.2, -0.3, 0.01, 32.0);
    CHECK(per.boundary.size() == 5);
  }

  TEST_CASE("classification") {
    CHECK(classify_point(0.0, 0.0, 1.0) == RippleClass::Solitary);
    CHECK(alpha_threshold(1.0) == doctest::Approx(1.25e-6));
    CHECK(classify_point(1e-3, 0.1, 1.0) == RippleClass::Positive);
    CHECK(classify_point(-1e-3, -0.1, 1.0) == RippleClass::Negative);
    CHECK(classify_point(1e-7, 0.1, 1.0) == RippleClass::SmallRipple);

    Branch b;
    for (int i = 0; i < 5; ++i) {
      BranchPoint p;
      p.kappa = 1.0;
      p.scalars = {1.1, -0.004 * i, 1e-6, 1.0};
      p.alpha = 1e-7;
      b.points.push_back(p);
    }
    auto cls = classify_branch(b, 0.01);
    CHECK(cls[0] == RippleClass::SmallRipple);  // the run spans 0.016 in mu
    cls = classify_branch(b, 0.015);
    CHECK(cls[2] == RippleClass::SmallRipple);
    cls = classify_branch(b, 0.02);
    CHECK(cls[2] == RippleClass::Positive);
  }

  TEST_CASE("linear mode solves the beta = 0 problem") {
    auto lin = linear_ripple(1.2, -0.3, 0.0, coarse());
    auto pb = periodic_problem(1.2, -0.3, 0.0, 32.0);
    CHECK(assemble_residual(pb, lin.p).lpNorm<Eigen::Infinity>() < 1e-6);
    CHECK(solve_periodic(1.2, -0.3, 0.0, coarse()).report.iterations <= 2);
  }

  TEST_CASE("periodic ripple invariants") {
    auto r = solve_periodic(1.2, -0.3, 0.02, coarse());
    CHECK(std::abs(r.p.integral(0)) < 1e-10);
    const double a = r.p.value(0, 0.0), b = r.p.value(3, 0.0);
    CHECK(std::abs(a * a + b * b - 1.0) < 1e-10);
    CHECK(std::abs(r.p.value(1, 0.0)) < 1e-10);
    CHECK(std::abs(r.p.value(2, 0.0)) < 1e-10);
    CHECK(std::abs(r.p.value(2, 32.0)) < 1e-10);
    CHECK(r.orientation > 0.0);
    CHECK_FALSE(r.orientation_flip);
    CHECK_THROWS_AS(solve_periodic(dispersion::sound_speed(-0.3), -0.3, 0.01, coarse()), NoBracket);
  }

  TEST_CASE("ripple frequency tends to the critical frequency") {
    const double sigma = 1.2, mu = -0.3;
    const double w0 = dispersion::critical_frequency(sigma, mu).omega;
    const double e1 = std::abs(ripple_frequency(solve_periodic(sigma, mu, 0.02, coarse())) - w0);
    const double e2 = std::abs(ripple_frequency(solve_periodic(sigma, mu, 0.01, coarse())) - w0);
    CHECK(e2 < e1);
    CHECK(e2 < 0.1);
    CHECK(std::abs(ripple_frequency(solve_periodic(sigma, mu, 0.0, coarse())) - w0) < 1e-9);
  }

  TEST_CASE("equal masses: P1 is of order beta") {
    auto r = solve_periodic(1.2, 0.0, 0.01, coarse());
    const double p1 = r.p.sup_norm(0), p2 = r.p.sup_norm(2);
    CHECK(p1 / p2 < 0.05);
    CHECK(p1 > 0.0);
  }

  TEST_CASE("nonlinear ripple deviates quadratically from the linear mode") {
    const double sigma = 1.2, mu = -0.3;
    std::vector<double> dev;
    for (double beta : {0.02, 0.01, 0.005}) dev.push_back(ripple_deviation(solve_periodic(sigma, mu, beta, coarse())));
    const double r1 = dev[0] / dev[1], r2 = dev[1] / dev[2];
    MESSAGE("ratios " << r1 << " " << r2);
    CHECK(r1 == doctest::Approx(4.0).epsilon(0.2));
    CHECK(r2 == doctest::Approx(4.0).epsilon(0.2));
  }

  TEST_CASE("equal-mass wave reduces to the monatomic profile") {
    const DiatomicWave& w = equal_mass_wave();
    auto mono = monatomic::solve_profile(1.0, mono_coarse());
    CHECK(w.system.sup_norm(2) < 1e-8);
    CHECK(std::abs(w.scalars.beta) < 1e-10);
    CHECK(std::abs(w.alpha) < 1e-10);
    CHECK(w.scalars.sigma == doctest::Approx(mono.sigma).epsilon(1e-9));
    double dev = 0.0;
    for (int i = 0; i <= 3200; ++i) dev = std::max(dev, std::abs(w.system.value(0, i * 0.01) - mono.phi.value(0, i * 0.01)));
    CHECK(dev < 1e-6);
  }

  TEST_CASE("symmetry transform") {
    const DiatomicWave& w = equal_mass_wave();
    auto t = symmetry_transform(w);
    CHECK(t.scalars.mu == 0.0);
    CHECK(t.scalars.sigma == w.scalars.sigma);
    CHECK(t.system.sup_norm(2) < 1e-8);

    const Branch& b = heavy_branch();
    REQUIRE(b.last);
    const DiatomicWave& heavy = *b.last;
    CHECK(heavy.scalars.mu <= -0.5 + 1e-12);
    auto once = symmetry_transform(heavy);
    CHECK(once.scalars.m() == doctest::Approx(1.0 / heavy.scalars.m()).epsilon(1e-12));
    CHECK(once.scalars.sigma == doctest::Approx(heavy.scalars.sigma * std::sqrt(heavy.scalars.m())).epsilon(1e-12));
    CHECK(wave_residual(once) < 1e-8);
    auto twice = symmetry_transform(once);
    CHECK(std::abs(twice.scalars.sigma - heavy.scalars.sigma) < 1e-12);
    CHECK(std::abs(twice.scalars.mu - heavy.scalars.mu) < 1e-12);
    CHECK(std::abs(twice.scalars.beta - heavy.scalars.beta) < 1e-12);
    CHECK(std::abs(twice.alpha - heavy.alpha) < 1e-12);
  }

  TEST_CASE("displacement profiles") {
    const DiatomicWave& w = equal_mass_wave();
    auto eq = reconstruct_displacement_profiles(w);
    for (double xi : {0.0, 0.7, 3.0}) CHECK(eq.r_odd(xi) == doctest::Approx(eq.r_even(xi)).epsilon(1e-8));

    const DiatomicWave& heavy = *heavy_branch().last;
    auto core = reconstruct_displacement_profiles(heavy, true);
    for (double xi : {0.3, 1.1, 5.0}) CHECK(core.r_odd(-xi) == doctest::Approx(core.r_even(xi)).epsilon(1e-12));
    const auto [s1, s2] = symmetrized_profile(heavy, 0.4, true);
    CHECK(core.r_odd(0.4) == doctest::Approx(s1 + s2));
    CHECK(core.r_even(0.4) == doctest::Approx(s1 - s2));
  }

  TEST_CASE("continuation records points and retraces") {
    const Branch& b = heavy_branch();
    CHECK(b.termination == "target_reached");
    CHECK(b.points.size() >= 3);
    CHECK(std::abs(b.points.front().alpha) < 1e-10);
    for (const auto& p : b.points) CHECK(p.residual < 1e-10);

    // alpha changes sign at mu = 0 along the branch
    StepPolicy policy;
    policy.max_points = 3;
    auto up = continue_branch(equal_mass_wave(), FixedParam::Mu, 0.02, {FixedParam::Mu, -1.0, 1.0}, policy, coarse());
    REQUIRE(up.points.size() >= 2);
    CHECK(up.points[1].alpha * b.points[1].alpha < 0.0);

    // forward then backwards to the seed
    policy.max_points = 400;
    const DiatomicWave& seed = equal_mass_wave();
    auto fwd = continue_branch(seed, FixedParam::Mu, -0.02, {FixedParam::Mu, -0.04 - 1e-12, 1.0}, policy, coarse());
    REQUIRE(fwd.last);
    auto back = solve_wave(1.0, FixedParam::Mu, 0.0, *fwd.last, coarse());
    CHECK(std::abs(back.scalars.sigma - seed.scalars.sigma) < 1e-8);
    CHECK(std::abs(back.scalars.beta - seed.scalars.beta) < 1e-8);
    CHECK(std::abs(back.scalars.omega - seed.scalars.omega) < 1e-8);
  }

  TEST_CASE("size cap ends a solve explicitly") {
    Options o = coarse();
    o.size_cap = 1000;
    try {
      solve_wave(1.0, FixedParam::Mu, 0.0, equal_mass_wave(), o);
      FAIL("expected BranchTerminated");
    } catch (const BranchTerminated& e) {
      CHECK(e.reason() == "SizeCap");
    }
  }
}
