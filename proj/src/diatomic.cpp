#include "fputw/diatomic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>
#include <numbers>

#include "fputw/dispersion.hpp"

namespace fputw::diatomic {

namespace {

constexpr int kV1 = 0, kV2 = 2, kP1 = 4, kP2 = 6;

// D_nu(mu) applied to (g1, g2) sampled at (center, +nu, -nu).
void apply_d(double mu, const double g1[3], const double g2[3], double& out1, double& out2) {
  out1 = 0.5 * ((2.0 + mu) * (2.0 * g1[0] - g1[1] - g1[2]) + mu * (g2[1] - g2[2]));
  out2 = 0.5 * (-mu * (g1[1] - g1[2]) + (2.0 + mu) * (2.0 * g2[0] + g2[1] + g2[2]));
}

FixedParam free_param(FixedParam fixed, int which) {
  static constexpr FixedParam order[3] = {FixedParam::Sigma, FixedParam::Mu, FixedParam::BetaP};
  int seen = 0;
  for (FixedParam p : order) {
    if (p == fixed) continue;
    if (seen++ == which) return p;
  }
  return FixedParam::BetaP;
}

double sup_pair(const PiecewiseSolution& s, int c1, int c2) {
  const double a = s.sup_norm(c1), b = s.sup_norm(c2);
  return std::sqrt(a * a + b * b);
}

double orientation_value(const PiecewiseSolution& s, int p1, int dp2, const Scalars& sc, bool& ok) {
  ok = true;
  try {
    const auto mode = dispersion::critical_frequency(sc.sigma, sc.mu);
    const double len = s.mesh().length();
    return mode.nu1 * s.value(p1, 0.0) + mode.nu2 * len * s.value(dp2, 0.0) / (std::numbers::pi * mode.omega);
  } catch (const Error&) {
    ok = false;
    return 0.0;
  }
}

BoundaryFunctional at(int component, double t, double target) {
  return [=](const PiecewiseSolution& s) { return s.value(component, t) - target; };
}

void check_cap(std::size_t unknowns, const Options& opt) {
  if (opt.size_cap > 0 && unknowns > opt.size_cap)
    throw BranchTerminated("SizeCap", "problem with " + std::to_string(unknowns) +
                                          " unknowns exceeds the cap of " + std::to_string(opt.size_cap));
}

void finish_wave(DiatomicWave& w) {
  w.alpha = w.scalars.beta * sup_pair(w.system, kP1, kP2);
  w.cls = classify_point(w.alpha, w.scalars.beta, w.kappa);
  bool ok = true;
  const double o = orientation_value(w.system, kP1, kP2 + 1, w.scalars, ok);
  w.orientation_flip = ok && !(o > 0.0);
}

// a + t (b - a) on every coefficient and scalar; meshes must agree.
DiatomicWave blend(const DiatomicWave& a, const DiatomicWave& b, double t) {
  DiatomicWave out = a;
  auto dst = out.system.coefficients();
  const auto ca = a.system.coefficients();
  const auto cb = b.system.coefficients();
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = ca[i] + t * (cb[i] - ca[i]);
  out.kappa = a.kappa + t * (b.kappa - a.kappa);
  out.scalars.sigma = a.scalars.sigma + t * (b.scalars.sigma - a.scalars.sigma);
  out.scalars.mu = a.scalars.mu + t * (b.scalars.mu - a.scalars.mu);
  out.scalars.beta = a.scalars.beta + t * (b.scalars.beta - a.scalars.beta);
  out.scalars.omega = a.scalars.omega + t * (b.scalars.omega - a.scalars.omega);
  return out;
}

}  // namespace

std::string to_string(FixedParam p) {
  switch (p) {
    case FixedParam::Sigma:
      return "sigma";
    case FixedParam::Mu:
      return "mu";
    case FixedParam::BetaP:
      return "beta_P";
  }
  return "?";
}

std::string to_string(RippleClass c) {
  switch (c) {
    case RippleClass::Positive:
      return "Positive";
    case RippleClass::Negative:
      return "Negative";
    case RippleClass::SmallRipple:
      return "SmallRipple";
    case RippleClass::Solitary:
      return "Solitary";
  }
  return "?";
}

FixedParam parse_fixed(const std::string& name) {
  if (name == "sigma") return FixedParam::Sigma;
  if (name == "mu") return FixedParam::Mu;
  if (name == "beta_P" || name == "beta") return FixedParam::BetaP;
  throw ContractViolation("unknown fixed parameter '" + name + "'");
}

RippleClass parse_class(const std::string& name) {
  for (RippleClass c : {RippleClass::Positive, RippleClass::Negative, RippleClass::SmallRipple, RippleClass::Solitary})
    if (to_string(c) == name) return c;
  throw ContractViolation("unknown ripple class '" + name + "'");
}

double Scalars::get(FixedParam p) const {
  switch (p) {
    case FixedParam::Sigma:
      return sigma;
    case FixedParam::Mu:
      return mu;
    case FixedParam::BetaP:
      return beta;
  }
  return 0.0;
}

void Scalars::set(FixedParam p, double v) {
  switch (p) {
    case FixedParam::Sigma:
      sigma = v;
      break;
    case FixedParam::Mu:
      mu = v;
      break;
    case FixedParam::BetaP:
      beta = v;
      break;
  }
}

std::vector<double> pack_params(const Scalars& s, FixedParam fixed) {
  return {s.get(free_param(fixed, 0)), s.get(free_param(fixed, 1)), s.omega};
}

Scalars unpack_params(std::span<const double> params, FixedParam fixed, double fixed_value) {
  Scalars s;
  s.set(fixed, fixed_value);
  s.set(free_param(fixed, 0), params[0]);
  s.set(free_param(fixed, 1), params[1]);
  s.omega = params[2];
  return s;
}

std::vector<Extension> periodic_extensions(double length) {
  const double period = 2.0 * length;
  return {Extension::even_periodic(period), Extension::odd_periodic(period), Extension::odd_periodic(period),
          Extension::even_periodic(period)};
}

std::vector<Extension> wave_extensions(double length) {
  std::vector<Extension> e = {Extension::even_zero(), Extension::odd_zero(), Extension::odd_zero(),
                              Extension::even_zero()};
  for (auto& x : periodic_extensions(length)) e.push_back(x);
  return e;
}

MfdeProblem periodic_problem(double sigma, double mu, double beta, double length) {
  if (!(mu > -1.0)) throw ContractViolation("periodic_problem: mu must exceed -1");
  MfdeProblem pb;
  pb.components = 4;
  pb.parameters = 1;
  auto plus = [](double, std::span<const double>, std::span<const double> p) { return p[0]; };
  auto minus = [](double, std::span<const double>, std::span<const double> p) { return -p[0]; };
  pb.shifts = {Shift{plus, {0, 2}, false}, Shift{minus, {0, 2}, false}};
  pb.rhs = [sigma, mu, beta](double, const Stencil& v, std::span<const double> p, std::span<double> out) {
    double g1[3], g2[3];
    for (int q = 0; q < 3; ++q) {
      const double a = v(q, 0), b = v(q, 2);
      g1[q] = a + beta * (a * a + b * b);
      g2[q] = b + 2.0 * beta * a * b;
    }
    double d1, d2;
    apply_d(mu, g1, g2, d1, d2);
    const double w2s2 = p[0] * p[0] * sigma * sigma;
    out[0] = v(0, 1);
    out[1] = -d1 / w2s2;
    out[2] = v(0, 3);
    out[3] = -d2 / w2s2;
  };
  pb.boundary = {[](const PiecewiseSolution& s) { return s.integral(0); }, at(1, 0.0, 0.0), at(2, 0.0, 0.0),
                 at(2, length, 0.0),
                 [](const PiecewiseSolution& s) {
                   const double a = s.value(0, 0.0), b = s.value(3, 0.0);
                   return a * a + b * b - 1.0;
                 }};
  pb.extensions = periodic_extensions(length);
  return pb;
}

MfdeProblem wave_problem(double kappa, FixedParam fixed, double fixed_value, double length) {
  if (!(kappa > 0.0)) throw ContractViolation("wave_problem: kappa must be positive");
  MfdeProblem pb;
  pb.components = 8;
  pb.parameters = 3;
  const std::vector<int> vc = {kV1, kV2}, pc = {kP1, kP2};
  auto rescale = [kappa](double shift) {
    return [kappa, shift](double tau, std::span<const double>, std::span<const double> p) {
      return p[2] * (tau + shift) / kappa - tau;
    };
  };
  auto plus = [](double, std::span<const double>, std::span<const double> p) { return p[2]; };
  auto minus = [](double, std::span<const double>, std::span<const double> p) { return -p[2]; };
  // stencil points: 1,2 V at tau -+ kappa; 3,4,5 P~ at omega (tau, tau + kappa, tau - kappa) / kappa;
  // 6,7 P~ at tau -+ omega
  pb.shifts = {Shift::constant(kappa, vc), Shift::constant(-kappa, vc), Shift{rescale(0.0), pc, false},
               Shift{rescale(kappa), pc, false}, Shift{rescale(-kappa), pc, false}, Shift{plus, pc, false},
               Shift{minus, pc, false}};
  pb.rhs = [kappa, fixed, fixed_value](double, const Stencil& v, std::span<const double> p, std::span<double> out) {
    const Scalars s = unpack_params(p, fixed, fixed_value);
    const double k2 = kappa * kappa;
    double g1[3], g2[3], d1, d2;
    // solitary core
    static constexpr int vpt[3] = {0, 1, 2}, ppt[3] = {3, 4, 5};
    for (int q = 0; q < 3; ++q) {
      const double v1 = v(vpt[q], kV1), v2 = v(vpt[q], kV2);
      const double p1 = v(ppt[q], kP1), p2 = v(ppt[q], kP2);
      g1[q] = v1 + k2 * (v1 * v1 + v2 * v2) + 2.0 * s.beta * (v1 * p1 + v2 * p2);
      g2[q] = v2 + 2.0 * k2 * v1 * v2 + 2.0 * s.beta * (v1 * p2 + v2 * p1);
    }
    apply_d(s.mu, g1, g2, d1, d2);
    const double k2s2 = k2 * s.sigma * s.sigma;
    out[0] = v(0, kV1 + 1);
    out[1] = -d1 / k2s2;
    out[2] = v(0, kV2 + 1);
    out[3] = -d2 / k2s2;
    // ripple
    static constexpr int rpt[3] = {0, 6, 7};
    for (int q = 0; q < 3; ++q) {
      const double a = v(rpt[q], kP1), b = v(rpt[q], kP2);
      g1[q] = a + s.beta * (a * a + b * b);
      g2[q] = b + 2.0 * s.beta * a * b;
    }
    apply_d(s.mu, g1, g2, d1, d2);
    const double w2s2 = s.omega * s.omega * s.sigma * s.sigma;
    out[4] = v(0, kP1 + 1);
    out[5] = -d1 / w2s2;
    out[6] = v(0, kP2 + 1);
    out[7] = -d2 / w2s2;
  };
  pb.boundary = {at(kV1, 0.0, 0.125),
                 at(kV1 + 1, 0.0, 0.0),
                 at(kV2, 0.0, 0.0),
                 at(kV1, length, 0.0),
                 at(kV2, length, 0.0),
                 at(kV2 + 1, length, 0.0),
                 [](const PiecewiseSolution& s) { return s.integral(kP1); },
                 at(kP1 + 1, 0.0, 0.0),
                 at(kP2, 0.0, 0.0),
                 at(kP2, length, 0.0),
                 [](const PiecewiseSolution& s) {
                   const double a = s.value(kP1, 0.0), b = s.value(kP2 + 1, 0.0);
                   return a * a + b * b - 1.0;
                 }};
  pb.extensions = wave_extensions(length);
  return pb;
}

PeriodicRipple linear_ripple(double sigma, double mu, double beta, const Options& opt) {
  const auto mode = dispersion::critical_frequency(sigma, mu);
  const double len = opt.length;
  const double k = std::numbers::pi / len;
  // (nu1 cos kt, nu2 sin kt) solves the linearisation; P1(0)^2 + P2'(0)^2 = a^2 (nu1^2 + k^2 nu2^2) = 1
  const double a = 1.0 / std::hypot(mode.nu1, k * mode.nu2);
  PeriodicRipple r;
  r.scalars = {sigma, mu, beta, mode.omega / k};
  r.p = PiecewiseSolution::interpolate(
      Mesh(len, opt.intervals, opt.gauss), 4, periodic_extensions(len),
      [&](int c, double t) {
        switch (c) {
          case 0:
            return a * mode.nu1 * std::cos(k * t);
          case 1:
            return -a * mode.nu1 * k * std::sin(k * t);
          case 2:
            return a * mode.nu2 * std::sin(k * t);
          default:
            return a * mode.nu2 * k * std::cos(k * t);
        }
      },
      {r.scalars.omega});
  r.alpha = beta * sup_pair(r.p, 0, 2);
  bool ok = true;
  r.orientation = orientation_value(r.p, 0, 3, r.scalars, ok);
  r.orientation_flip = ok && !(r.orientation > 0.0);
  return r;
}

PeriodicRipple solve_periodic(double sigma, double mu, double beta, const Options& opt, const PeriodicRipple* guess) {
  if (!(sigma > dispersion::sound_speed(mu)))
    throw NoBracket("solve_periodic: speed does not exceed the sound speed");
  PeriodicRipple start = guess ? *guess : linear_ripple(sigma, mu, beta, opt);
  const MfdeProblem pb = periodic_problem(sigma, mu, beta, start.p.mesh().length());
  start.p.extensions() = pb.extensions;
  NewtonResult res = solve_newton(pb, start.p, opt.newton);
  PeriodicRipple r;
  r.p = std::move(res.solution);
  r.report = std::move(res.report);
  r.scalars = {sigma, mu, beta, r.p.params()[0]};
  r.alpha = beta * sup_pair(r.p, 0, 2);
  bool ok = true;
  r.orientation = orientation_value(r.p, 0, 3, r.scalars, ok);
  r.orientation_flip = ok && !(r.orientation > 0.0);
  return r;
}

double ripple_frequency(const PeriodicRipple& r) { return std::numbers::pi * r.scalars.omega / r.p.mesh().length(); }

std::pair<double, double> ripple_profile(const PeriodicRipple& r, double theta) {
  const double t = r.p.mesh().length() * theta / std::numbers::pi;
  return {r.scalars.beta * r.p.value(0, t), r.scalars.beta * r.p.value(2, t)};
}

DiatomicWave seed_from_monatomic(const monatomic::MonatomicWave& wave, const Options& opt) {
  const Mesh& mesh = wave.phi.mesh();
  Options o = opt;
  o.length = mesh.length();
  o.intervals = mesh.intervals();
  o.gauss = mesh.gauss();
  const PeriodicRipple rip = solve_periodic(wave.sigma, 0.0, 0.0, o);
  DiatomicWave w;
  w.kappa = wave.kappa;
  w.fixed = FixedParam::BetaP;
  w.scalars = {wave.sigma, 0.0, 0.0, rip.scalars.omega};
  w.system = PiecewiseSolution(mesh, 8, wave_extensions(mesh.length()), pack_params(w.scalars, w.fixed));
  auto dst = w.system.coefficients();
  const int nb = w.system.coefficients_per_block();
  for (int i = 0; i < mesh.intervals(); ++i) {
    for (int c = 0; c < 2; ++c)
      std::copy_n(wave.phi.coefficients().data() + wave.phi.block_offset(i, c), nb,
                  dst.data() + w.system.block_offset(i, kV1 + c));
    for (int c = 0; c < 4; ++c)
      std::copy_n(rip.p.coefficients().data() + rip.p.block_offset(i, c), nb,
                  dst.data() + w.system.block_offset(i, kP1 + c));
  }
  finish_wave(w);
  return w;
}

DiatomicWave solve_wave(double kappa, FixedParam fixed, double value, const DiatomicWave& guess, const Options& opt) {
  if (guess.system.components() != 8) throw ContractViolation("solve_wave: guess is not a diatomic wave");
  const Mesh& mesh = guess.system.mesh();
  const MfdeProblem pb = wave_problem(kappa, fixed, value, mesh.length());
  check_cap(unknown_count(pb, mesh), opt);
  PiecewiseSolution start = guess.system;
  Scalars s = guess.scalars;
  s.set(fixed, value);
  start.params() = pack_params(s, fixed);
  start.extensions() = pb.extensions;
  NewtonResult res = solve_newton(pb, std::move(start), opt.newton);
  DiatomicWave w;
  w.kappa = kappa;
  w.fixed = fixed;
  w.scalars = unpack_params(res.solution.params(), fixed, value);
  w.system = std::move(res.solution);
  w.report = std::move(res.report);
  finish_wave(w);
  return w;
}

DiatomicWave solve_wave_at_kappa(double kappa, const DiatomicWave& guess, const Options& opt) {
  return solve_wave(kappa, guess.fixed, guess.scalars.get(guess.fixed), guess, opt);
}

double wave_residual(const DiatomicWave& w, int refine) {
  const PiecewiseSolution sol = refine > 1 ? w.system.refined(refine) : w.system;
  const MfdeProblem pb = wave_problem(w.kappa, w.fixed, w.scalars.get(w.fixed), sol.mesh().length());
  return assemble_residual(pb, sol).lpNorm<Eigen::Infinity>();
}

double alpha_threshold(double kappa) { return 1e-5 * kappa * kappa / 8.0; }

RippleClass classify_point(double alpha, double beta, double kappa) {
  if (beta == 0.0) return RippleClass::Solitary;
  if (std::abs(alpha) < alpha_threshold(kappa)) return RippleClass::SmallRipple;
  return alpha > 0.0 ? RippleClass::Positive : RippleClass::Negative;
}

DiatomicWave symmetry_transform(const DiatomicWave& w) {
  DiatomicWave t = w;
  const double mu = w.scalars.mu;
  t.scalars.sigma = w.scalars.sigma / std::sqrt(1.0 + mu);
  t.scalars.mu = -mu / (1.0 + mu);
  t.scalars.beta = -w.scalars.beta;
  auto c = t.system.coefficients();
  const int nb = t.system.coefficients_per_block();
  for (int i = 0; i < t.system.mesh().intervals(); ++i)
    for (int comp : {kV2, kV2 + 1, kP1, kP1 + 1}) {
      double* blk = c.data() + t.system.block_offset(i, comp);
      for (int e = 0; e < nb; ++e) blk[e] = -blk[e];
    }
  t.system.params() = pack_params(t.scalars, t.fixed);
  t.alpha = -w.alpha;
  t.cls = classify_point(t.alpha, t.scalars.beta, t.kappa);
  bool ok = true;
  const double o = orientation_value(t.system, kP1, kP2 + 1, t.scalars, ok);
  t.orientation_flip = ok && !(o > 0.0);
  return t;
}

std::pair<double, double> symmetrized_profile(const DiatomicWave& w, double xi, bool core_only) {
  const double k = w.kappa;
  const double tau = k * xi;
  double s1 = k * k * w.system.value(kV1, tau);
  double s2 = k * k * w.system.value(kV2, tau);
  if (!core_only && w.scalars.beta != 0.0) {
    const double t = w.scalars.omega * xi;
    s1 += w.scalars.beta * w.system.value(kP1, t);
    s2 += w.scalars.beta * w.system.value(kP2, t);
  }
  return {s1, s2};
}

DisplacementProfiles reconstruct_displacement_profiles(const DiatomicWave& w, bool core_only) {
  auto shared = std::make_shared<DiatomicWave>(w);
  DisplacementProfiles p;
  p.r_odd = [shared, core_only](double xi) {
    const auto [s1, s2] = symmetrized_profile(*shared, xi, core_only);
    return s1 + s2;
  };
  p.r_even = [shared, core_only](double xi) {
    const auto [s1, s2] = symmetrized_profile(*shared, xi, core_only);
    return s1 - s2;
  };
  return p;
}

BranchPoint summarize(const DiatomicWave& w) {
  BranchPoint p;
  p.kappa = w.kappa;
  p.scalars = w.scalars;
  p.alpha = w.alpha;
  p.cls = w.cls;
  p.fixed = w.fixed;
  p.newton_iterations = w.report.iterations;
  p.residual = w.report.residual;
  return p;
}

namespace {

// Change of each scalar between two waves, with beta_P measured as ripple amplitude.
double weighted_change(const DiatomicWave& a, const DiatomicWave& b, FixedParam p) {
  if (p == FixedParam::BetaP) return b.alpha - a.alpha;
  return b.scalars.get(p) - a.scalars.get(p);
}

}  // namespace

Branch continue_branch(const DiatomicWave& seed, FixedParam vary, double step, const BranchTarget& target,
                       const StepPolicy& policy, const Options& opt,
                       const std::function<void(const DiatomicWave&)>& on_point) {
  if (step == 0.0) throw ContractViolation("continue_branch: zero step");
  Branch br;
  DiatomicWave cur = seed;
  std::optional<DiatomicWave> prev;
  br.points.push_back(summarize(cur));
  double h = step;
  int easy = 0;
  // last nonzero increment sign per scalar, and whether it was ever the varied one
  double last_sign[3] = {0.0, 0.0, 0.0};
  bool varied[3] = {false, false, false};
  varied[static_cast<int>(vary)] = true;

  auto inside = [&](const DiatomicWave& w) {
    const double v = w.scalars.get(target.param);
    return v >= target.lo && v <= target.hi;
  };

  while (true) {
    if (static_cast<int>(br.points.size()) >= policy.max_points) {
      br.termination = "max_points";
      break;
    }
    std::optional<DiatomicWave> next;
    std::vector<FixedParam> tried;
    FixedParam var = vary;
    double hv = h;
    for (int attempt = 0; attempt < 3 && !next; ++attempt) {
      tried.push_back(var);
      for (int halving = 0; halving <= policy.max_halvings; ++halving) {
        const double value = cur.scalars.get(var) + hv;
        DiatomicWave guess = cur;
        if (prev) {
          const double dv = cur.scalars.get(var) - prev->scalars.get(var);
          if (std::abs(dv) > 1e-14) guess = blend(*prev, cur, 1.0 + hv / dv);
        }
        try {
          next = solve_wave(cur.kappa, var, value, guess, opt);
          break;
        } catch (const BranchTerminated&) {
          throw;
        } catch (const Error&) {
          hv *= 0.5;
          if (std::abs(hv) < policy.min_step) break;
        }
      }
      if (next || !prev) break;
      // switch to the scalar that moved the most relative to the varied one
      FixedParam best = var;
      double best_change = 0.0;
      for (FixedParam p : {FixedParam::Sigma, FixedParam::Mu, FixedParam::BetaP}) {
        if (std::find(tried.begin(), tried.end(), p) != tried.end()) continue;
        const double d = std::abs(weighted_change(*prev, cur, p));
        if (d > best_change) {
          best_change = d;
          best = p;
        }
      }
      if (best == var) break;
      const double dvar = std::abs(weighted_change(*prev, cur, var));
      const double dnew = cur.scalars.get(best) - prev->scalars.get(best);
      double hn = dnew;
      if (dvar > 0.0) hn = dnew * std::abs(h) / std::max(dvar, 1e-300);
      if (best == FixedParam::BetaP && dvar > 0.0) hn = dnew * std::abs(h) / dvar;
      const double mag = std::clamp(std::abs(hn), policy.min_step, policy.max_step);
      hv = std::copysign(mag, dnew);
      var = best;
    }
    if (!next) {
      br.termination = "step_floor";
      break;
    }
    // events
    for (FixedParam p : {FixedParam::Sigma, FixedParam::Mu, FixedParam::BetaP}) {
      const int idx = static_cast<int>(p);
      const double d = next->scalars.get(p) - cur.scalars.get(p);
      if (std::abs(d) <= 1e-13) continue;
      const double sgn = d > 0 ? 1.0 : -1.0;
      if (varied[idx] && last_sign[idx] != 0.0 && sgn != last_sign[idx])
        br.folds.push_back({br.points.size(), p});
      last_sign[idx] = sgn;
    }
    if ((cur.alpha > 0.0 && next->alpha < 0.0) || (cur.alpha < 0.0 && next->alpha > 0.0))
      br.sign_changes.push_back(br.points.size());
    varied[static_cast<int>(var)] = true;
    if (var != vary) {
      vary = var;
      h = hv;
      easy = 0;
    } else {
      h = hv;
    }
    if (next->report.iterations <= 3) {
      if (++easy >= 2) h = std::copysign(std::min(std::abs(h) * 1.5, policy.max_step), h);
    } else {
      easy = 0;
      if (next->report.iterations >= 6) h *= 0.7;
    }
    prev = std::move(cur);
    cur = std::move(*next);
    br.points.push_back(summarize(cur));
    if (on_point) on_point(cur);
    // approaching a fold in the varied scalar: hand over to the fastest mover
    const double dvary = std::abs(weighted_change(*prev, cur, vary));
    for (FixedParam p : {FixedParam::Sigma, FixedParam::Mu, FixedParam::BetaP}) {
      if (p == vary || std::abs(weighted_change(*prev, cur, p)) <= 2.0 * dvary) continue;
      const double d = cur.scalars.get(p) - prev->scalars.get(p);
      h = std::copysign(std::clamp(std::abs(d), policy.min_step, policy.max_step), d);
      vary = p;
      varied[static_cast<int>(p)] = true;
      easy = 0;
      break;
    }
    if (!inside(cur)) {
      br.termination = "target_reached";
      break;
    }
  }
  br.last = cur;
  return br;
}

std::vector<RippleClass> classify_branch(const Branch& b, double window) {
  std::vector<RippleClass> out;
  out.reserve(b.points.size());
  for (const auto& p : b.points) {
    RippleClass c = classify_point(p.alpha, p.scalars.beta, p.kappa);
    if (c == RippleClass::SmallRipple) c = p.alpha >= 0.0 ? RippleClass::Positive : RippleClass::Negative;
    out.push_back(c);
  }
  std::size_t i = 0;
  while (i < b.points.size()) {
    const auto& p = b.points[i];
    if (p.scalars.beta == 0.0 || std::abs(p.alpha) >= alpha_threshold(p.kappa)) {
      ++i;
      continue;
    }
    std::size_t j = i;
    double lo = p.scalars.mu, hi = p.scalars.mu;
    while (j < b.points.size() && b.points[j].scalars.beta != 0.0 &&
           std::abs(b.points[j].alpha) < alpha_threshold(b.points[j].kappa)) {
      lo = std::min(lo, b.points[j].scalars.mu);
      hi = std::max(hi, b.points[j].scalars.mu);
      ++j;
    }
    if (hi - lo >= window)
      for (std::size_t q = i; q < j; ++q) out[q] = RippleClass::SmallRipple;
    i = j;
  }
  return out;
}

SolitaryResult find_solitary(const DiatomicWave& a, const DiatomicWave& b, FixedParam vary, double width,
                             const Options& opt) {
  if (vary == FixedParam::BetaP) throw ContractViolation("find_solitary: cannot bisect in beta_P");
  if (!((a.alpha > 0.0 && b.alpha < 0.0) || (a.alpha < 0.0 && b.alpha > 0.0)))
    throw NoBracket("find_solitary: alpha_P does not change sign between the end points");
  DiatomicWave lo = a, hi = b;
  SolitaryResult r;
  while (std::abs(hi.scalars.get(vary) - lo.scalars.get(vary)) > width) {
    const double mid = 0.5 * (lo.scalars.get(vary) + hi.scalars.get(vary));
    DiatomicWave m = solve_wave(lo.kappa, vary, mid, blend(lo, hi, 0.5), opt);
    ++r.bisection_steps;
    if ((m.alpha > 0.0) == (lo.alpha > 0.0))
      lo = std::move(m);
    else
      hi = std::move(m);
    if (r.bisection_steps > 80) break;
  }
  r.lo = std::min(lo.scalars.get(vary), hi.scalars.get(vary));
  r.hi = std::max(lo.scalars.get(vary), hi.scalars.get(vary));
  const double t = lo.alpha / (lo.alpha - hi.alpha);
  DiatomicWave guess = blend(lo, hi, t);
  guess.scalars.beta = 0.0;
  r.wave = solve_wave(lo.kappa, FixedParam::BetaP, 0.0, guess, opt);
  return r;
}

std::vector<DiatomicWave> solitary_branch(const DiatomicWave& seed, double kappa_to, double step,
                                          const Options& opt) {
  if (seed.scalars.beta != 0.0 || seed.fixed != FixedParam::BetaP)
    throw ContractViolation("solitary_branch: seed must have beta_P frozen at 0");
  std::vector<DiatomicWave> out{seed};
  const double dir = kappa_to >= seed.kappa ? 1.0 : -1.0;
  double h = std::abs(step) * dir;
  while ((kappa_to - out.back().kappa) * dir > 1e-12) {
    const DiatomicWave& cur = out.back();
    double k = cur.kappa + h;
    if ((k - kappa_to) * dir > 0.0) k = kappa_to;
    DiatomicWave guess = cur;
    if (out.size() >= 2) {
      const DiatomicWave& prev = out[out.size() - 2];
      guess = blend(prev, cur, 1.0 + (k - cur.kappa) / (cur.kappa - prev.kappa));
    }
    out.push_back(solve_wave(k, FixedParam::BetaP, 0.0, guess, opt));
  }
  return out;
}

std::string branch_csv_header() {
  return "kappa,sigma,m,mu,beta_P,omega_P,alpha_P,class,fixed_param,newton_iters,resid";
}

std::string branch_csv_row(const BranchPoint& p) {
  char buf[512];
  std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%s,%s,%d,%.17g", p.kappa,
                p.scalars.sigma, p.scalars.m(), p.scalars.mu, p.scalars.beta, p.scalars.omega, p.alpha,
                to_string(p.cls).c_str(), to_string(p.fixed).c_str(), p.newton_iterations, p.residual);
  return buf;
}

}  // namespace fputw::diatomic
