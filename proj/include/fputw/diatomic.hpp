#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fputw/errors.hpp"
#include "fputw/mfde.hpp"
#include "fputw/monatomic.hpp"

namespace fputw::diatomic {

enum class FixedParam { Sigma, Mu, BetaP };
enum class RippleClass { Positive, Negative, SmallRipple, Solitary };

std::string to_string(FixedParam p);
std::string to_string(RippleClass c);
FixedParam parse_fixed(const std::string& name);
RippleClass parse_class(const std::string& name);

/// The four scalars of a diatomic wave besides kappa.
struct Scalars {
  double sigma = 0.0;
  double mu = 0.0;
  double beta = 0.0;
  double omega = 0.0;  ///< omega_P, the computational ripple frequency

  double get(FixedParam p) const;
  void set(FixedParam p, double v);
  double m() const { return 1.0 / (1.0 + mu); }
};

struct Options {
  double length = 32.0;
  int intervals = 512;
  int gauss = 3;
  NewtonConfig newton;
  std::size_t size_cap = 30000;
};

/// Ripple beta_P (P1, P2)(omega_P xi) with P~ 2L-periodic, P1 even, P2 odd.
/// `p` holds (P1, P1', P2, P2') with the single parameter omega_P.
struct PeriodicRipple {
  Scalars scalars;
  PiecewiseSolution p;
  NewtonReport report;
  double alpha = 0.0;
  /// nu1 P1(0) + nu2 L P2'(0) / (pi omega_{sigma,mu}); must stay positive.
  double orientation = 0.0;
  bool orientation_flip = false;
};

/// kappa^2 V(kappa xi) + beta_P P(kappa xi). `system` holds
/// (V1, V1', V2, V2', P1, P1', P2, P2'); its parameters are the two free
/// scalars among (sigma, mu, beta_P), in that order, followed by omega_P.
struct DiatomicWave {
  double kappa = 0.0;
  FixedParam fixed = FixedParam::BetaP;
  Scalars scalars;
  PiecewiseSolution system;
  NewtonReport report;
  double alpha = 0.0;
  RippleClass cls = RippleClass::Solitary;
  bool orientation_flip = false;
};

/// Largest admissible unknown count is enforced through Options::size_cap.
class BranchTerminated : public Error {
 public:
  BranchTerminated(std::string reason, const std::string& what) : Error(what), reason_(std::move(reason)) {}
  const std::string& reason() const noexcept { return reason_; }

 private:
  std::string reason_;
};

// ---- problems -------------------------------------------------------------

MfdeProblem periodic_problem(double sigma, double mu, double beta, double length);
MfdeProblem wave_problem(double kappa, FixedParam fixed, double fixed_value, double length);

std::vector<Extension> periodic_extensions(double length);
std::vector<Extension> wave_extensions(double length);

/// Parameter vector of the wave problem for the given fixed scalar.
std::vector<double> pack_params(const Scalars& s, FixedParam fixed);
Scalars unpack_params(std::span<const double> params, FixedParam fixed, double fixed_value);

// ---- periodic ripples -------------------------------------------------------

/// Linearised mode nu1 cos(pi t/L), nu2 sin(pi t/L) scaled to the normalisation,
/// omega_P = omega_{sigma,mu} L / pi.
PeriodicRipple linear_ripple(double sigma, double mu, double beta, const Options& opt = {});
PeriodicRipple solve_periodic(double sigma, double mu, double beta, const Options& opt = {},
                              const PeriodicRipple* guess = nullptr);
/// p~(xi) = (p1, p2)(xi) and omega in the 2 pi-periodic convention.
std::pair<double, double> ripple_profile(const PeriodicRipple& r, double theta);
double ripple_frequency(const PeriodicRipple& r);

// ---- full waves ---------------------------------------------------------------

/// Equal-mass seed: V1 = Phi, V2 = 0, beta_P = 0, mu = 0 and the linear ripple.
DiatomicWave seed_from_monatomic(const monatomic::MonatomicWave& wave, const Options& opt = {});

DiatomicWave solve_wave(double kappa, FixedParam fixed, double value, const DiatomicWave& guess,
                        const Options& opt = {});

/// Residual of a wave under its own parameters (infinity norm).
double wave_residual(const DiatomicWave& w, int refine = 1);

RippleClass classify_point(double alpha, double beta, double kappa);
double alpha_threshold(double kappa);

/// (m, c) -> (1/m, c sqrt(m)) with s2 -> -s2.
DiatomicWave symmetry_transform(const DiatomicWave& w);

/// (r_o, r_e) as functions of xi; with `core_only` the ripple part is dropped.
struct DisplacementProfiles {
  std::function<double(double)> r_odd;
  std::function<double(double)> r_even;
};
DisplacementProfiles reconstruct_displacement_profiles(const DiatomicWave& w, bool core_only = false);
/// s1, s2 at xi.
std::pair<double, double> symmetrized_profile(const DiatomicWave& w, double xi, bool core_only = false);

// ---- continuation ---------------------------------------------------------------

struct BranchPoint {
  double kappa = 0.0;
  Scalars scalars;
  double alpha = 0.0;
  RippleClass cls = RippleClass::Solitary;
  FixedParam fixed = FixedParam::Mu;
  int newton_iterations = 0;
  double residual = 0.0;
};

struct BranchEvent {
  std::size_t index = 0;  ///< event lies between points index-1 and index
  FixedParam param = FixedParam::Mu;
};

struct Branch {
  std::vector<BranchPoint> points;
  std::vector<BranchEvent> folds;
  std::vector<std::size_t> sign_changes;
  std::string termination;
  std::optional<DiatomicWave> last;
};

struct StepPolicy {
  double initial = 0.02;
  double min_step = 1e-6;
  double max_step = 0.05;
  int max_halvings = 6;
  int max_points = 400;
};

/// Stop once `param` leaves [lo, hi].
struct BranchTarget {
  FixedParam param = FixedParam::Mu;
  double lo = -1.0;
  double hi = 1.0;
};

BranchPoint summarize(const DiatomicWave& w);

/// Natural-parameter continuation of `vary` starting at `seed` with signed `step`.
/// Failing steps are halved up to max_halvings times before the continuation
/// switches to another of (sigma, mu, beta_P). Folds and alpha_P sign changes
/// are recorded. Running into the size cap or the step floor ends the branch
/// (recorded in `termination`).
Branch continue_branch(const DiatomicWave& seed, FixedParam vary, double step, const BranchTarget& target,
                       const StepPolicy& policy = {}, const Options& opt = {},
                       const std::function<void(const DiatomicWave&)>& on_point = {});

/// Ripple classes along a branch with the interval rule: points below the
/// threshold become SmallRipple only inside runs spanning at least `window` in mu.
std::vector<RippleClass> classify_branch(const Branch& b, double window = 0.01);

struct SolitaryResult {
  DiatomicWave wave;
  /// Bracket of the varied parameter around the alpha_P zero.
  double lo = 0.0;
  double hi = 0.0;
  int bisection_steps = 0;
};

/// Bisects alpha_P in `vary` between two converged waves of opposite ripple
/// sign (beta_P free), then freezes beta_P = 0 and solves for (sigma, mu).
SolitaryResult find_solitary(const DiatomicWave& a, const DiatomicWave& b, FixedParam vary,
                             double width = 1e-7, const Options& opt = {});

/// Continuation of a solitary wave in kappa with beta_P frozen at 0.
std::vector<DiatomicWave> solitary_branch(const DiatomicWave& seed, double kappa_to, double step,
                                          const Options& opt = {});

/// Wave at a different kappa (same fixed scalar and value), from `guess`.
DiatomicWave solve_wave_at_kappa(double kappa, const DiatomicWave& guess, const Options& opt = {});

std::string branch_csv_header();
std::string branch_csv_row(const BranchPoint& p);

}  // namespace fputw::diatomic
