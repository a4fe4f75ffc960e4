#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>
#include <functional>
#include <span>
#include <vector>

#include "fputw/piecewise.hpp"

namespace fputw {

/// Values handed to a right-hand side: point 0 is the collocation point tau,
/// point p >= 1 is tau + shift_p. Components a shift does not read are 0.
class Stencil {
 public:
  Stencil(std::span<const double> values, int components) : values_(values), n_(components) {}
  double operator()(int point, int component) const { return values_[point * n_ + component]; }
  int components() const noexcept { return n_; }

 private:
  std::span<const double> values_;
  int n_;
};

/// One argument shift tau -> tau + offset(tau, u(tau), params).
struct Shift {
  using Fn = std::function<double(double tau, std::span<const double> state, std::span<const double> params)>;
  Fn offset;
  /// Components read at the shifted point; empty means all of them.
  std::vector<int> components;
  /// Set when the offset depends on u(tau); adds the chain-rule term to the Jacobian.
  bool state_dependent = false;

  static Shift constant(double s, std::vector<int> components = {});
};

using Rhs = std::function<void(double tau, const Stencil& values, std::span<const double> params,
                               std::span<double> out)>;
/// Scalar condition that must vanish; the solution carries the current parameters.
using BoundaryFunctional = std::function<double(const PiecewiseSolution&)>;

/// First-order MFDE u'(tau) = f(tau, u(tau), u(tau + s_1), ..., params) on [0, L]
/// closed by boundary functionals. Second-order scalar equations are passed in
/// as (u, u') pairs, so `components` = 2 * (second-order count) and the number of
/// boundary functionals must equal components + parameters.
struct MfdeProblem {
  int components = 0;
  int parameters = 0;
  std::vector<Shift> shifts;
  Rhs rhs;
  std::vector<BoundaryFunctional> boundary;
  std::vector<Extension> extensions;

  /// Throws ContractViolation on inconsistent sizes or boundary count.
  void validate() const;
};

struct NewtonConfig {
  enum class LinearSolver { Sparse, Dense };

  double tolerance = 1e-10;
  int max_iterations = 25;
  /// Relative finite-difference step; 0 selects sqrt(machine epsilon).
  double fd_step = 0.0;
  int max_halvings = 6;
  LinearSolver solver = LinearSolver::Sparse;
  /// Abort with SizeCap-style ContractViolation above this many unknowns (0 = no cap).
  std::size_t max_unknowns = 0;
};

struct NewtonReport {
  int iterations = 0;
  double residual = 0.0;
  std::vector<double> history;
};

struct NewtonResult {
  PiecewiseSolution solution;
  NewtonReport report;
};

std::size_t unknown_count(const MfdeProblem& problem, const Mesh& mesh);

/// Collocation equations (u' - f at every Gauss node), then continuity of every
/// component at interior mesh points, then the boundary functionals.
Eigen::VectorXd assemble_residual(const MfdeProblem& problem, const PiecewiseSolution& candidate);

/// Finite-difference Jacobian of assemble_residual with respect to the
/// coefficients followed by the free parameters.
Eigen::SparseMatrix<double> assemble_jacobian(const MfdeProblem& problem,
                                              const PiecewiseSolution& candidate,
                                              double fd_step = 0.0);

/// Damped Newton iteration. Throws NonConvergence or SingularJacobian.
NewtonResult solve_newton(const MfdeProblem& problem, PiecewiseSolution guess,
                          const NewtonConfig& cfg = {});

/// Unknown vector <-> solution helpers.
Eigen::VectorXd pack_unknowns(const PiecewiseSolution& sol);
void unpack_unknowns(const Eigen::VectorXd& x, PiecewiseSolution& sol);

}  // namespace fputw
