#include "fputw/mfde.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "fputw/errors.hpp"

namespace fputw {

Shift Shift::constant(double s, std::vector<int> components) {
  Shift sh;
  sh.offset = [s](double, std::span<const double>, std::span<const double>) { return s; };
  sh.components = std::move(components);
  return sh;
}

void MfdeProblem::validate() const {
  if (components <= 0) throw ContractViolation("MfdeProblem: component count must be positive");
  if (parameters < 0) throw ContractViolation("MfdeProblem: negative parameter count");
  if (!rhs) throw ContractViolation("MfdeProblem: missing right-hand side");
  if (static_cast<int>(extensions.size()) != components)
    throw ContractViolation("MfdeProblem: one extension rule per component required");
  const int expected = components + parameters;
  if (static_cast<int>(boundary.size()) != expected)
    throw ContractViolation("MfdeProblem: " + std::to_string(boundary.size()) +
                            " boundary functionals supplied, " + std::to_string(expected) +
                            " required (components + free parameters)");
  for (const Shift& s : shifts) {
    if (!s.offset) throw ContractViolation("MfdeProblem: shift without offset callable");
    for (int c : s.components)
      if (c < 0 || c >= components) throw ContractViolation("MfdeProblem: shift reads unknown component");
  }
}

std::size_t unknown_count(const MfdeProblem& problem, const Mesh& mesh) {
  return static_cast<std::size_t>(mesh.intervals()) * problem.components * (mesh.gauss() + 1) +
         problem.parameters;
}

Eigen::VectorXd pack_unknowns(const PiecewiseSolution& sol) {
  const auto coeffs = sol.coefficients();
  Eigen::VectorXd x(coeffs.size() + sol.params().size());
  for (std::size_t i = 0; i < coeffs.size(); ++i) x(i) = coeffs[i];
  for (std::size_t p = 0; p < sol.params().size(); ++p) x(coeffs.size() + p) = sol.params()[p];
  return x;
}

void unpack_unknowns(const Eigen::VectorXd& x, PiecewiseSolution& sol) {
  auto coeffs = sol.coefficients();
  for (std::size_t i = 0; i < coeffs.size(); ++i) coeffs[i] = x(i);
  for (std::size_t p = 0; p < sol.params().size(); ++p) sol.params()[p] = x(coeffs.size() + p);
}

namespace {

struct PointRef {
  bool interior = false;
  int interval = 0;
  double s = 0.0;
  double scale = 0.0;
};

class Assembler {
 public:
  Assembler(const MfdeProblem& problem, const PiecewiseSolution& sol)
      : pb_(problem),
        sol_(sol),
        mesh_(sol.mesh()),
        n_(problem.components),
        k_(mesh_.gauss()),
        points_(1 + static_cast<int>(problem.shifts.size())) {
    problem.validate();
    if (sol.components() != n_)
      throw ContractViolation("solver: candidate has " + std::to_string(sol.components()) +
                              " components, problem has " + std::to_string(n_));
    if (static_cast<int>(sol.params().size()) != pb_.parameters)
      throw ContractViolation("solver: candidate carries the wrong number of parameters");
    uses_.assign(points_ * n_, 0);
    for (int c = 0; c < n_; ++c) uses_[c] = 1;
    for (int p = 1; p < points_; ++p) {
      const auto& comps = pb_.shifts[p - 1].components;
      if (comps.empty()) {
        for (int c = 0; c < n_; ++c) uses_[p * n_ + c] = 1;
      } else {
        for (int c : comps) uses_[p * n_ + c] = 1;
      }
    }
    const double h = mesh_.width();
    basis_.assign(k_ * (k_ + 1), 0.0);
    dbasis_.assign(k_ * (k_ + 1), 0.0);
    for (int j = 0; j < k_; ++j) {
      const double s = mesh_.nodes()[j];
      for (int e = 0; e <= k_; ++e) {
        basis_[j * (k_ + 1) + e] = std::pow(s, e);
        dbasis_[j * (k_ + 1) + e] = e == 0 ? 0.0 : e * std::pow(s, e - 1) / h;
      }
    }
    stencil_.assign(points_ * n_, 0.0);
    refs_.assign(points_ * n_, PointRef{});
    f_.assign(n_, 0.0);
    state_.assign(n_, 0.0);
  }

  std::size_t collocation_rows() const { return static_cast<std::size_t>(mesh_.intervals()) * k_ * n_; }
  std::size_t continuity_rows() const { return static_cast<std::size_t>(mesh_.intervals() - 1) * n_; }
  std::size_t rows() const { return collocation_rows() + continuity_rows() + pb_.boundary.size(); }
  std::size_t coeff_cols() const { return sol_.coefficient_count(); }

  double tau(int i, int j) const { return mesh_.left(i) + mesh_.width() * mesh_.nodes()[j]; }

  double local_value(int i, int j, int c) const {
    const double* a = sol_.coefficients().data() + sol_.block_offset(i, c);
    const double* b = basis_.data() + j * (k_ + 1);
    double v = 0.0;
    for (int e = 0; e <= k_; ++e) v += a[e] * b[e];
    return v;
  }

  double local_derivative(int i, int j, int c) const {
    const double* a = sol_.coefficients().data() + sol_.block_offset(i, c);
    const double* b = dbasis_.data() + j * (k_ + 1);
    double v = 0.0;
    for (int e = 0; e <= k_; ++e) v += a[e] * b[e];
    return v;
  }

  PointRef locate(int c, double arg, double& value) const {
    PointRef ref;
    const Resolved r = sol_.resolve(c, arg);
    if (!r.interior) {
      value = r.offset;
      return ref;
    }
    ref.interior = true;
    ref.interval = mesh_.locate(r.inner);
    ref.s = (r.inner - mesh_.left(ref.interval)) / mesh_.width();
    ref.scale = r.scale;
    value = r.scale * sol_.interior_value(c, r.inner) + r.offset;
    return ref;
  }

  // Fills stencil_, refs_ and f_ for node (i, j).
  void evaluate_node(int i, int j) {
    const double t = tau(i, j);
    const std::span<const double> params(sol_.params());
    for (int c = 0; c < n_; ++c) {
      state_[c] = local_value(i, j, c);
      stencil_[c] = state_[c];
    }
    for (int p = 1; p < points_; ++p) {
      const double arg = t + pb_.shifts[p - 1].offset(t, state_, params);
      args_cache(p) = arg;
      for (int c = 0; c < n_; ++c) {
        const int idx = p * n_ + c;
        if (!uses_[idx]) {
          stencil_[idx] = 0.0;
          refs_[idx] = PointRef{};
          continue;
        }
        double v = 0.0;
        refs_[idx] = locate(c, arg, v);
        stencil_[idx] = v;
      }
    }
    pb_.rhs(t, Stencil(stencil_, n_), params, f_);
  }

  double& args_cache(int p) {
    if (static_cast<int>(args_.size()) < points_) args_.assign(points_, 0.0);
    return args_[p];
  }

  void residual(Eigen::VectorXd& out) {
    out.resize(static_cast<Eigen::Index>(rows()));
    std::size_t row = 0;
    for (int i = 0; i < mesh_.intervals(); ++i) {
      for (int j = 0; j < k_; ++j) {
        evaluate_node(i, j);
        for (int c = 0; c < n_; ++c) out(row++) = local_derivative(i, j, c) - f_[c];
      }
    }
    boundary_and_continuity(out, row);
  }

  void boundary_and_continuity(Eigen::VectorXd& out, std::size_t row) const {
    for (int i = 0; i + 1 < mesh_.intervals(); ++i) {
      for (int c = 0; c < n_; ++c) {
        const double* a = sol_.coefficients().data() + sol_.block_offset(i, c);
        const double* b = sol_.coefficients().data() + sol_.block_offset(i + 1, c);
        double end = 0.0;
        for (int e = 0; e <= k_; ++e) end += a[e];
        out(row++) = end - b[0];
      }
    }
    for (const auto& bc : pb_.boundary) out(row++) = bc(sol_);
  }

  void jacobian_local(std::vector<Eigen::Triplet<double>>& trip, double rel_step) {
    std::vector<double> f0(n_), dfd;
    std::vector<double> dargs;
    std::size_t row = 0;
    const std::span<const double> params(sol_.params());
    for (int i = 0; i < mesh_.intervals(); ++i) {
      for (int j = 0; j < k_; ++j, row += n_) {
        evaluate_node(i, j);
        const double t = tau(i, j);
        f0 = f_;
        // derivative part
        for (int c = 0; c < n_; ++c) {
          const std::size_t col0 = sol_.block_offset(i, c);
          for (int e = 1; e <= k_; ++e)
            trip.emplace_back(static_cast<int>(row + c), static_cast<int>(col0 + e),
                              dbasis_[j * (k_ + 1) + e]);
        }
        // sensitivities of f to each stencil entry
        for (int p = 0; p < points_; ++p) {
          for (int d = 0; d < n_; ++d) {
            const int idx = p * n_ + d;
            if (!uses_[idx]) continue;
            if (p > 0 && !refs_[idx].interior) continue;
            const double v = stencil_[idx];
            const double hstep = rel_step * std::max(1.0, std::abs(v));
            stencil_[idx] = v + hstep;
            pb_.rhs(t, Stencil(stencil_, n_), params, f_);
            stencil_[idx] = v;
            const PointRef ref = p == 0 ? PointRef{true, i, mesh_.nodes()[j], 1.0} : refs_[idx];
            const std::size_t col0 = sol_.block_offset(ref.interval, d);
            for (int c = 0; c < n_; ++c) {
              const double g = (f_[c] - f0[c]) / hstep;
              if (g == 0.0) continue;
              double sp = 1.0;
              for (int e = 0; e <= k_; ++e) {
                trip.emplace_back(static_cast<int>(row + c), static_cast<int>(col0 + e),
                                  -g * ref.scale * sp);
                sp *= ref.s;
              }
            }
          }
        }
        // state-dependent shift positions
        for (int p = 1; p < points_; ++p) {
          const Shift& sh = pb_.shifts[p - 1];
          if (!sh.state_dependent) continue;
          const double arg0 = args_[p];
          for (int q = 0; q < n_; ++q) {
            const double uq = state_[q];
            const double hq = rel_step * std::max(1.0, std::abs(uq));
            state_[q] = uq + hq;
            const double darg = (t + sh.offset(t, state_, params) - arg0) / hq;
            state_[q] = uq;
            if (darg == 0.0) continue;
            for (int d = 0; d < n_; ++d) {
              const int idx = p * n_ + d;
              if (!uses_[idx]) continue;
              const double ha = rel_step * std::max(1.0, std::abs(arg0));
              double vp = 0.0, vm = 0.0;
              locate(d, arg0 + ha, vp);
              locate(d, arg0 - ha, vm);
              const double dvdarg = (vp - vm) / (2.0 * ha);
              const double v = stencil_[idx];
              const double hstep = rel_step * std::max(1.0, std::abs(v));
              stencil_[idx] = v + hstep;
              pb_.rhs(t, Stencil(stencil_, n_), params, f_);
              stencil_[idx] = v;
              const std::size_t col0 = sol_.block_offset(i, q);
              for (int c = 0; c < n_; ++c) {
                const double g = (f_[c] - f0[c]) / hstep;
                if (g == 0.0) continue;
                for (int e = 0; e <= k_; ++e)
                  trip.emplace_back(static_cast<int>(row + c), static_cast<int>(col0 + e),
                                    -g * dvdarg * darg * basis_[j * (k_ + 1) + e]);
              }
            }
          }
        }
      }
    }
    // continuity rows
    for (int i = 0; i + 1 < mesh_.intervals(); ++i) {
      for (int c = 0; c < n_; ++c, ++row) {
        const std::size_t a = sol_.block_offset(i, c);
        const std::size_t b = sol_.block_offset(i + 1, c);
        for (int e = 0; e <= k_; ++e) trip.emplace_back(static_cast<int>(row), static_cast<int>(a + e), 1.0);
        trip.emplace_back(static_cast<int>(row), static_cast<int>(b), -1.0);
      }
    }
  }

 private:
  const MfdeProblem& pb_;
  const PiecewiseSolution& sol_;
  const Mesh& mesh_;
  int n_;
  int k_;
  int points_;
  std::vector<char> uses_;
  std::vector<double> basis_, dbasis_;
  std::vector<double> stencil_;
  std::vector<PointRef> refs_;
  std::vector<double> f_;
  std::vector<double> state_;
  std::vector<double> args_;
};

double inf_norm(const Eigen::VectorXd& v) {
  double m = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v(i))) return std::numeric_limits<double>::infinity();
    m = std::max(m, std::abs(v(i)));
  }
  return m;
}

double default_step(double fd_step) {
  return fd_step > 0.0 ? fd_step : std::sqrt(std::numeric_limits<double>::epsilon());
}

}  // namespace

Eigen::VectorXd assemble_residual(const MfdeProblem& problem, const PiecewiseSolution& candidate) {
  Assembler as(problem, candidate);
  Eigen::VectorXd out;
  as.residual(out);
  return out;
}

Eigen::SparseMatrix<double> assemble_jacobian(const MfdeProblem& problem,
                                              const PiecewiseSolution& candidate, double fd_step) {
  const double rel = default_step(fd_step);
  PiecewiseSolution work = candidate;
  Assembler as(problem, work);
  const std::size_t nrows = as.rows();
  const std::size_t ncoef = as.coeff_cols();
  const std::size_t ncols = ncoef + problem.parameters;
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(nrows * 24);
  as.jacobian_local(trip, rel);

  // boundary rows: perturb every coefficient
  const std::size_t bc_row0 = nrows - problem.boundary.size();
  std::vector<double> b0(problem.boundary.size());
  for (std::size_t q = 0; q < problem.boundary.size(); ++q) b0[q] = problem.boundary[q](work);
  auto coeffs = work.coefficients();
  for (std::size_t col = 0; col < ncoef; ++col) {
    const double v = coeffs[col];
    const double h = rel * std::max(1.0, std::abs(v));
    coeffs[col] = v + h;
    for (std::size_t q = 0; q < problem.boundary.size(); ++q) {
      const double g = (problem.boundary[q](work) - b0[q]) / h;
      if (g != 0.0) trip.emplace_back(static_cast<int>(bc_row0 + q), static_cast<int>(col), g);
    }
    coeffs[col] = v;
  }

  // parameter columns: perturb the full residual
  if (problem.parameters > 0) {
    Eigen::VectorXd r0 = assemble_residual(problem, work);
    for (int p = 0; p < problem.parameters; ++p) {
      const double v = work.params()[p];
      const double h = rel * std::max(1.0, std::abs(v));
      work.params()[p] = v + h;
      Eigen::VectorXd r1 = assemble_residual(problem, work);
      work.params()[p] = v;
      for (Eigen::Index r = 0; r < r1.size(); ++r) {
        const double g = (r1(r) - r0(r)) / h;
        if (g != 0.0) trip.emplace_back(static_cast<int>(r), static_cast<int>(ncoef + p), g);
      }
    }
  }

  Eigen::SparseMatrix<double> J(static_cast<Eigen::Index>(nrows), static_cast<Eigen::Index>(ncols));
  J.setFromTriplets(trip.begin(), trip.end());
  J.makeCompressed();
  return J;
}

namespace {

// One factorisation of the Jacobian, reused for the monotonicity test.
class Factorization {
 public:
  Factorization(const Eigen::SparseMatrix<double>& J, NewtonConfig::LinearSolver kind) : kind_(kind) {
    if (kind_ == NewtonConfig::LinearSolver::Dense) {
      dense_.compute(Eigen::MatrixXd(J));
      return;
    }
    sparse_.analyzePattern(J);
    sparse_.factorize(J);
    if (sparse_.info() != Eigen::Success)
      throw SingularJacobian("sparse LU failed: " + sparse_.lastErrorMessage());
  }

  Eigen::VectorXd solve(const Eigen::VectorXd& rhs) {
    Eigen::VectorXd dx = kind_ == NewtonConfig::LinearSolver::Dense ? Eigen::VectorXd(dense_.solve(rhs))
                                                                     : Eigen::VectorXd(sparse_.solve(rhs));
    if (!dx.allFinite()) throw SingularJacobian("linear solve produced a non-finite update");
    return dx;
  }

 private:
  NewtonConfig::LinearSolver kind_;
  Eigen::PartialPivLU<Eigen::MatrixXd> dense_;
  Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> sparse_;
};

}  // namespace

NewtonResult solve_newton(const MfdeProblem& problem, PiecewiseSolution guess, const NewtonConfig& cfg) {
  problem.validate();
  if (!(cfg.tolerance > 0.0)) throw ContractViolation("NewtonConfig: tolerance must be positive");
  if (cfg.max_iterations < 1) throw ContractViolation("NewtonConfig: need at least one iteration");
  const std::size_t unknowns = unknown_count(problem, guess.mesh());
  if (cfg.max_unknowns > 0 && unknowns > cfg.max_unknowns)
    throw ContractViolation("solver: " + std::to_string(unknowns) + " unknowns exceed the cap of " +
                            std::to_string(cfg.max_unknowns));

  NewtonResult result{std::move(guess), {}};
  PiecewiseSolution& sol = result.solution;
  Eigen::VectorXd F = assemble_residual(problem, sol);
  double norm = inf_norm(F);
  result.report.history.push_back(norm);
  int it = 0;
  while (norm >= cfg.tolerance) {
    if (it >= cfg.max_iterations)
      throw NonConvergence("Newton: no convergence after " + std::to_string(it) +
                               " iterations, residual " + std::to_string(norm),
                           norm, it);
    ++it;
    const Eigen::SparseMatrix<double> J = assemble_jacobian(problem, sol, cfg.fd_step);
    Factorization lu(J, cfg.solver);
    const Eigen::VectorXd dx = lu.solve(-F);
    const double dx_norm = dx.norm();
    const Eigen::VectorXd x0 = pack_unknowns(sol);
    double lambda = 1.0;
    PiecewiseSolution trial = sol;
    Eigen::VectorXd Ft;
    double trial_norm = std::numeric_limits<double>::infinity();
    for (int h = 0; h <= cfg.max_halvings; ++h) {
      unpack_unknowns(x0 + lambda * dx, trial);
      try {
        Ft = assemble_residual(problem, trial);
        trial_norm = inf_norm(Ft);
      } catch (const ContractViolation&) {
        trial_norm = std::numeric_limits<double>::infinity();
      }
      if (trial_norm < norm) break;
      // natural monotonicity: the simplified correction must shrink even if
      // the badly scaled residual does not (as long as it stays bounded)
      if (std::isfinite(trial_norm) && trial_norm <= 2.0 * norm &&
          lu.solve(-Ft).norm() <= (1.0 - 0.25 * lambda) * dx_norm)
        break;
      lambda *= 0.5;
    }
    if (!std::isfinite(trial_norm))
      throw NonConvergence("Newton: damped step left the admissible region", norm, it);
    sol = std::move(trial);
    F = std::move(Ft);
    norm = trial_norm;
    result.report.history.push_back(norm);
  }
  result.report.iterations = it;
  result.report.residual = norm;
  return result;
}

}  // namespace fputw
