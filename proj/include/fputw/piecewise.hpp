#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "fputw/mesh.hpp"

namespace fputw {

/// How a component is continued outside [0, L].
///
/// The left rule reflects negative arguments: Even gives u(-t) = u(t), Odd
/// gives u(-t) = -u(t), and Affine gives u(-t) = scale*u(t) + offset(t, p)
/// with the offset depending on the free parameters p. The right rule either
/// sets u = 0 beyond L or reduces the argument modulo a period first. Rules are
/// composed until the argument lands in [0, L].
struct Extension {
  enum class Left { None, Even, Odd, Affine };
  enum class Right { None, Zero, Periodic };

  using Offset = std::function<double(double t, std::span<const double> params)>;

  Left left = Left::None;
  Right right = Right::None;
  double period = 0.0;
  double affine_scale = -1.0;
  Offset affine_offset;
  /// Name of the affine rule; only the name survives serialization.
  std::string tag;

  static Extension make(Left l, Right r) {
    Extension e;
    e.left = l;
    e.right = r;
    return e;
  }
  static Extension even_zero() { return make(Left::Even, Right::Zero); }
  static Extension odd_zero() { return make(Left::Odd, Right::Zero); }
  static Extension even_periodic(double period);
  static Extension odd_periodic(double period);
  static Extension affine_zero(double scale, Offset offset, std::string tag);

  bool bound() const noexcept { return left != Left::Affine || static_cast<bool>(affine_offset); }
};

/// Result of resolving an arbitrary argument to the computational interval:
/// u(t) = scale * u(inner) + offset, or just `offset` when !interior.
struct Resolved {
  bool interior = true;
  double inner = 0.0;
  double scale = 1.0;
  double offset = 0.0;
};

/// Continuous piecewise-polynomial representation of n components on a mesh.
/// Each interval stores monomial coefficients in the local variable
/// s = (t - t_i) / h, so the layout of `coefficients()` is
/// [interval][component][degree], degree = 0..k.
class PiecewiseSolution {
 public:
  PiecewiseSolution() = default;
  PiecewiseSolution(Mesh mesh, int components, std::vector<Extension> extensions,
                    std::vector<double> params = {});

  /// Interpolates f(component, t) at k+1 equispaced points per interval
  /// (endpoints included), which yields a continuous function.
  static PiecewiseSolution interpolate(Mesh mesh, int components, std::vector<Extension> extensions,
                                       const std::function<double(int, double)>& f,
                                       std::vector<double> params = {});

  const Mesh& mesh() const noexcept { return mesh_; }
  int components() const noexcept { return components_; }
  int degree() const noexcept { return mesh_.gauss(); }
  int coefficients_per_block() const noexcept { return mesh_.gauss() + 1; }
  std::size_t coefficient_count() const noexcept { return coeffs_.size(); }

  std::span<double> coefficients() noexcept { return coeffs_; }
  std::span<const double> coefficients() const noexcept { return coeffs_; }
  std::size_t block_offset(int interval, int component) const noexcept {
    return (static_cast<std::size_t>(interval) * components_ + component) * coefficients_per_block();
  }

  std::vector<double>& params() noexcept { return params_; }
  const std::vector<double>& params() const noexcept { return params_; }

  const std::vector<Extension>& extensions() const noexcept { return extensions_; }
  std::vector<Extension>& extensions() noexcept { return extensions_; }

  /// Value at any t; arguments outside [0, L] go through the extension rules.
  /// Throws ContractViolation when no rule covers t.
  double value(int component, double t) const;
  /// Value on [0, L] only (clamped to the nearest interval).
  double interior_value(int component, double t) const noexcept;
  double interior_derivative(int component, double t, int order = 1) const noexcept;

  /// Maps t to an interior point using the component's extension rules.
  Resolved resolve(int component, double t) const;

  /// Exact integral of a component over [0, L].
  double integral(int component) const noexcept;
  /// max |u| over [0, L], sampled at 8 points per interval plus endpoints.
  double sup_norm(int component) const noexcept;
  /// Largest jump between neighbouring interval polynomials at interior mesh points.
  double continuity_defect() const noexcept;

  /// Same function on a mesh with `factor` times as many intervals (exact).
  PiecewiseSolution refined(int factor) const;

 private:
  Mesh mesh_;
  int components_ = 0;
  std::vector<double> coeffs_;
  std::vector<Extension> extensions_;
  std::vector<double> params_;
};

}  // namespace fputw
