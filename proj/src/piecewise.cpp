#include "fputw/piecewise.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <string>

#include "fputw/errors.hpp"

namespace fputw {

Extension Extension::even_periodic(double period) {
  Extension e = make(Left::Even, Right::Periodic);
  e.period = period;
  return e;
}

Extension Extension::odd_periodic(double period) {
  Extension e = make(Left::Odd, Right::Periodic);
  e.period = period;
  return e;
}

Extension Extension::affine_zero(double scale, Offset offset, std::string tag) {
  Extension e = make(Left::Affine, Right::Zero);
  e.affine_scale = scale;
  e.affine_offset = std::move(offset);
  e.tag = std::move(tag);
  return e;
}

PiecewiseSolution::PiecewiseSolution(Mesh mesh, int components, std::vector<Extension> extensions,
                                     std::vector<double> params)
    : mesh_(std::move(mesh)),
      components_(components),
      coeffs_(static_cast<std::size_t>(mesh_.intervals()) * components * (mesh_.gauss() + 1), 0.0),
      extensions_(std::move(extensions)),
      params_(std::move(params)) {
  if (components <= 0) throw ContractViolation("PiecewiseSolution: need at least one component");
  if (static_cast<int>(extensions_.size()) != components)
    throw ContractViolation("PiecewiseSolution: one extension rule per component required");
}

PiecewiseSolution PiecewiseSolution::interpolate(Mesh mesh, int components,
                                                 std::vector<Extension> extensions,
                                                 const std::function<double(int, double)>& f,
                                                 std::vector<double> params) {
  PiecewiseSolution sol(std::move(mesh), components, std::move(extensions), std::move(params));
  const int k = sol.degree();
  Eigen::MatrixXd vander(k + 1, k + 1);
  for (int j = 0; j <= k; ++j)
    for (int d = 0; d <= k; ++d) vander(j, d) = std::pow(static_cast<double>(j) / k, d);
  const Eigen::MatrixXd inv = vander.inverse();
  const double h = sol.mesh_.width();
  Eigen::VectorXd samples(k + 1);
  for (int i = 0; i < sol.mesh_.intervals(); ++i) {
    for (int c = 0; c < components; ++c) {
      for (int j = 0; j <= k; ++j) samples(j) = f(c, sol.mesh_.left(i) + h * j / k);
      Eigen::VectorXd a = inv * samples;
      auto* dst = sol.coeffs_.data() + sol.block_offset(i, c);
      for (int d = 0; d <= k; ++d) dst[d] = a(d);
    }
  }
  return sol;
}

double PiecewiseSolution::interior_value(int component, double t) const noexcept {
  const int i = mesh_.locate(t);
  const double s = (t - mesh_.left(i)) / mesh_.width();
  const double* a = coeffs_.data() + block_offset(i, component);
  double v = 0.0;
  for (int d = degree(); d >= 0; --d) v = v * s + a[d];
  return v;
}

double PiecewiseSolution::interior_derivative(int component, double t, int order) const noexcept {
  const int i = mesh_.locate(t);
  const double h = mesh_.width();
  const double s = (t - mesh_.left(i)) / h;
  const double* a = coeffs_.data() + block_offset(i, component);
  double v = 0.0;
  for (int d = degree(); d >= order; --d) {
    double falling = 1.0;
    for (int q = 0; q < order; ++q) falling *= (d - q);
    v = v * s + falling * a[d];
  }
  return v / std::pow(h, order);
}

Resolved PiecewiseSolution::resolve(int component, double t) const {
  const Extension& ext = extensions_[component];
  const double len = mesh_.length();
  Resolved r;
  for (int depth = 0; depth < 32; ++depth) {
    if (t >= 0.0 && t <= len) {
      r.inner = t;
      return r;
    }
    if (ext.right == Extension::Right::Periodic) {
      const double p = ext.period;
      t -= p * std::floor((t + 0.5 * p) / p);
      if (t >= 0.0 && t <= len) continue;
    }
    if (t > len) {
      if (ext.right == Extension::Right::Zero) {
        r.interior = false;
        return r;
      }
      throw ContractViolation("evaluate: argument " + std::to_string(t) +
                              " beyond the right end is not covered for component " +
                              std::to_string(component));
    }
    // t < 0
    switch (ext.left) {
      case Extension::Left::Even:
        t = -t;
        break;
      case Extension::Left::Odd:
        r.scale = -r.scale;
        t = -t;
        break;
      case Extension::Left::Affine:
        if (!ext.affine_offset)
          throw ContractViolation("evaluate: affine extension '" + ext.tag + "' is not bound");
        r.offset += r.scale * ext.affine_offset(-t, params_);
        r.scale *= ext.affine_scale;
        t = -t;
        break;
      case Extension::Left::None:
        throw ContractViolation("evaluate: negative argument " + std::to_string(t) +
                                " is not covered for component " + std::to_string(component));
    }
  }
  throw ContractViolation("evaluate: extension rules do not terminate");
}

double PiecewiseSolution::value(int component, double t) const {
  if (t >= 0.0 && t <= mesh_.length()) return interior_value(component, t);
  const Resolved r = resolve(component, t);
  if (!r.interior) return r.offset;
  return r.scale * interior_value(component, r.inner) + r.offset;
}

double PiecewiseSolution::integral(int component) const noexcept {
  double total = 0.0;
  for (int i = 0; i < mesh_.intervals(); ++i) {
    const double* a = coeffs_.data() + block_offset(i, component);
    for (int d = 0; d <= degree(); ++d) total += a[d] / (d + 1);
  }
  return total * mesh_.width();
}

double PiecewiseSolution::sup_norm(int component) const noexcept {
  double m = 0.0;
  const int samples = 8;
  for (int i = 0; i < mesh_.intervals(); ++i) {
    for (int q = 0; q <= samples; ++q) {
      const double t = mesh_.left(i) + mesh_.width() * q / samples;
      m = std::max(m, std::abs(interior_value(component, std::min(t, mesh_.length()))));
    }
  }
  return m;
}

double PiecewiseSolution::continuity_defect() const noexcept {
  double worst = 0.0;
  for (int i = 0; i + 1 < mesh_.intervals(); ++i) {
    for (int c = 0; c < components_; ++c) {
      const double* a = coeffs_.data() + block_offset(i, c);
      const double* b = coeffs_.data() + block_offset(i + 1, c);
      double end = 0.0;
      for (int d = 0; d <= degree(); ++d) end += a[d];
      worst = std::max(worst, std::abs(end - b[0]));
    }
  }
  return worst;
}

PiecewiseSolution PiecewiseSolution::refined(int factor) const {
  if (factor < 1) throw ContractViolation("refined: factor must be positive");
  Mesh fine(mesh_.length(), mesh_.intervals() * factor, mesh_.gauss());
  PiecewiseSolution out(fine, components_, extensions_, params_);
  const int k = degree();
  // binomial table
  std::vector<std::vector<double>> binom(k + 1, std::vector<double>(k + 1, 0.0));
  for (int n = 0; n <= k; ++n) {
    binom[n][0] = 1.0;
    for (int r = 1; r <= n; ++r) binom[n][r] = binom[n - 1][r - 1] + (r <= n - 1 ? binom[n - 1][r] : 0.0);
  }
  for (int i = 0; i < mesh_.intervals(); ++i) {
    for (int c = 0; c < components_; ++c) {
      const double* a = coeffs_.data() + block_offset(i, c);
      for (int q = 0; q < factor; ++q) {
        // p((q + s)/factor) expanded in s
        double* dst = out.coeffs_.data() + out.block_offset(i * factor + q, c);
        for (int e = 0; e <= k; ++e) dst[e] = 0.0;
        const double shift = static_cast<double>(q) / factor;
        const double scale = 1.0 / factor;
        for (int d = 0; d <= k; ++d) {
          for (int e = 0; e <= d; ++e) {
            dst[e] += a[d] * binom[d][e] * std::pow(shift, d - e) * std::pow(scale, e);
          }
        }
      }
    }
  }
  return out;
}

}  // namespace fputw
