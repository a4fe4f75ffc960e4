#include "fputw/mesh.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "fputw/errors.hpp"

namespace fputw {

void gauss_legendre(int k, std::vector<double>& nodes, std::vector<double>& weights) {
  nodes.assign(k, 0.0);
  weights.assign(k, 0.0);
  for (int i = 0; i < k; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (k + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int j = 2; j <= k; ++j) {
        double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      dp = k * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // recompute derivative at the converged root
    double p0 = 1.0, p1 = x;
    for (int j = 2; j <= k; ++j) {
      double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
      p0 = p1;
      p1 = p2;
    }
    dp = k * (x * p1 - p0) / (x * x - 1.0);
    nodes[k - 1 - i] = 0.5 * (x + 1.0);
    weights[k - 1 - i] = 1.0 / ((1.0 - x * x) * dp * dp);
  }
}

Mesh::Mesh(double length, int intervals, int gauss)
    : length_(length), intervals_(intervals), gauss_(gauss) {
  gauss_legendre(gauss, nodes_, weights_);
}

int Mesh::locate(double t) const noexcept {
  int i = static_cast<int>(std::floor(t / width()));
  if (i < 0) return 0;
  if (i >= intervals_) return intervals_ - 1;
  return i;
}

Mesh build_mesh(double length, int intervals, int gauss) {
  if (!(length > 0.0) || !std::isfinite(length))
    throw ContractViolation("build_mesh: length must be positive, got " + std::to_string(length));
  if (intervals < 4)
    throw ContractViolation("build_mesh: need at least 4 intervals, got " + std::to_string(intervals));
  if (gauss < 2 || gauss > 5)
    throw ContractViolation("build_mesh: Gauss order must lie in [2, 5], got " + std::to_string(gauss));
  return Mesh(length, intervals, gauss);
}

}  // namespace fputw
