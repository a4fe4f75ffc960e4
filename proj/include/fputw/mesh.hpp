#pragma once

#include <vector>

namespace fputw {

/// Uniform partition of [0, length] with `gauss` Gauss-Legendre collocation
/// nodes per interval.
class Mesh {
 public:
  Mesh() = default;
  Mesh(double length, int intervals, int gauss);

  double length() const noexcept { return length_; }
  int intervals() const noexcept { return intervals_; }
  int gauss() const noexcept { return gauss_; }
  double width() const noexcept { return length_ / intervals_; }
  double left(int i) const noexcept { return i * width(); }

  /// Interval containing t, clamped to [0, intervals-1].
  int locate(double t) const noexcept;

  /// Gauss nodes on the reference interval [0, 1], ascending.
  const std::vector<double>& nodes() const noexcept { return nodes_; }
  const std::vector<double>& weights() const noexcept { return weights_; }

  bool operator==(const Mesh& o) const noexcept {
    return length_ == o.length_ && intervals_ == o.intervals_ && gauss_ == o.gauss_;
  }

 private:
  double length_ = 0.0;
  int intervals_ = 0;
  int gauss_ = 0;
  std::vector<double> nodes_;
  std::vector<double> weights_;
};

/// Throws ContractViolation unless L > 0, M >= 4 and 2 <= k <= 5.
Mesh build_mesh(double length, int intervals, int gauss = 3);

/// Gauss-Legendre nodes and weights on [0, 1].
void gauss_legendre(int k, std::vector<double>& nodes, std::vector<double>& weights);

}  // namespace fputw
