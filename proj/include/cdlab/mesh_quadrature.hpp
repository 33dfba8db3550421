#pragma once

#include <span>
#include <vector>

#include <Eigen/Core>

#include "cdlab/spline_space.hpp"

namespace cdlab {

struct GaussRule {
  std::vector<double> points;   // on [-1, 1]
  std::vector<double> weights;  // sum to 2
};

/// n-point Gauss-Legendre rule on [-1, 1].
GaussRule gauss_legendre(int n);

struct QuadraturePoint {
  Eigen::Vector2d position;
  double weight;  // Gauss weight times |J|
};

/// Basis data at one quadrature point for the local_size() active functions.
struct PointTable {
  std::vector<double> value;
  std::vector<double> dx;
  std::vector<double> dy;
  std::vector<double> laplacian;
};

/// Values of a spline field at every quadrature point of the grid, indexed
/// element * points_per_element + q.
struct PointField {
  std::vector<double> value;
  std::vector<double> dx;
  std::vector<double> dy;
  std::vector<double> laplacian;

  std::size_t size() const noexcept { return value.size(); }
};

/// Tensor Gauss rule on every element of the uniform periodic mesh, with
/// element-independent basis tables. Quadrature points sit strictly inside
/// elements, so second-derivative jumps on knot lines are never sampled.
class QuadratureGrid {
 public:
  explicit QuadratureGrid(const SplineSpace2D& space, int points_per_axis = 0);

  const SplineSpace2D& space() const noexcept { return space_; }
  int points_per_axis() const noexcept { return points_per_axis_; }
  int points_per_element() const noexcept { return points_per_axis_ * points_per_axis_; }
  int num_elements() const noexcept { return space_.num_elements(); }
  int num_points() const noexcept { return num_elements() * points_per_element(); }
  double jacobian_determinant() const noexcept { return jac_det_; }

  /// G = (dxi/dx)^T (dxi/dx); diag((2/h_x)^2, (2/h_y)^2) on the Cartesian mesh.
  Eigen::Matrix2d metric_tensor(int element) const;

  std::vector<QuadraturePoint> quadrature_points(int element) const;

  /// Combined weight of local point q (identical on every element).
  std::span<const double> local_weights() const noexcept { return local_weights_; }
  /// Combined weights of all points, in global point order.
  std::span<const double> weights() const noexcept { return all_weights_; }
  std::span<const PointTable> tables() const noexcept { return tables_; }
  /// Physical positions of all points.
  const std::vector<Eigen::Vector2d>& positions() const noexcept { return positions_; }

  /// Evaluate sum_i c_i N_i (value, gradient, Laplacian) at all points.
  PointField interpolate(std::span<const double> coeffs) const;
  /// Values only.
  std::vector<double> interpolate_values(std::span<const double> coeffs) const;

  /// Sum of w * v over all points.
  double integrate(std::span<const double> values) const;

 private:
  SplineSpace2D space_;
  int points_per_axis_;
  double jac_det_;
  std::vector<double> local_weights_;
  std::vector<double> all_weights_;
  std::vector<Eigen::Vector2d> local_parent_;
  std::vector<Eigen::Vector2d> positions_;
  std::vector<PointTable> tables_;
};

}  // namespace cdlab
