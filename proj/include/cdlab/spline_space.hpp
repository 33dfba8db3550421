#pragma once

#include <functional>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace cdlab {

struct BasisValue1D {
  double value = 0.0;
  double d1 = 0.0;  // d/dx, physical
  double d2 = 0.0;  // d^2/dx^2, physical
};

struct BasisValue2D {
  double value = 0.0;
  Eigen::Vector2d grad = Eigen::Vector2d::Zero();
  double laplacian = 0.0;
};

/// Periodic B-spline space of degree 1 or 2 on a uniform knot vector over [0, L).
///
/// Element e covers [e h, (e+1) h] and carries the p+1 functions e-p, ..., e
/// (indices taken modulo m). Element-local coordinates live on the parent
/// interval [-1, 1], so dxi/dx = 2/h.
class SplineSpace1D {
 public:
  SplineSpace1D(int degree, int num_elements, double length = 1.0);

  int degree() const noexcept { return degree_; }
  int num_elements() const noexcept { return num_elements_; }
  int num_functions() const noexcept { return num_elements_; }
  double length() const noexcept { return length_; }
  double h() const noexcept { return length_ / num_elements_; }

  /// Global indices of the p+1 functions active on `element`, in local order.
  std::vector<int> active_functions(int element) const;

  /// Values and physical derivatives of the active functions at parent coordinate xi.
  std::vector<BasisValue1D> evaluate(int element, double xi) const;

  /// Element containing physical coordinate x (wrapped into [0, L)) and its parent coordinate.
  std::pair<int, double> locate(double x) const;

 private:
  int degree_;
  int num_elements_;
  double length_;
};

/// Tensor product of two periodic 1D spaces. Global index = iy * m_x + ix,
/// element index = ey * m_x + ex, local index = ky * (p+1) + kx.
class SplineSpace2D {
 public:
  SplineSpace2D(SplineSpace1D x, SplineSpace1D y);
  SplineSpace2D(int degree, int mx, int my, double lx = 1.0, double ly = 1.0);

  const SplineSpace1D& x() const noexcept { return x_; }
  const SplineSpace1D& y() const noexcept { return y_; }
  int degree() const noexcept { return x_.degree(); }
  int num_functions() const noexcept { return x_.num_functions() * y_.num_functions(); }
  int num_elements() const noexcept { return x_.num_elements() * y_.num_elements(); }
  int local_size() const noexcept { return (degree() + 1) * (degree() + 1); }
  int element_index(int ex, int ey) const;
  double area() const noexcept { return x_.length() * y_.length(); }

  /// Active global indices of an element, local_size() entries.
  std::span<const int> connectivity(int element) const;

  std::vector<BasisValue2D> evaluate(int ex, int ey, double xi, double eta) const;

  /// Point evaluation of sum_i c_i N_i at physical (x, y).
  double evaluate_field(std::span<const double> coeffs, double x, double y) const;

 private:
  SplineSpace1D x_;
  SplineSpace1D y_;
  std::vector<int> connectivity_;
};

std::vector<BasisValue1D> eval_basis_1d(const SplineSpace1D& space, int element, double xi);
std::vector<BasisValue2D> eval_basis_2d(const SplineSpace2D& space, int ex, int ey, double xi,
                                        double eta);

using ScalarField2D = std::function<double(double, double)>;

/// L2 projection onto the spline space. `points_per_axis` = 0 picks max(p+2, 4).
Eigen::VectorXd project_l2(const SplineSpace2D& space, const ScalarField2D& f,
                           int points_per_axis = 0);

/// || sum_i c_i N_i - f ||_{L2(Omega)} with an n-point Gauss rule per element axis.
double l2_distance(const SplineSpace2D& space, std::span<const double> coeffs,
                   const ScalarField2D& f, int points_per_axis = 6);

}  // namespace cdlab
