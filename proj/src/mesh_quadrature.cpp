#include "cdlab/mesh_quadrature.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "cdlab/errors.hpp"
#include "cdlab/kernels.hpp"

namespace cdlab {

GaussRule gauss_legendre(int n) {
  if (n < 1) throw ValidationError("Gauss rule needs at least one point");
  GaussRule rule;
  rule.points.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    // Newton on P_n from the Chebyshev-like initial guess.
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    double p0 = 1.0;
    double p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = pk;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.points[i] = -x;
    rule.points[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.points[n / 2] = 0.0;
  return rule;
}

QuadratureGrid::QuadratureGrid(const SplineSpace2D& space, int points_per_axis)
    : space_(space),
      points_per_axis_(points_per_axis > 0 ? points_per_axis : space.degree() + 1) {
  const GaussRule rule = gauss_legendre(points_per_axis_);
  const double hx = space_.x().h();
  const double hy = space_.y().h();
  jac_det_ = 0.25 * hx * hy;

  const int npa = points_per_axis_;
  local_weights_.resize(npa * npa);
  local_parent_.resize(npa * npa);
  tables_.resize(npa * npa);
  for (int qy = 0; qy < npa; ++qy) {
    for (int qx = 0; qx < npa; ++qx) {
      const int q = qy * npa + qx;
      local_weights_[q] = rule.weights[qx] * rule.weights[qy] * jac_det_;
      local_parent_[q] = {rule.points[qx], rule.points[qy]};
      // Uniform mesh: the table of element 0 is the table of every element.
      const auto values = space_.evaluate(0, 0, rule.points[qx], rule.points[qy]);
      auto& tab = tables_[q];
      for (const auto& v : values) {
        tab.value.push_back(v.value);
        tab.dx.push_back(v.grad.x());
        tab.dy.push_back(v.grad.y());
        tab.laplacian.push_back(v.laplacian);
      }
    }
  }

  const int npe = points_per_element();
  all_weights_.resize(static_cast<std::size_t>(num_points()));
  positions_.resize(static_cast<std::size_t>(num_points()));
  for (int ey = 0; ey < space_.y().num_elements(); ++ey) {
    for (int ex = 0; ex < space_.x().num_elements(); ++ex) {
      const int e = space_.element_index(ex, ey);
      for (int q = 0; q < npe; ++q) {
        const auto idx = static_cast<std::size_t>(e) * npe + q;
        all_weights_[idx] = local_weights_[q];
        positions_[idx] = {(ex + 0.5 * (local_parent_[q].x() + 1.0)) * hx,
                           (ey + 0.5 * (local_parent_[q].y() + 1.0)) * hy};
      }
    }
  }
}

Eigen::Matrix2d QuadratureGrid::metric_tensor(int element) const {
  if (element < 0 || element >= num_elements()) {
    throw std::out_of_range("element index " + std::to_string(element) + " out of range");
  }
  Eigen::Matrix2d inv_jac = Eigen::Matrix2d::Zero();
  inv_jac(0, 0) = 2.0 / space_.x().h();
  inv_jac(1, 1) = 2.0 / space_.y().h();
  return inv_jac.transpose() * inv_jac;
}

std::vector<QuadraturePoint> QuadratureGrid::quadrature_points(int element) const {
  if (element < 0 || element >= num_elements()) {
    throw std::out_of_range("element index " + std::to_string(element) + " out of range");
  }
  const int npe = points_per_element();
  std::vector<QuadraturePoint> out(npe);
  for (int q = 0; q < npe; ++q) {
    const auto idx = static_cast<std::size_t>(element) * npe + q;
    out[q] = {positions_[idx], local_weights_[q]};
  }
  return out;
}

PointField QuadratureGrid::interpolate(std::span<const double> coeffs) const {
  if (coeffs.size() != static_cast<std::size_t>(space_.num_functions())) {
    throw ValidationError("coefficient vector has wrong length");
  }
  const int npe = points_per_element();
  const int n_loc = space_.local_size();
  PointField out;
  const auto total = static_cast<std::size_t>(num_points());
  out.value.assign(total, 0.0);
  out.dx.assign(total, 0.0);
  out.dy.assign(total, 0.0);
  out.laplacian.assign(total, 0.0);
  std::vector<double> local(n_loc);
  for (int e = 0; e < num_elements(); ++e) {
    const auto conn = space_.connectivity(e);
    for (int a = 0; a < n_loc; ++a) local[a] = coeffs[conn[a]];
    for (int q = 0; q < npe; ++q) {
      const auto& tab = tables_[q];
      double v = 0.0, gx = 0.0, gy = 0.0, lap = 0.0;
      for (int a = 0; a < n_loc; ++a) {
        v += tab.value[a] * local[a];
        gx += tab.dx[a] * local[a];
        gy += tab.dy[a] * local[a];
        lap += tab.laplacian[a] * local[a];
      }
      const auto idx = static_cast<std::size_t>(e) * npe + q;
      out.value[idx] = v;
      out.dx[idx] = gx;
      out.dy[idx] = gy;
      out.laplacian[idx] = lap;
    }
  }
  return out;
}

std::vector<double> QuadratureGrid::interpolate_values(std::span<const double> coeffs) const {
  if (coeffs.size() != static_cast<std::size_t>(space_.num_functions())) {
    throw ValidationError("coefficient vector has wrong length");
  }
  const int npe = points_per_element();
  const int n_loc = space_.local_size();
  std::vector<double> out(static_cast<std::size_t>(num_points()), 0.0);
  for (int e = 0; e < num_elements(); ++e) {
    const auto conn = space_.connectivity(e);
    for (int q = 0; q < npe; ++q) {
      const auto& tab = tables_[q];
      double v = 0.0;
      for (int a = 0; a < n_loc; ++a) v += tab.value[a] * coeffs[conn[a]];
      out[static_cast<std::size_t>(e) * npe + q] = v;
    }
  }
  return out;
}

double QuadratureGrid::integrate(std::span<const double> values) const {
  return kernels::weighted_sum(all_weights_, values);
}

}  // namespace cdlab
