#pragma once

#include <Eigen/Core>

#include "cdlab/spline_space.hpp"

namespace cdlab {

/// Smoothed block centred at `center`: a plateau of half-width n h_c followed by two
/// quadratic ramps of width h_c.
struct BlockIC {
  int n = 2;
  double h_c = 1.0 / 16.0;
  Eigen::Vector2d center{0.5, 0.5};

  double l0() const noexcept { return n * h_c; }
  double l1() const noexcept { return (n + 1) * h_c; }
  double l2() const noexcept { return (n + 2) * h_c; }
};

/// One-dimensional profile as a function of the distance z >= 0 from the centre.
double block_profile(const BlockIC& ic, double z);

double block_ic_value(const BlockIC& ic, double x, double y);

/// True when l0, l1, l2 on both sides of the centre fall on mesh lines.
bool block_fits_mesh(const BlockIC& ic, const SplineSpace2D& space, double tol = 1e-12);

}  // namespace cdlab
