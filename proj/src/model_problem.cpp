#include "cdlab/model_problem.hpp"

#include <algorithm>
#include <cmath>

namespace cdlab {

double block_profile(const BlockIC& ic, double z) {
  const double l0 = ic.l0();
  const double l1 = ic.l1();
  const double l2 = ic.l2();
  const double two_h2 = 2.0 * ic.h_c * ic.h_c;
  if (z < l0) return 1.0;
  if (z < l1) return 1.0 - (z - l0) * (z - l0) / two_h2;
  if (z < l2) return (l2 - z) * (l2 - z) / two_h2;
  return 0.0;
}

double block_ic_value(const BlockIC& ic, double x, double y) {
  return block_profile(ic, std::abs(x - ic.center.x())) *
         block_profile(ic, std::abs(y - ic.center.y()));
}

namespace {

bool on_mesh_line(double x, double h, double tol) {
  const double k = x / h;
  return std::abs(k - std::round(k)) <= tol * std::max(1.0, std::abs(k));
}

bool axis_fits(const BlockIC& ic, double c, const SplineSpace1D& s, double tol) {
  const double h = s.h();
  for (double l : {ic.l0(), ic.l1(), ic.l2()}) {
    if (!on_mesh_line(c - l, h, tol) || !on_mesh_line(c + l, h, tol)) return false;
  }
  return true;
}

}  // namespace

bool block_fits_mesh(const BlockIC& ic, const SplineSpace2D& space, double tol) {
  return axis_fits(ic, ic.center.x(), space.x(), tol) && axis_fits(ic, ic.center.y(), space.y(), tol);
}

}  // namespace cdlab
