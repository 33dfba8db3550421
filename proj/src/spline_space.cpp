#include "cdlab/spline_space.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include "cdlab/errors.hpp"
#include "cdlab/mesh_quadrature.hpp"

namespace cdlab {
namespace {

constexpr int kMaxDegree = 2;

int wrap(int i, int m) { return ((i % m) + m) % m; }

// Cox-de Boor values and derivatives up to order 2 of the p+1 functions that are
// nonzero on the span [knots[p], knots[p+1]]. Knots are local: knots[j] = (j - p) h.
std::array<std::array<double, kMaxDegree + 1>, 3> cox_de_boor(int p, double h, double x) {
  std::array<double, 2 * kMaxDegree + 2> knots{};
  for (int j = 0; j < 2 * p + 2; ++j) knots[j] = (j - p) * h;
  const int span = p;

  std::array<std::array<double, kMaxDegree + 1>, kMaxDegree + 1> ndu{};
  std::array<double, kMaxDegree + 1> left{};
  std::array<double, kMaxDegree + 1> right{};
  ndu[0][0] = 1.0;
  for (int j = 1; j <= p; ++j) {
    left[j] = x - knots[span + 1 - j];
    right[j] = knots[span + j] - x;
    double saved = 0.0;
    for (int r = 0; r < j; ++r) {
      ndu[j][r] = right[r + 1] + left[j - r];
      const double temp = ndu[r][j - 1] / ndu[j][r];
      ndu[r][j] = saved + right[r + 1] * temp;
      saved = left[j - r] * temp;
    }
    ndu[j][j] = saved;
  }

  std::array<std::array<double, kMaxDegree + 1>, 3> ders{};
  for (int j = 0; j <= p; ++j) ders[0][j] = ndu[j][p];

  const int max_order = std::min(2, p);
  std::array<std::array<double, kMaxDegree + 1>, 2> a{};
  for (int r = 0; r <= p; ++r) {
    int s1 = 0;
    int s2 = 1;
    a[0][0] = 1.0;
    for (int k = 1; k <= max_order; ++k) {
      double d = 0.0;
      const int rk = r - k;
      const int pk = p - k;
      if (r >= k) {
        a[s2][0] = a[s1][0] / ndu[pk + 1][rk];
        d = a[s2][0] * ndu[rk][pk];
      }
      const int j1 = rk >= -1 ? 1 : -rk;
      const int j2 = (r - 1 <= pk) ? k - 1 : p - r;
      for (int j = j1; j <= j2; ++j) {
        a[s2][j] = (a[s1][j] - a[s1][j - 1]) / ndu[pk + 1][rk + j];
        d += a[s2][j] * ndu[rk + j][pk];
      }
      if (r <= pk) {
        a[s2][k] = -a[s1][k - 1] / ndu[pk + 1][r];
        d += a[s2][k] * ndu[r][pk];
      }
      ders[k][r] = d;
      std::swap(s1, s2);
    }
  }
  int factor = p;
  for (int k = 1; k <= max_order; ++k) {
    for (int j = 0; j <= p; ++j) ders[k][j] *= factor;
    factor *= (p - k);
  }
  return ders;
}

}  // namespace

SplineSpace1D::SplineSpace1D(int degree, int num_elements, double length)
    : degree_(degree), num_elements_(num_elements), length_(length) {
  if (degree < 1 || degree > kMaxDegree) {
    throw ValidationError("spline degree must be 1 or 2, got " + std::to_string(degree));
  }
  if (num_elements < 3) {
    throw ValidationError("periodic spline space needs at least 3 elements, got " +
                          std::to_string(num_elements));
  }
  if (!(length > 0.0)) throw ValidationError("domain length must be positive");
}

std::vector<int> SplineSpace1D::active_functions(int element) const {
  if (element < 0 || element >= num_elements_) {
    throw std::out_of_range("element index " + std::to_string(element) + " out of range");
  }
  std::vector<int> out(degree_ + 1);
  for (int k = 0; k <= degree_; ++k) out[k] = wrap(element - degree_ + k, num_elements_);
  return out;
}

std::vector<BasisValue1D> SplineSpace1D::evaluate(int element, double xi) const {
  if (element < 0 || element >= num_elements_) {
    throw std::out_of_range("element index " + std::to_string(element) + " out of range");
  }
  const double hh = h();
  const auto ders = cox_de_boor(degree_, hh, 0.5 * (xi + 1.0) * hh);
  std::vector<BasisValue1D> out(degree_ + 1);
  for (int k = 0; k <= degree_; ++k) out[k] = {ders[0][k], ders[1][k], ders[2][k]};
  return out;
}

std::pair<int, double> SplineSpace1D::locate(double x) const {
  double wrapped = std::fmod(x, length_);
  if (wrapped < 0.0) wrapped += length_;
  const double hh = h();
  int element = static_cast<int>(std::floor(wrapped / hh));
  if (element >= num_elements_) element = num_elements_ - 1;
  const double xi = 2.0 * (wrapped - element * hh) / hh - 1.0;
  return {element, std::clamp(xi, -1.0, 1.0)};
}

SplineSpace2D::SplineSpace2D(SplineSpace1D x, SplineSpace1D y) : x_(std::move(x)), y_(std::move(y)) {
  if (x_.degree() != y_.degree()) throw ValidationError("tensor factors must share a degree");
  const int n_loc = local_size();
  connectivity_.resize(static_cast<std::size_t>(num_elements()) * n_loc);
  for (int ey = 0; ey < y_.num_elements(); ++ey) {
    const auto iy = y_.active_functions(ey);
    for (int ex = 0; ex < x_.num_elements(); ++ex) {
      const auto ix = x_.active_functions(ex);
      int* dst = connectivity_.data() + static_cast<std::size_t>(element_index(ex, ey)) * n_loc;
      for (int ky = 0; ky <= degree(); ++ky) {
        for (int kx = 0; kx <= degree(); ++kx) {
          dst[ky * (degree() + 1) + kx] = iy[ky] * x_.num_functions() + ix[kx];
        }
      }
    }
  }
}

SplineSpace2D::SplineSpace2D(int degree, int mx, int my, double lx, double ly)
    : SplineSpace2D(SplineSpace1D(degree, mx, lx), SplineSpace1D(degree, my, ly)) {}

int SplineSpace2D::element_index(int ex, int ey) const {
  if (ex < 0 || ex >= x_.num_elements() || ey < 0 || ey >= y_.num_elements()) {
    throw std::out_of_range("element (" + std::to_string(ex) + ", " + std::to_string(ey) +
                            ") out of range");
  }
  return ey * x_.num_elements() + ex;
}

std::span<const int> SplineSpace2D::connectivity(int element) const {
  if (element < 0 || element >= num_elements()) {
    throw std::out_of_range("element index " + std::to_string(element) + " out of range");
  }
  const auto n_loc = static_cast<std::size_t>(local_size());
  return {connectivity_.data() + static_cast<std::size_t>(element) * n_loc, n_loc};
}

std::vector<BasisValue2D> SplineSpace2D::evaluate(int ex, int ey, double xi, double eta) const {
  const auto bx = x_.evaluate(ex, xi);
  const auto by = y_.evaluate(ey, eta);
  std::vector<BasisValue2D> out(local_size());
  for (int ky = 0; ky <= degree(); ++ky) {
    for (int kx = 0; kx <= degree(); ++kx) {
      auto& v = out[ky * (degree() + 1) + kx];
      v.value = bx[kx].value * by[ky].value;
      v.grad = {bx[kx].d1 * by[ky].value, bx[kx].value * by[ky].d1};
      v.laplacian = bx[kx].d2 * by[ky].value + bx[kx].value * by[ky].d2;
    }
  }
  return out;
}

double SplineSpace2D::evaluate_field(std::span<const double> coeffs, double x, double y) const {
  if (coeffs.size() != static_cast<std::size_t>(num_functions())) {
    throw ValidationError("coefficient vector has wrong length");
  }
  const auto [ex, xi] = x_.locate(x);
  const auto [ey, eta] = y_.locate(y);
  const auto values = evaluate(ex, ey, xi, eta);
  const auto conn = connectivity(element_index(ex, ey));
  double sum = 0.0;
  for (std::size_t a = 0; a < values.size(); ++a) sum += coeffs[conn[a]] * values[a].value;
  return sum;
}

std::vector<BasisValue1D> eval_basis_1d(const SplineSpace1D& space, int element, double xi) {
  return space.evaluate(element, xi);
}

std::vector<BasisValue2D> eval_basis_2d(const SplineSpace2D& space, int ex, int ey, double xi,
                                        double eta) {
  return space.evaluate(ex, ey, xi, eta);
}

Eigen::VectorXd project_l2(const SplineSpace2D& space, const ScalarField2D& f, int points_per_axis) {
  const int npa = points_per_axis > 0 ? points_per_axis : std::max(space.degree() + 2, 4);
  const QuadratureGrid grid(space, npa);
  const int n = space.num_functions();
  const int n_loc = space.local_size();
  const int npe = grid.points_per_element();

  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(space.num_elements()) * n_loc * n_loc);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  const auto& positions = grid.positions();
  for (int e = 0; e < space.num_elements(); ++e) {
    const auto conn = space.connectivity(e);
    for (int q = 0; q < npe; ++q) {
      const auto& tab = grid.tables()[q];
      const double w = grid.local_weights()[q];
      const auto& xq = positions[static_cast<std::size_t>(e) * npe + q];
      const double fq = f(xq.x(), xq.y());
      for (int a = 0; a < n_loc; ++a) {
        rhs[conn[a]] += w * tab.value[a] * fq;
        for (int b = 0; b < n_loc; ++b) {
          triplets.emplace_back(conn[a], conn[b], w * tab.value[a] * tab.value[b]);
        }
      }
    }
  }
  Eigen::SparseMatrix<double> mass(n, n);
  mass.setFromTriplets(triplets.begin(), triplets.end());
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(mass);
  if (solver.info() != Eigen::Success) {
    throw SolverError("mass matrix factorization failed", std::nan(""));
  }
  Eigen::VectorXd c = solver.solve(rhs);
  // One refinement sweep brings the projection to roundoff.
  c += solver.solve(rhs - mass * c);
  return c;
}

double l2_distance(const SplineSpace2D& space, std::span<const double> coeffs,
                   const ScalarField2D& f, int points_per_axis) {
  const QuadratureGrid grid(space, points_per_axis);
  const auto values = grid.interpolate_values(coeffs);
  const auto& positions = grid.positions();
  const auto weights = grid.weights();
  double sum = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double diff = values[i] - f(positions[i].x(), positions[i].y());
    sum += weights[i] * diff * diff;
  }
  return std::sqrt(sum);
}

}  // namespace cdlab
