#include "cdlab/formulations.hpp"

#include <cmath>
#include <limits>
#include <string>

#include <Eigen/SparseLU>

#include "cdlab/errors.hpp"
#include "cdlab/kernels.hpp"

namespace cdlab {

FormulationTraits traits(FormulationKind kind) noexcept {
  using K = FormulationKind;
  FormulationTraits t;
  switch (kind) {
    case K::Galerkin: break;
    case K::SupgStatic: t = {true, SmallScaleMode::Static, 0.0, 1.0, false}; break;
    case K::VmsStatic: t = {true, SmallScaleMode::Static, 1.0, 1.0, false}; break;
    case K::GlsStatic: t = {true, SmallScaleMode::Static, -1.0, 1.0, false}; break;
    case K::VmsDynamic: t = {true, SmallScaleMode::Dynamic, 1.0, 1.0, false}; break;
    case K::SupgDynamicConsistent: t = {true, SmallScaleMode::Dynamic, 0.0, 1.0, false}; break;
    case K::SupgDynamicInconsistent: t = {true, SmallScaleMode::Dynamic, 0.0, 0.0, false}; break;
    case K::GlsDynamic: t = {true, SmallScaleMode::Dynamic, -1.0, 1.0, false}; break;
    case K::DynamicOrthogonal: t = {true, SmallScaleMode::Dynamic, 1.0, 1.0, true}; break;
  }
  return t;
}

bool is_dynamic(FormulationKind kind) noexcept {
  const auto t = traits(kind);
  return t.stabilized && t.mode == SmallScaleMode::Dynamic;
}

bool is_static(FormulationKind kind) noexcept {
  const auto t = traits(kind);
  return t.stabilized && t.mode == SmallScaleMode::Static;
}

std::string_view short_name(FormulationKind kind) noexcept {
  using K = FormulationKind;
  switch (kind) {
    case K::Galerkin: return "galerkin";
    case K::SupgStatic: return "supgs";
    case K::VmsStatic: return "vmss";
    case K::GlsStatic: return "glss";
    case K::VmsDynamic: return "vmsd";
    case K::SupgDynamicConsistent: return "supgd";
    case K::SupgDynamicInconsistent: return "supgd-inconsistent";
    case K::GlsDynamic: return "glsd";
    case K::DynamicOrthogonal: return "do";
  }
  return "unknown";
}

FormulationKind parse_formulation(std::string_view name) {
  std::string accepted;
  for (auto kind : kAllFormulations) {
    if (short_name(kind) == name) return kind;
    if (!accepted.empty()) accepted += ", ";
    accepted += short_name(kind);
  }
  throw ValidationError("unknown formulation '" + std::string(name) + "' (expected one of " +
                        accepted + ")");
}

Discretization::Discretization(QuadratureGrid grid, FormulationKind kind, PhysicsParams physics,
                               AlphaParams alpha)
    : grid_(std::move(grid)), kind_(kind), traits_(traits(kind)), physics_(physics),
      alpha_(alpha) {
  std::vector<std::string> problems;
  if (!(physics_.diffusivity >= 0.0)) problems.push_back("diffusivity must be >= 0");
  if (traits_.multiplier && !(physics_.diffusivity > 0.0)) {
    problems.push_back("DO requires positive diffusivity");
  }
  if (!(physics_.inverse_constant > 0.0)) problems.push_back("inverse-estimate constant must be > 0");
  if (physics_.r_switch != 1 && physics_.r_switch != 2) problems.push_back("r_switch must be 1 or 2");
  if (!(physics_.multiplier_regularization >= 0.0)) {
    problems.push_back("multiplier regularization must be >= 0");
  }
  if (traits_.stabilized && !(alpha_.alpha_f > 0.0)) {
    problems.push_back("stabilized formulations need alpha_f > 0");
  }
  if (!problems.empty()) throw ValidationError(std::move(problems));

  taus_.resize(static_cast<std::size_t>(grid_.num_elements()));
  if (!traits_.stabilized) return;
  StabilizationParams sp;
  sp.velocity = physics_.velocity;
  sp.diffusivity = physics_.diffusivity;
  sp.inverse_constant = physics_.inverse_constant;
  sp.alpha = alpha_;
  sp.r_switch = physics_.r_switch;
  for (int e = 0; e < grid_.num_elements(); ++e) {
    const Eigen::Matrix2d g = grid_.metric_tensor(e);
    auto& t = taus_[e];
    t.time = tau_time(alpha_);
    if (traits_.mode == SmallScaleMode::Static) {
      t.small = tau_static(sp, g);
      t.eff = t.small;
    } else {
      t.small = tau_dyn(sp, g);
      t.map = condensation_coefficients(alpha_, t.small);
      t.eff = -t.map.slope_value;
    }
  }
  if (traits_.multiplier) {
    const Eigen::Matrix2d g = grid_.metric_tensor(0);
    const double kappa = physics_.diffusivity;
    regularization_ =
        physics_.multiplier_regularization * kappa * kappa * (g.array() * g.array()).sum();
  }
}

std::vector<double> sample_forcing(const QuadratureGrid& grid, const Forcing& f, double t) {
  std::vector<double> out(static_cast<std::size_t>(grid.num_points()), 0.0);
  if (!f) return out;
  const auto& pos = grid.positions();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = f(pos[i].x(), pos[i].y(), t);
  return out;
}

namespace {

bool same_map(const CondensationMap& a, const CondensationMap& b) {
  return a.slope_value == b.slope_value && a.slope_rate == b.slope_rate &&
         a.value_from_value == b.value_from_value && a.value_from_rate == b.value_from_rate &&
         a.rate_from_value == b.rate_from_value && a.rate_from_rate == b.rate_from_rate;
}

bool uniform_maps(const Discretization& disc) {
  const auto& first = disc.tau(0).map;
  for (int e = 1; e < disc.grid().num_elements(); ++e) {
    if (!same_map(first, disc.tau(e).map)) return false;
  }
  return true;
}

void check_state(const Discretization& disc, const LevelState& state) {
  const auto n = static_cast<Eigen::Index>(disc.num_phi());
  if (state.large.phi.size() != n || state.large.rate.size() != n) {
    throw ValidationError("state size does not match the spline space");
  }
  if (disc.kind_traits().stabilized &&
      state.small.size() != static_cast<std::size_t>(disc.grid().num_points())) {
    throw ValidationError("small-scale field size does not match the quadrature grid");
  }
}

void check_forcing(const Discretization& disc, std::span<const double> forcing) {
  if (forcing.size() != static_cast<std::size_t>(disc.grid().num_points())) {
    throw ValidationError("forcing sample count does not match the quadrature grid");
  }
}

}  // namespace

AlphaFields evaluate_alpha_fields(const Discretization& disc, const LevelState& state,
                                  const Eigen::VectorXd& phi_next, const Eigen::VectorXd& sigma,
                                  std::span<const double> forcing_alpha) {
  check_state(disc, state);
  check_forcing(disc, forcing_alpha);
  const auto& grid = disc.grid();
  const auto& tr = disc.kind_traits();
  const auto& alpha = disc.alpha();
  const auto& phys = disc.physics();
  const double kappa = phys.diffusivity;
  const Eigen::Vector2d a = phys.velocity;

  const Eigen::VectorXd phi_a = value_at_alpha(alpha, state.large, phi_next);
  const Eigen::VectorXd rate_a = rate_at_alpha(alpha, state.large, phi_next);

  AlphaFields out;
  out.large = grid.interpolate({phi_a.data(), static_cast<std::size_t>(phi_a.size())});
  out.rate = grid.interpolate_values({rate_a.data(), static_cast<std::size_t>(rate_a.size())});
  out.forcing.assign(forcing_alpha.begin(), forcing_alpha.end());
  const std::size_t n = out.rate.size();
  out.lap_sigma.assign(n, 0.0);
  if (tr.multiplier) {
    if (sigma.size() != disc.num_phi()) throw ValidationError("multiplier vector has wrong length");
    const auto sf = grid.interpolate({sigma.data(), static_cast<std::size_t>(sigma.size())});
    for (std::size_t i = 0; i < n; ++i) out.lap_sigma[i] = kappa * sf.laplacian[i];
  }
  out.residual.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.residual[i] = out.rate[i] + a.x() * out.large.dx[i] + a.y() * out.large.dy[i] -
                      tr.residual_diffusion * kappa * out.large.laplacian[i] - out.forcing[i];
  }
  out.small.assign(n, 0.0);
  out.small_rate.assign(n, 0.0);
  if (!tr.stabilized) return out;

  const int npe = grid.points_per_element();
  if (tr.mode == SmallScaleMode::Static) {
    for (int e = 0; e < grid.num_elements(); ++e) {
      const double tau = disc.tau(e).small;
      for (int q = 0; q < npe; ++q) {
        const auto i = static_cast<std::size_t>(e) * npe + q;
        out.small[i] = static_evaluate(out.residual[i], tau);
      }
    }
    return out;
  }

  std::vector<double> forcing_small(n);
  for (std::size_t i = 0; i < n; ++i) forcing_small[i] = out.residual[i] - out.lap_sigma[i];
  if (uniform_maps(disc)) {
    condense(disc.tau(0).map, state.small, forcing_small, out.small, out.small_rate);
  } else {
    for (int e = 0; e < grid.num_elements(); ++e) {
      const auto& map = disc.tau(e).map;
      for (int q = 0; q < npe; ++q) {
        const auto i = static_cast<std::size_t>(e) * npe + q;
        out.small[i] = map.value_at_alpha(state.small.value[i], state.small.rate[i], forcing_small[i]);
        out.small_rate[i] =
            map.rate_at_alpha(state.small.value[i], state.small.rate[i], forcing_small[i]);
      }
    }
  }
  return out;
}

Eigen::VectorXd weak_residual(const Discretization& disc, const LevelState& state,
                              const Eigen::VectorXd& x, std::span<const double> forcing_alpha) {
  const int nphi = disc.num_phi();
  if (x.size() != disc.num_unknowns()) throw ValidationError("unknown vector has wrong length");
  const auto& tr = disc.kind_traits();
  const Eigen::VectorXd u = x.head(nphi);
  const Eigen::VectorXd sigma = tr.multiplier ? Eigen::VectorXd(x.tail(nphi)) : Eigen::VectorXd();
  const AlphaFields f = evaluate_alpha_fields(disc, state, u, sigma, forcing_alpha);

  const auto& grid = disc.grid();
  const auto& space = grid.space();
  const double kappa = disc.physics().diffusivity;
  const Eigen::Vector2d a = disc.physics().velocity;
  const double s = tr.weight_sign;
  const int npe = grid.points_per_element();
  const int n_loc = space.local_size();
  const auto w = grid.local_weights();
  const auto tables = grid.tables();

  Eigen::VectorXd r = Eigen::VectorXd::Zero(disc.num_unknowns());
  for (int e = 0; e < grid.num_elements(); ++e) {
    const auto conn = space.connectivity(e);
    for (int q = 0; q < npe; ++q) {
      const auto i = static_cast<std::size_t>(e) * npe + q;
      const auto& tab = tables[q];
      const double mass_term = f.rate[i] + f.small_rate[i] - f.forcing[i];
      const double conv = a.x() * f.large.dx[i] + a.y() * f.large.dy[i];
      for (int k = 0; k < n_loc; ++k) {
        const double na = tab.value[k];
        const double conv_w = a.x() * tab.dx[k] + a.y() * tab.dy[k];
        double val = na * (mass_term + conv) +
                     kappa * (tab.dx[k] * f.large.dx[i] + tab.dy[k] * f.large.dy[i]);
        if (tr.stabilized) val -= (conv_w + s * kappa * tab.laplacian[k]) * f.small[i];
        r[conn[k]] += w[q] * val;
        if (tr.multiplier) r[nphi + conn[k]] += w[q] * kappa * tab.laplacian[k] * f.small[i];
      }
    }
  }
  return r;
}

namespace {

using Triplets = std::vector<Eigen::Triplet<double>>;

Eigen::SparseMatrix<double> from_triplets(int n, const Triplets& t) {
  Eigen::SparseMatrix<double> m(n, n);
  m.setFromTriplets(t.begin(), t.end());
  m.makeCompressed();
  return m;
}

}  // namespace

Eigen::SparseMatrix<double> assemble_matrix(const Discretization& disc) {
  const auto& grid = disc.grid();
  const auto& space = grid.space();
  const auto& tr = disc.kind_traits();
  const auto& alpha = disc.alpha();
  const double kappa = disc.physics().diffusivity;
  const Eigen::Vector2d a = disc.physics().velocity;
  const double s = tr.weight_sign;
  const double chi = tr.residual_diffusion;
  const double cm = alpha.rate_coefficient();
  const double af = alpha.alpha_f;
  const int nphi = disc.num_phi();
  const int n_loc = space.local_size();
  const int npe = grid.points_per_element();
  const auto w = grid.local_weights();
  const auto tables = grid.tables();
  const bool dynamic = tr.stabilized && tr.mode == SmallScaleMode::Dynamic;

  Eigen::MatrixXd pp(n_loc, n_loc), ps(n_loc, n_loc), sp(n_loc, n_loc), ss(n_loc, n_loc);
  std::vector<double> conv(n_loc), weight(n_loc), trial(n_loc);
  Triplets trip;
  trip.reserve(static_cast<std::size_t>(grid.num_elements()) * n_loc * n_loc *
               (tr.multiplier ? 4 : 1));
  for (int e = 0; e < grid.num_elements(); ++e) {
    const auto& tau = disc.tau(e);
    // dphi'_alpha/dR and d(rate')_alpha/dR, negated.
    const double value_slope = tau.eff;
    const double rate_slope = dynamic ? -tau.map.slope_rate : 0.0;
    pp.setZero();
    ps.setZero();
    sp.setZero();
    ss.setZero();
    for (int q = 0; q < npe; ++q) {
      const auto& tab = tables[q];
      for (int k = 0; k < n_loc; ++k) {
        conv[k] = a.x() * tab.dx[k] + a.y() * tab.dy[k];
        weight[k] = conv[k] + s * kappa * tab.laplacian[k];
        trial[k] = cm * tab.value[k] + af * (conv[k] - chi * kappa * tab.laplacian[k]);
      }
      for (int i = 0; i < n_loc; ++i) {
        const double ni = tab.value[i];
        // Weight multiplying R in the condensed small-scale terms.
        const double stab_w = tr.stabilized ? value_slope * weight[i] - rate_slope * ni : 0.0;
        for (int j = 0; j < n_loc; ++j) {
          double v = cm * ni * tab.value[j] +
                     af * (ni * conv[j] + kappa * (tab.dx[i] * tab.dx[j] + tab.dy[i] * tab.dy[j]));
          v += stab_w * trial[j];
          pp(i, j) += w[q] * v;
          if (tr.multiplier) {
            const double lap_i = kappa * tab.laplacian[i];
            const double lap_j = kappa * tab.laplacian[j];
            ps(i, j) += w[q] * stab_w * (-lap_j);
            sp(i, j) += w[q] * (-value_slope) * lap_i * trial[j];
            ss(i, j) += w[q] * value_slope * lap_i * lap_j;
          }
        }
      }
    }
    const auto conn = space.connectivity(e);
    for (int i = 0; i < n_loc; ++i) {
      for (int j = 0; j < n_loc; ++j) {
        trip.emplace_back(conn[i], conn[j], pp(i, j));
        if (tr.multiplier) {
          trip.emplace_back(conn[i], nphi + conn[j], ps(i, j));
          trip.emplace_back(nphi + conn[i], conn[j], sp(i, j));
          trip.emplace_back(nphi + conn[i], nphi + conn[j], ss(i, j));
        }
      }
    }
  }
  return from_triplets(disc.num_unknowns(), trip);
}

Eigen::SparseMatrix<double> mass_matrix(const QuadratureGrid& grid) {
  const auto& space = grid.space();
  const int n_loc = space.local_size();
  const int npe = grid.points_per_element();
  const auto w = grid.local_weights();
  const auto tables = grid.tables();
  Eigen::MatrixXd local = Eigen::MatrixXd::Zero(n_loc, n_loc);
  for (int q = 0; q < npe; ++q) {
    const auto& tab = tables[q];
    for (int i = 0; i < n_loc; ++i) {
      for (int j = 0; j < n_loc; ++j) local(i, j) += w[q] * tab.value[i] * tab.value[j];
    }
  }
  Triplets trip;
  trip.reserve(static_cast<std::size_t>(grid.num_elements()) * n_loc * n_loc);
  for (int e = 0; e < grid.num_elements(); ++e) {
    const auto conn = space.connectivity(e);
    for (int i = 0; i < n_loc; ++i) {
      for (int j = 0; j < n_loc; ++j) trip.emplace_back(conn[i], conn[j], local(i, j));
    }
  }
  return from_triplets(space.num_functions(), trip);
}

Eigen::SparseMatrix<double> assemble_regularization(const Discretization& disc) {
  const int n = disc.num_unknowns();
  if (!disc.kind_traits().multiplier) return Eigen::SparseMatrix<double>(n, n);
  const Eigen::SparseMatrix<double> mass = mass_matrix(disc.grid());
  const int nphi = disc.num_phi();
  Triplets trip;
  trip.reserve(static_cast<std::size_t>(mass.nonZeros()));
  for (int k = 0; k < mass.outerSize(); ++k) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(mass, k); it; ++it) {
      trip.emplace_back(nphi + static_cast<int>(it.row()), nphi + static_cast<int>(it.col()),
                        disc.regularization_weight() * it.value());
    }
  }
  return from_triplets(n, trip);
}

Eigen::VectorXd assemble_rhs(const Discretization& disc, const LevelState& state,
                             std::span<const double> forcing_alpha) {
  return -weak_residual(disc, state, Eigen::VectorXd::Zero(disc.num_unknowns()), forcing_alpha);
}

AssembledSystem assemble(const Discretization& disc, const LevelState& state,
                         std::span<const double> forcing_alpha) {
  AssembledSystem sys;
  sys.matrix = assemble_matrix(disc);
  sys.regularization = assemble_regularization(disc);
  sys.rhs = assemble_rhs(disc, state, forcing_alpha);
  sys.layout.num_phi = disc.num_phi();
  sys.layout.num_sigma = disc.kind_traits().multiplier ? disc.num_phi() : 0;
  return sys;
}

struct LinearSolver::Factor {
  Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
};

LinearSolver::LinearSolver(Eigen::SparseMatrix<double> matrix,
                           const Eigen::SparseMatrix<double>& regularization, double tolerance,
                           int max_refinements)
    : matrix_(std::move(matrix)), factor_(std::make_unique<Factor>()), tolerance_(tolerance),
      max_refinements_(max_refinements) {
  if (matrix_.rows() != matrix_.cols()) throw ValidationError("system matrix must be square");
  matrix_.makeCompressed();
  Eigen::SparseMatrix<double> factored = matrix_;
  if (regularization.nonZeros() > 0) {
    if (regularization.rows() != matrix_.rows() || regularization.cols() != matrix_.cols()) {
      throw ValidationError("regularization has wrong dimensions");
    }
    factored += regularization;
  }
  factored.makeCompressed();
  factor_->lu.analyzePattern(factored);
  factor_->lu.factorize(factored);
  if (factor_->lu.info() != Eigen::Success) {
    throw SolverError("sparse LU factorization failed: " + factor_->lu.lastErrorMessage(),
                      std::numeric_limits<double>::quiet_NaN());
  }
}

LinearSolver::~LinearSolver() = default;
LinearSolver::LinearSolver(LinearSolver&&) noexcept = default;
LinearSolver& LinearSolver::operator=(LinearSolver&&) noexcept = default;

Eigen::VectorXd LinearSolver::solve(const Eigen::VectorXd& rhs) {
  if (rhs.size() != matrix_.rows()) throw ValidationError("right-hand side has wrong length");
  stats_ = {};
  const double bnorm = rhs.norm();
  if (bnorm == 0.0) return Eigen::VectorXd::Zero(rhs.size());
  Eigen::VectorXd x = factor_->lu.solve(rhs);
  for (int k = 0;; ++k) {
    const Eigen::VectorXd r = rhs - matrix_ * x;
    const double rel = r.norm() / bnorm;
    stats_.refinements = k;
    stats_.relative_residual = rel;
    if (!std::isfinite(rel)) throw SolverError("linear solve produced non-finite values", rel);
    if (rel <= tolerance_) return x;
    if (k == max_refinements_) {
      throw SolverError("iterative refinement did not reach relative residual " +
                            std::to_string(tolerance_) + " (attained " + std::to_string(rel) + ")",
                        rel);
    }
    x += factor_->lu.solve(r);
  }
}

Eigen::VectorXd solve(const AssembledSystem& system, double tolerance) {
  LinearSolver solver(system.matrix, system.regularization, tolerance);
  return solver.solve(system.rhs);
}

std::vector<double> recover_small_scales(const Discretization& disc, const LevelState& state,
                                         const Eigen::VectorXd& solution,
                                         std::span<const double> forcing_alpha) {
  const int nphi = disc.num_phi();
  if (solution.size() != disc.num_unknowns()) throw ValidationError("solution has wrong length");
  const Eigen::VectorXd sigma = disc.kind_traits().multiplier
                                    ? Eigen::VectorXd(solution.tail(nphi))
                                    : Eigen::VectorXd();
  return evaluate_alpha_fields(disc, state, solution.head(nphi), sigma, forcing_alpha).small;
}

IntegerFields evaluate_integer_fields(const Discretization& disc, const LevelState& state,
                                      std::span<const double> forcing) {
  check_state(disc, state);
  check_forcing(disc, forcing);
  const auto& grid = disc.grid();
  const auto& tr = disc.kind_traits();
  const auto& phi = state.large.phi;
  const auto& rate = state.large.rate;
  IntegerFields out;
  out.large = grid.interpolate({phi.data(), static_cast<std::size_t>(phi.size())});
  out.rate = grid.interpolate_values({rate.data(), static_cast<std::size_t>(rate.size())});
  const std::size_t n = out.rate.size();
  out.small.assign(n, 0.0);
  if (!tr.stabilized) return out;
  if (tr.mode == SmallScaleMode::Dynamic) {
    out.small = state.small.value;
    return out;
  }
  const double kappa = disc.physics().diffusivity;
  const Eigen::Vector2d a = disc.physics().velocity;
  const int npe = grid.points_per_element();
  for (int e = 0; e < grid.num_elements(); ++e) {
    const double tau = disc.tau(e).small;
    for (int q = 0; q < npe; ++q) {
      const auto i = static_cast<std::size_t>(e) * npe + q;
      const double r = out.rate[i] + a.x() * out.large.dx[i] + a.y() * out.large.dy[i] -
                       tr.residual_diffusion * kappa * out.large.laplacian[i] - forcing[i];
      out.small[i] = static_evaluate(r, tau);
    }
  }
  return out;
}

Eigen::VectorXd initial_rate_residual(const Discretization& disc, const LevelState& state,
                                      std::span<const double> forcing0) {
  check_state(disc, state);
  check_forcing(disc, forcing0);
  const auto& grid = disc.grid();
  const auto& space = grid.space();
  const auto& tr = disc.kind_traits();
  const bool stat = tr.stabilized && tr.mode == SmallScaleMode::Static;
  const double kappa = disc.physics().diffusivity;
  const Eigen::Vector2d a = disc.physics().velocity;
  const auto& phi = state.large.phi;
  const auto& rate = state.large.rate;
  const PointField field = grid.interpolate({phi.data(), static_cast<std::size_t>(phi.size())});
  const std::vector<double> rv =
      grid.interpolate_values({rate.data(), static_cast<std::size_t>(rate.size())});
  const int n_loc = space.local_size();
  const int npe = grid.points_per_element();
  const auto w = grid.local_weights();
  const auto tables = grid.tables();
  Eigen::VectorXd r = Eigen::VectorXd::Zero(disc.num_phi());
  for (int e = 0; e < grid.num_elements(); ++e) {
    const auto conn = space.connectivity(e);
    const double tau = stat ? disc.tau(e).small : 0.0;
    for (int q = 0; q < npe; ++q) {
      const auto i = static_cast<std::size_t>(e) * npe + q;
      const auto& tab = tables[q];
      const double conv = a.x() * field.dx[i] + a.y() * field.dy[i];
      const double res = rv[i] + conv - tr.residual_diffusion * kappa * field.laplacian[i] -
                         forcing0[i];
      const double small = stat ? static_evaluate(res, tau) : 0.0;
      for (int k = 0; k < n_loc; ++k) {
        const double wk = a.x() * tab.dx[k] + a.y() * tab.dy[k] +
                          tr.weight_sign * kappa * tab.laplacian[k];
        const double val = tab.value[k] * (rv[i] + conv - forcing0[i]) +
                           kappa * (tab.dx[k] * field.dx[i] + tab.dy[k] * field.dy[i]) -
                           wk * small;
        r[conn[k]] += w[q] * val;
      }
    }
  }
  return r;
}

LevelState initial_state(const Discretization& disc, const Eigen::VectorXd& phi0,
                         std::span<const double> forcing0) {
  const int n = disc.num_phi();
  if (phi0.size() != n) throw ValidationError("initial coefficients have wrong length");
  const auto& tr = disc.kind_traits();
  const auto npts = static_cast<std::size_t>(disc.grid().num_points());
  LevelState state;
  state.large.phi = phi0;
  state.large.rate = Eigen::VectorXd::Zero(n);
  state.large.time = 0.0;
  state.small = SmallScaleField(tr.stabilized ? tr.mode : SmallScaleMode::Static, npts);

  const Eigen::VectorXd rhs = -initial_rate_residual(disc, state, forcing0);
  LinearSolver solver(mass_matrix(disc.grid()));
  state.large.rate = solver.solve(rhs);

  if (tr.stabilized && tr.mode == SmallScaleMode::Dynamic) {
    const auto& grid = disc.grid();
    const PointField field = grid.interpolate({phi0.data(), static_cast<std::size_t>(n)});
    const std::vector<double> rv = grid.interpolate_values(
        {state.large.rate.data(), static_cast<std::size_t>(n)});
    const double kappa = disc.physics().diffusivity;
    const Eigen::Vector2d a = disc.physics().velocity;
    std::vector<double> r0(npts);
    for (std::size_t i = 0; i < npts; ++i) {
      r0[i] = rv[i] + a.x() * field.dx[i] + a.y() * field.dy[i] -
              tr.residual_diffusion * kappa * field.laplacian[i] - forcing0[i];
    }
    initialize_dynamic(state.small, r0);
  }
  return state;
}

}  // namespace cdlab
