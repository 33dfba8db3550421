#pragma once

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "cdlab/mesh_quadrature.hpp"
#include "cdlab/small_scales.hpp"
#include "cdlab/stabilization.hpp"
#include "cdlab/time_integration.hpp"

namespace cdlab {

enum class FormulationKind {
  Galerkin,
  SupgStatic,
  VmsStatic,
  GlsStatic,
  VmsDynamic,
  SupgDynamicConsistent,
  SupgDynamicInconsistent,
  GlsDynamic,
  DynamicOrthogonal,
};

inline constexpr FormulationKind kAllFormulations[] = {
    FormulationKind::Galerkin,          FormulationKind::SupgStatic,
    FormulationKind::VmsStatic,         FormulationKind::GlsStatic,
    FormulationKind::VmsDynamic,        FormulationKind::SupgDynamicConsistent,
    FormulationKind::SupgDynamicInconsistent, FormulationKind::GlsDynamic,
    FormulationKind::DynamicOrthogonal,
};

struct FormulationTraits {
  bool stabilized = false;
  SmallScaleMode mode = SmallScaleMode::Static;
  /// Sign of the kappa * lap(w) part of the weighting operator: +1 VMS, 0 SUPG, -1 GLS.
  double weight_sign = 0.0;
  /// Factor on kappa * lap(phi^h) inside the small-scale residual (0 drops it).
  double residual_diffusion = 1.0;
  bool multiplier = false;
};

FormulationTraits traits(FormulationKind kind) noexcept;
bool is_dynamic(FormulationKind kind) noexcept;
bool is_static(FormulationKind kind) noexcept;

/// Short name used on the command line and in output: galerkin, supgs, vmss, glss,
/// vmsd, supgd, supgd-inconsistent, glsd, do.
std::string_view short_name(FormulationKind kind) noexcept;
/// Inverse of short_name; throws ValidationError listing the accepted names.
FormulationKind parse_formulation(std::string_view name);

/// f(x, y, t). An empty function is f = 0.
using Forcing = std::function<double(double, double, double)>;

struct PhysicsParams {
  Eigen::Vector2d velocity{1.0, 1.0};
  double diffusivity = 5e-4;
  double inverse_constant = 36.0;
  int r_switch = 2;
  /// Tikhonov weight on the multiplier block, relative to kappa^2 G:G.
  double multiplier_regularization = 1e-10;
};

/// Stabilization data of one element.
struct ElementTau {
  double small = 0.0;  // tau_stat (static) or tau_dyn (dynamic): scales the small-scale dissipation
  double eff = 0.0;    // -d phi'_{n+alpha_f} / d R
  double time = 0.0;   // tau_time
  CondensationMap map; // dynamic kinds only
};

/// Everything that stays fixed during a run: space, quadrature, formulation, physics, alpha.
class Discretization {
 public:
  Discretization(QuadratureGrid grid, FormulationKind kind, PhysicsParams physics,
                 AlphaParams alpha);

  const QuadratureGrid& grid() const noexcept { return grid_; }
  const SplineSpace2D& space() const noexcept { return grid_.space(); }
  FormulationKind kind() const noexcept { return kind_; }
  const FormulationTraits& kind_traits() const noexcept { return traits_; }
  const PhysicsParams& physics() const noexcept { return physics_; }
  const AlphaParams& alpha() const noexcept { return alpha_; }
  const ElementTau& tau(int element) const { return taus_.at(element); }

  int num_phi() const noexcept { return space().num_functions(); }
  int num_unknowns() const noexcept { return traits_.multiplier ? 2 * num_phi() : num_phi(); }
  /// Regularization weight actually used: multiplier_regularization * kappa^2 G:G.
  double regularization_weight() const noexcept { return regularization_; }

 private:
  QuadratureGrid grid_;
  FormulationKind kind_;
  FormulationTraits traits_;
  PhysicsParams physics_;
  AlphaParams alpha_;
  std::vector<ElementTau> taus_;
  double regularization_ = 0.0;
};

/// Large-scale state at level n together with the small-scale history.
struct LevelState {
  StepState large;
  SmallScaleField small;
};

/// Quadrature-point fields at n+alpha_f (values) and n+alpha_m (rates).
struct AlphaFields {
  PointField large;              // phi^h_{n+alpha_f}
  std::vector<double> rate;      // d/dt phi^h at n+alpha_m
  std::vector<double> residual;  // large-scale residual (diffusion factor per kind)
  std::vector<double> lap_sigma; // kappa * lap(sigma^h); zero unless DO
  std::vector<double> small;     // phi'_{n+alpha_f}
  std::vector<double> small_rate;// d/dt phi' at n+alpha_m (zero for static kinds)
  std::vector<double> forcing;   // f at t_n + alpha_f dt
};

/// f sampled at the quadrature points at time t.
std::vector<double> sample_forcing(const QuadratureGrid& grid, const Forcing& f, double t);

/// Fields at the alpha levels for a candidate phi_{n+1} (and sigma for DO).
AlphaFields evaluate_alpha_fields(const Discretization& disc, const LevelState& state,
                                  const Eigen::VectorXd& phi_next, const Eigen::VectorXd& sigma,
                                  std::span<const double> forcing_alpha);

/// Weak-form residual for the stacked unknown x = [phi_{n+1}; sigma].
Eigen::VectorXd weak_residual(const Discretization& disc, const LevelState& state,
                              const Eigen::VectorXd& x, std::span<const double> forcing_alpha);

struct SystemLayout {
  int num_phi = 0;
  int num_sigma = 0;
  int size() const noexcept { return num_phi + num_sigma; }
};

/// A x = b for x = [phi_{n+1}; sigma]. Blocks for DO: [[A_pp, A_ps], [A_sp, A_ss]].
/// `regularization` holds the Tikhonov eps M on the sigma block (empty otherwise);
/// it enters the factorization only.
struct AssembledSystem {
  Eigen::SparseMatrix<double> matrix;
  Eigen::SparseMatrix<double> regularization;
  Eigen::VectorXd rhs;
  SystemLayout layout;
};

/// Step matrix; independent of the state and constant over a run.
Eigen::SparseMatrix<double> assemble_matrix(const Discretization& disc);
/// eps (sigma, eta) on the multiplier block; empty for kinds without a multiplier.
Eigen::SparseMatrix<double> assemble_regularization(const Discretization& disc);
/// b = -weak_residual(x = 0).
Eigen::VectorXd assemble_rhs(const Discretization& disc, const LevelState& state,
                             std::span<const double> forcing_alpha);
AssembledSystem assemble(const Discretization& disc, const LevelState& state,
                         std::span<const double> forcing_alpha);

/// Consistent mass matrix (phi block only).
Eigen::SparseMatrix<double> mass_matrix(const QuadratureGrid& grid);

/// Sparse LU of (matrix + regularization) with iterative refinement against `matrix`
/// until ||A x - b|| <= tolerance ||b||.
class LinearSolver {
 public:
  struct Stats {
    int refinements = 0;
    double relative_residual = 0.0;
  };

  LinearSolver(Eigen::SparseMatrix<double> matrix,
               const Eigen::SparseMatrix<double>& regularization = {},
               double tolerance = 1e-12, int max_refinements = 30);
  ~LinearSolver();
  LinearSolver(LinearSolver&&) noexcept;
  LinearSolver& operator=(LinearSolver&&) noexcept;

  /// Throws SolverError with the attained residual on failure.
  Eigen::VectorXd solve(const Eigen::VectorXd& rhs);
  const Stats& last_stats() const noexcept { return stats_; }
  const Eigen::SparseMatrix<double>& matrix() const noexcept { return matrix_; }

 private:
  struct Factor;
  Eigen::SparseMatrix<double> matrix_;
  std::unique_ptr<Factor> factor_;
  double tolerance_;
  int max_refinements_;
  Stats stats_;
};

/// One-shot convenience: factor and solve.
Eigen::VectorXd solve(const AssembledSystem& system, double tolerance = 1e-12);

/// Small scales at n+alpha_f consistent with a solved step.
std::vector<double> recover_small_scales(const Discretization& disc, const LevelState& state,
                                         const Eigen::VectorXd& solution,
                                         std::span<const double> forcing_alpha);

/// Small scales and large-scale residual at an integer level (static kinds evaluate
/// -tau R; dynamic kinds return the stored history).
struct IntegerFields {
  PointField large;
  std::vector<double> rate;
  std::vector<double> small;
};
IntegerFields evaluate_integer_fields(const Discretization& disc, const LevelState& state,
                                      std::span<const double> forcing);

/// Initial data. The rate solves M rate_0 = -(convection + diffusion + stabilization at t = 0),
/// with the stabilization terms evaluated from the steady part of the residual. Dynamic
/// small scales start from phi' = 0, rate' = -R_0.
LevelState initial_state(const Discretization& disc, const Eigen::VectorXd& phi0,
                         std::span<const double> forcing0);

/// Residual of the weak form at t = 0 for the given initial state (rate equation).
/// Zero at the computed initial rate for Galerkin and dynamic kinds.
Eigen::VectorXd initial_rate_residual(const Discretization& disc, const LevelState& state,
                                      std::span<const double> forcing0);

}  // namespace cdlab
