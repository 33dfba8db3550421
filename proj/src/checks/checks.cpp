#include "cdlab/checks.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>

#include <Eigen/Dense>

#include "cdlab/errors.hpp"
#include "cdlab/kernels.hpp"
#include "cdlab/small_scales.hpp"
#include "cdlab/stabilization.hpp"

namespace cdlab::checks {

namespace {

std::string sci(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

struct Piece {
  double value, d1, d2;  // derivatives with respect to the local coordinate t in [0, 1]
};

/// Uniform B-spline pieces on one knot span.
Piece piece(int degree, int k, double t) {
  if (degree == 1) return k == 0 ? Piece{1.0 - t, -1.0, 0.0} : Piece{t, 1.0, 0.0};
  switch (k) {
    case 0: return {0.5 * (1.0 - t) * (1.0 - t), -(1.0 - t), 1.0};
    case 1: return {0.5 * (-2.0 * t * t + 2.0 * t + 1.0), 1.0 - 2.0 * t, -2.0};
    default: return {0.5 * t * t, t, 1.0};
  }
}

constexpr double kGauss6Points[6] = {-0.9324695142031521, -0.6612093864662645,
                                     -0.2386191860831969, 0.2386191860831969,
                                     0.6612093864662645,  0.9324695142031521};
constexpr double kGauss6Weights[6] = {0.1713244923791704, 0.3607615730481386,
                                      0.4679139345726910, 0.4679139345726910,
                                      0.3607615730481386, 0.1713244923791704};

}  // namespace

Eigen::Vector2d direct_small_scale_step(const AlphaParams& al, double tau, double value_n,
                                        double rate_n, double residual) {
  // Unknowns (phi'_{n+1}, rate'_{n+1}).
  Eigen::Matrix2d m;
  Eigen::Vector2d rhs;
  m << 1.0, -al.dt * al.gamma, al.alpha_f / tau, al.alpha_m;
  rhs << value_n + al.dt * (1.0 - al.gamma) * rate_n,
      -residual - (1.0 - al.alpha_m) * rate_n - (1.0 - al.alpha_f) * value_n / tau;
  return m.fullPivLu().solve(rhs);
}

Eigen::MatrixXd oracle_matrix(const OracleProblem& pb) {
  const int m = pb.elements;
  const int p = pb.degree;
  const int nloc1 = p + 1;
  const int nphi = m * m;
  const double h = 1.0 / m;
  const auto& al = pb.alpha;
  const double kappa = pb.diffusivity;
  const Eigen::Vector2d a = pb.velocity;

  double s = 0.0, chi = 1.0;
  bool stab = true, dyn = false, mult = false;
  switch (pb.kind) {
    case FormulationKind::Galerkin: stab = false; break;
    case FormulationKind::SupgStatic: s = 0.0; break;
    case FormulationKind::VmsStatic: s = 1.0; break;
    case FormulationKind::GlsStatic: s = -1.0; break;
    case FormulationKind::VmsDynamic: s = 1.0; dyn = true; break;
    case FormulationKind::SupgDynamicConsistent: s = 0.0; dyn = true; break;
    case FormulationKind::SupgDynamicInconsistent: s = 0.0; chi = 0.0; dyn = true; break;
    case FormulationKind::GlsDynamic: s = -1.0; dyn = true; break;
    case FormulationKind::DynamicOrthogonal: s = 1.0; dyn = true; mult = true; break;
  }

  const double g = 4.0 / (h * h);
  const double conv_inv2 = g * (a.x() * a.x() + a.y() * a.y());
  const double diff_inv2 = pb.inverse_constant * kappa * kappa * 2.0 * g * g;
  const double time_inv = al.alpha_m / (al.alpha_f * al.gamma * al.dt);
  double value_slope = 0.0, rate_slope = 0.0;  // -d/dR of phi'_alpha and rate'_alpha
  if (stab && !dyn) {
    value_slope = pb.r_switch == 2
                      ? 1.0 / std::sqrt(conv_inv2 + diff_inv2 + time_inv * time_inv)
                      : 1.0 / (std::sqrt(conv_inv2) + std::sqrt(diff_inv2) + time_inv);
  } else if (dyn) {
    const double tau = pb.r_switch == 2 ? 1.0 / std::sqrt(conv_inv2 + diff_inv2)
                                        : 1.0 / (std::sqrt(conv_inv2) + std::sqrt(diff_inv2));
    const Eigen::Vector2d next = direct_small_scale_step(al, tau, 0.0, 0.0, 1.0);
    value_slope = -al.alpha_f * next[0];
    rate_slope = -al.alpha_m * next[1];
  }
  const double cm = al.alpha_m / (al.gamma * al.dt);
  const double af = al.alpha_f;

  const int n = mult ? 2 * nphi : nphi;
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
  const int nloc = nloc1 * nloc1;
  std::vector<int> idx(nloc);
  std::vector<double> N(nloc), Nx(nloc), Ny(nloc), L(nloc);
  for (int ey = 0; ey < m; ++ey) {
    for (int ex = 0; ex < m; ++ex) {
      for (int ky = 0; ky < nloc1; ++ky) {
        for (int kx = 0; kx < nloc1; ++kx) {
          const int ix = ((ex - p + kx) % m + m) % m;
          const int iy = ((ey - p + ky) % m + m) % m;
          idx[ky * nloc1 + kx] = iy * m + ix;
        }
      }
      for (int qy = 0; qy < 6; ++qy) {
        for (int qx = 0; qx < 6; ++qx) {
          const double tx = 0.5 * (1.0 + kGauss6Points[qx]);
          const double ty = 0.5 * (1.0 + kGauss6Points[qy]);
          const double w = 0.25 * kGauss6Weights[qx] * kGauss6Weights[qy] * h * h;
          for (int ky = 0; ky < nloc1; ++ky) {
            for (int kx = 0; kx < nloc1; ++kx) {
              const Piece bx = piece(p, kx, tx);
              const Piece by = piece(p, ky, ty);
              const int k = ky * nloc1 + kx;
              N[k] = bx.value * by.value;
              Nx[k] = bx.d1 / h * by.value;
              Ny[k] = bx.value * by.d1 / h;
              L[k] = bx.d2 / (h * h) * by.value + bx.value * by.d2 / (h * h);
            }
          }
          for (int i = 0; i < nloc; ++i) {
            const double conv_i = a.x() * Nx[i] + a.y() * Ny[i];
            const double weight_i = conv_i + s * kappa * L[i];
            for (int j = 0; j < nloc; ++j) {
              const double conv_j = a.x() * Nx[j] + a.y() * Ny[j];
              const double res_j = cm * N[j] + af * (conv_j - chi * kappa * L[j]);
              double v = cm * N[i] * N[j] + af * (N[i] * conv_j + kappa * (Nx[i] * Nx[j] + Ny[i] * Ny[j]));
              if (stab) v += (value_slope * weight_i - rate_slope * N[i]) * res_j;
              A(idx[i], idx[j]) += w * v;
              if (mult) {
                A(idx[i], nphi + idx[j]) +=
                    w * (value_slope * weight_i - rate_slope * N[i]) * (-kappa * L[j]);
                A(nphi + idx[i], idx[j]) += w * kappa * L[i] * (-value_slope) * res_j;
                A(nphi + idx[i], nphi + idx[j]) += w * kappa * L[i] * value_slope * kappa * L[j];
              }
            }
          }
        }
      }
    }
  }
  return A;
}

const AcceptanceSuite::RunInfo& AcceptanceSuite::model_run(FormulationKind kind, int mesh,
                                                           double alpha_f, double diffusivity) {
  const Key key{kind, mesh, alpha_f, diffusivity};
  auto it = runs_.find(key);
  if (it != runs_.end()) return it->second;
  RunConfig cfg = preset_config("paper-" + std::to_string(mesh));
  cfg.formulation = kind;
  cfg.diffusivity = diffusivity;
  if (alpha_f != 0.5) {
    cfg.alpha.preset = "energy-decaying";
    cfg.alpha.alpha_f = alpha_f;
  }
  RunInfo info;
  double scale = 0.0;
  info.result = run(cfg, [&scale](const Discretization& d, const StepRecord& rec, const LedgerRow&) {
    const auto& grid = d.grid();
    const double kappa = d.physics().diffusivity;
    const auto& lap = rec.alpha.large.laplacian;
    const double lap_norm = std::sqrt(kernels::weighted_dot(grid.weights(), lap, lap));
    const double small_norm =
        std::sqrt(kernels::weighted_dot(grid.weights(), rec.alpha.small, rec.alpha.small));
    scale = std::max(scale, kappa * lap_norm * small_norm);
  });
  info.orthogonality_scale = scale;
  return runs_.emplace(key, std::move(info)).first->second;
}

CheckResult AcceptanceSuite::energy_identity() {
  CheckResult r{1, "discrete energy identity (GLSD, DO; 32x32; CN)", true, ""};
  for (auto kind : {FormulationKind::GlsDynamic, FormulationKind::DynamicOrthogonal}) {
    const auto& res = model_run(kind, 32).result;
    const double e0 = res.initial.energy_total;
    double worst = 0.0;
    for (const auto& row : res.rows) worst = std::max(worst, std::abs(row.balance_residual));
    const bool ok = worst <= 1e-10 * e0;
    r.passed = r.passed && ok;
    r.detail += std::string(short_name(kind)) + ": max|r|/E0=" + sci(worst / e0) + " ";
  }
  r.detail += "(tol 1e-10)";
  return r;
}

CheckResult AcceptanceSuite::monotone_decay() {
  CheckResult r{2, "monotone energy decay; alpha_f=0.75 dissipates more", true, ""};
  for (auto kind : {FormulationKind::GlsDynamic, FormulationKind::DynamicOrthogonal}) {
    double dissipated[2] = {0.0, 0.0};
    int slot = 0;
    for (double af : {0.5, 0.75}) {
      const auto& res = model_run(kind, 32, af).result;
      const double e0 = res.initial.energy_total;
      double prev = e0, worst = -1e300;
      for (const auto& row : res.rows) {
        worst = std::max(worst, row.energy_total - prev);
        prev = row.energy_total;
      }
      const bool ok = worst <= 1e-12 * e0;
      r.passed = r.passed && ok;
      dissipated[slot++] = e0 - res.rows.back().energy_total;
      r.detail += std::string(short_name(kind)) + "(af=" + (af == 0.5 ? "0.5" : "0.75") +
                  "): max increase/E0=" + sci(worst / e0) + " ";
    }
    const bool more = dissipated[1] > dissipated[0];
    r.passed = r.passed && more;
    r.detail += "cumulative " + sci(dissipated[0]) + " < " + sci(dissipated[1]) + "; ";
  }
  return r;
}

CheckResult AcceptanceSuite::multiplier_orthogonality() {
  CheckResult r{3, "DO orthogonality and multiplier constraint (32x32)", true, ""};
  const auto& info = model_run(FormulationKind::DynamicOrthogonal, 32);
  double worst = 0.0;
  for (const auto& row : info.result.rows) worst = std::max(worst, std::abs(row.orthogonality));
  // orthogonality_scale already carries kappa.
  const double ratio = info.orthogonality_scale > 0.0 ? worst / info.orthogonality_scale : 0.0;
  const double constraint = info.result.max_multiplier_residual;
  r.passed = ratio <= 1e-10 && constraint <= 1e-10;
  r.detail = "max|(k lap phi, phi')|/(k max|lap phi||phi'|)=" + sci(ratio) +
             ", max_i|(k lap N_i, phi')|/(k|phi'|)=" + sci(constraint) + " (tol 1e-10)";
  return r;
}

CheckResult AcceptanceSuite::supg_static_pathology() {
  CheckResult r{4, "SUPGS negative dissipation globally and locally", false, ""};
  const auto& res = model_run(FormulationKind::SupgStatic, 32).result;
  double min_global = 1e300;
  for (const auto& row : res.rows) min_global = std::min(min_global, row.contribution_total);
  const Snapshot* last = nullptr;
  for (const auto& s : res.snapshots) {
    if (std::abs(s.time - 1.0) < 1e-12) last = &s;
  }
  if (!last) {
    r.detail = "no snapshot at t=1.0";
    return r;
  }
  const auto [tmin, tmax] =
      std::minmax_element(last->dissipation_total.begin(), last->dissipation_total.end());
  const double lmin = *std::min_element(last->dissipation_large.begin(), last->dissipation_large.end());
  const bool a = min_global < 0.0;
  const bool b = *tmin < 0.0 && *tmax > 0.0;
  const bool c = lmin < 0.0;
  r.passed = a && b && c;
  r.detail = std::string("(a) min global=") + sci(min_global) + (a ? " ok" : " FAIL") +
             "; (b) local total range [" + sci(*tmin) + ", " + sci(*tmax) + "]" + (b ? " ok" : " FAIL") +
             "; (c) local large min=" + sci(lmin) + (c ? " ok" : " FAIL");
  return r;
}

CheckResult AcceptanceSuite::local_positivity() {
  CheckResult r{5, "GLSD/DO local small-scale dissipation nonnegative", true, ""};
  for (auto kind : {FormulationKind::GlsDynamic, FormulationKind::DynamicOrthogonal}) {
    const auto& res = model_run(kind, 32).result;
    const bool ok = res.min_local_total >= -1e-12;
    r.passed = r.passed && ok;
    r.detail += std::string(short_name(kind)) + ": min=" + sci(res.min_local_total) + " ";
  }
  r.detail += "(tol -1e-12)";
  return r;
}

CheckResult AcceptanceSuite::mass_conservation() {
  CheckResult r{6, "mass conservation, all formulations (32x32)", true, ""};
  double worst_all = 0.0;
  for (auto kind : kAllFormulations) {
    const auto& res = model_run(kind, 32).result;
    const double m0 = res.initial.mass;
    double worst = 0.0;
    for (const auto& row : res.rows) worst = std::max(worst, std::abs(row.mass - m0));
    const double rel = worst / std::abs(m0);
    worst_all = std::max(worst_all, rel);
    if (rel > 1e-10) {
      r.passed = false;
      r.detail += std::string(short_name(kind)) + " drift " + sci(rel) + "; ";
    }
  }
  r.detail += "max relative drift " + sci(worst_all) + " (tol 1e-10)";
  return r;
}

CheckResult AcceptanceSuite::galerkin_energy_conservation() {
  CheckResult r{7, "Galerkin energy conservation (kappa=0, CN, 32x32)", false, ""};
  const auto& res = model_run(FormulationKind::Galerkin, 32, 0.5, 0.0).result;
  const double e0 = res.initial.energy_total;
  const double rel = std::abs(res.rows.back().energy_total - e0) / e0;
  r.passed = rel <= 1e-10;
  r.detail = "|E_N - E_0|/E_0=" + sci(rel) + " (tol 1e-10)";
  return r;
}

CheckResult AcceptanceSuite::linear_coincidence() {
  CheckResult r{8, "p=1: static SUPG/VMS/GLS coincide (8x8)", true, ""};
  const FormulationKind kinds[3] = {FormulationKind::SupgStatic, FormulationKind::VmsStatic,
                                    FormulationKind::GlsStatic};
  RunConfig cfg = preset_config("paper-32");
  cfg.mesh_x = cfg.mesh_y = 8;
  cfg.degree = 1;
  const ResolvedRun resolved = resolve(cfg);
  const SplineSpace2D space = make_space(cfg);
  std::vector<Eigen::SparseMatrix<double>> mats;
  for (auto kind : kinds) {
    Discretization d(QuadratureGrid(space), kind, make_physics(cfg, resolved), resolved.alpha);
    mats.push_back(assemble_matrix(d));
  }
  double mat_diff = 0.0;
  for (int k = 1; k < 3; ++k) {
    const Eigen::MatrixXd diff = Eigen::MatrixXd(mats[k]) - Eigen::MatrixXd(mats[0]);
    mat_diff = std::max(mat_diff, diff.cwiseAbs().maxCoeff());
  }
  std::vector<RunResult> results;
  for (auto kind : kinds) {
    cfg.formulation = kind;
    results.push_back(run(cfg));
  }
  double ledger_diff = 0.0;
  for (int k = 1; k < 3; ++k) {
    for (std::size_t n = 0; n < results[0].rows.size(); ++n) {
      const auto a = ledger_values(results[0].rows[n]);
      const auto b = ledger_values(results[k].rows[n]);
      for (std::size_t c = 0; c < a.size(); ++c) {
        ledger_diff = std::max(ledger_diff, std::abs(a[c] - b[c]) / std::max(1.0, std::abs(a[c])));
      }
    }
  }
  r.passed = mat_diff <= 1e-14 && ledger_diff <= 1e-14;
  r.detail = "max matrix difference " + sci(mat_diff) + ", max ledger difference " +
             sci(ledger_diff) + " (tol 1e-14)";
  return r;
}

CheckResult AcceptanceSuite::oracle_assembly() {
  CheckResult r{9, "assembly matches brute-force oracle (4x4, p=2, all kinds)", true, ""};
  double worst = 0.0, biggest = 0.0;
  const AlphaParams alphas[2] = {make_alpha(AlphaPreset::CrankNicolson, 0.125),
                                 make_alpha(0.75, 0.6, 0.55, 0.1)};
  for (const auto& al : alphas) {
    for (auto kind : kAllFormulations) {
      OracleProblem pb;
      pb.kind = kind;
      pb.alpha = al;
      PhysicsParams phys;
      phys.velocity = pb.velocity;
      phys.diffusivity = pb.diffusivity;
      phys.inverse_constant = pb.inverse_constant;
      const Discretization d(QuadratureGrid(SplineSpace2D(2, 4, 4)), kind, phys, al);
      const Eigen::MatrixXd lib(assemble_matrix(d));
      const Eigen::MatrixXd ref = oracle_matrix(pb);
      const double diff = (lib - ref).cwiseAbs().maxCoeff();
      biggest = std::max(biggest, ref.cwiseAbs().maxCoeff());
      worst = std::max(worst, diff);
      if (diff > 1e-12) {
        r.passed = false;
        r.detail += std::string(short_name(kind)) + " diff " + sci(diff) + "; ";
      }
    }
  }
  r.detail += "max |A - A_oracle|=" + sci(worst) + " (largest entry " + sci(biggest) + ", tol 1e-12)";
  return r;
}

CheckResult AcceptanceSuite::small_scale_integrator() {
  CheckResult r{10, "small-scale condensation vs direct solve; steady state", true, ""};
  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> half(0.5, 1.0), unit(-1.0, 1.0), logu(-3.0, 0.0);
  double worst = 0.0;
  constexpr int kDraws = 100;
  for (int k = 0; k < kDraws; ++k) {
    const AlphaParams al = make_alpha(half(rng), half(rng), half(rng), std::pow(10.0, logu(rng)));
    const double tau = std::pow(10.0, logu(rng));
    const double v = unit(rng), rt = unit(rng), res = unit(rng);
    const CondensationMap map = condensation_coefficients(al, tau);
    const Eigen::Vector2d next = direct_small_scale_step(al, tau, v, rt, res);
    const double ref_value = (1.0 - al.alpha_f) * v + al.alpha_f * next[0];
    const double ref_rate = (1.0 - al.alpha_m) * rt + al.alpha_m * next[1];

    SmallScaleField field(SmallScaleMode::Dynamic, 1);
    field.value[0] = v;
    field.rate[0] = rt;
    std::vector<double> resid{res}, va(1), ra(1);
    condense(map, field, resid, va, ra);
    commit_step(field, map, resid);

    // Error relative to the magnitude of the contributing terms.
    const double scale_v = std::max({std::abs(ref_value), std::abs(v), al.dt * std::abs(rt), tau * std::abs(res)});
    const double scale_r = std::max({std::abs(ref_rate), std::abs(rt), std::abs(v) / tau, std::abs(res)});
    const double scale_n = std::max({std::abs(next[0]), std::abs(v), al.dt * std::abs(rt), tau * std::abs(res)});
    const double scale_nr = std::max({std::abs(next[1]), std::abs(rt), std::abs(v) / tau, std::abs(res)});
    worst = std::max({worst, std::abs(va[0] - ref_value) / scale_v, std::abs(ra[0] - ref_rate) / scale_r,
                      std::abs(field.value[0] - next[0]) / scale_n,
                      std::abs(field.rate[0] - next[1]) / scale_nr});
  }
  const bool maps_ok = worst <= 1e-13;

  const AlphaParams al = make_alpha(AlphaPreset::CrankNicolson, 0.01);
  const double tau = 0.05, res = 1.0;
  const CondensationMap map = condensation_coefficients(al, tau);
  SmallScaleField field(SmallScaleMode::Dynamic, 1);
  const std::vector<double> resid{res};
  for (int n = 0; n < 10000; ++n) commit_step(field, map, resid);
  const double steady_err = std::abs(field.value[0] + tau * res);
  const bool steady_ok = steady_err <= 1e-10;
  r.passed = maps_ok && steady_ok;
  r.detail = "max relative map error " + sci(worst) + " over " + std::to_string(kDraws) +
             " draws (tol 1e-13); |phi' + tau R| after 1e4 steps " + sci(steady_err) + " (tol 1e-10)";
  return r;
}

CheckResult AcceptanceSuite::tau_algebra() {
  CheckResult r{11, "tau algebra: r=1 effective identity; CN time scale", true, ""};
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> unit(-1.0, 1.0), logu(-4.0, 0.0), half(0.5, 1.0);
  double worst = 0.0;
  for (int k = 0; k < 1000; ++k) {
    StabilizationParams sp;
    sp.velocity = {unit(rng), unit(rng)};
    sp.diffusivity = std::pow(10.0, logu(rng));
    sp.alpha = make_alpha(half(rng), half(rng), half(rng), std::pow(10.0, logu(rng)));
    sp.r_switch = 1;
    const double h = std::pow(10.0, logu(rng) / 2.0);
    Eigen::Matrix2d g = Eigen::Matrix2d::Zero();
    g(0, 0) = g(1, 1) = 4.0 / (h * h);
    const double eff = 1.0 / (1.0 / tau_time(sp.alpha) + 1.0 / tau_dyn(sp, g));
    const double stat = tau_static(sp, g);
    worst = std::max(worst, std::abs(eff - stat) / stat);
  }
  double worst_cn = 0.0;
  for (double dt : {0.1, 0.015625, 1e-3, 0.37}) {
    StabilizationParams sp;
    sp.alpha = make_alpha(AlphaPreset::CrankNicolson, dt);
    const auto c = tau_components(sp, Eigen::Matrix2d::Identity());
    const double ref = 4.0 / (dt * dt);
    worst_cn = std::max(worst_cn, std::abs(c.time_inv2 - ref) / ref);
  }
  r.passed = worst <= 1e-14 && worst_cn <= 1e-14;
  r.detail = "r=1 identity max relative error " + sci(worst) + " over 1000 draws; CN time_inv2 vs 4/dt^2 " +
             sci(worst_cn) + " (tol 1e-14)";
  return r;
}

CheckResult AcceptanceSuite::mesh_convergence() {
  CheckResult r{12, "mesh-family energy curves approach each other (16/32/64)", true, ""};
  auto curve = [](const RunResult& res) {
    std::vector<double> e{res.initial.energy_total};
    for (const auto& row : res.rows) e.push_back(row.energy_total);
    return e;
  };
  auto sup_distance = [](const std::vector<double>& coarse, const std::vector<double>& fine) {
    const std::size_t ratio = (fine.size() - 1) / (coarse.size() - 1);
    double d = 0.0;
    for (std::size_t k = 0; k < coarse.size(); ++k) d = std::max(d, std::abs(coarse[k] - fine[k * ratio]));
    return d;
  };
  for (auto kind : {FormulationKind::SupgStatic, FormulationKind::GlsDynamic,
                    FormulationKind::DynamicOrthogonal}) {
    const auto c16 = curve(model_run(kind, 16).result);
    const auto c32 = curve(model_run(kind, 32).result);
    const auto c64 = curve(model_run(kind, 64).result);
    const double d1 = sup_distance(c16, c32);
    const double d2 = sup_distance(c32, c64);
    const bool ok = d2 < d1;
    r.passed = r.passed && ok;
    r.detail += std::string(short_name(kind)) + ": d(16,32)=" + sci(d1) + " d(32,64)=" + sci(d2) +
                (ok ? "; " : " FAIL; ");
  }
  return r;
}

CheckResult AcceptanceSuite::initial_condition_exactness() {
  CheckResult r{13, "block initial condition exactly representable (16/32/64)", true, ""};
  const BlockIC ic;
  const ScalarField2D f = [&ic](double x, double y) { return block_ic_value(ic, x, y); };
  for (int m : {16, 32, 64}) {
    const SplineSpace2D space(2, m, m);
    const Eigen::VectorXd c = project_l2(space, f);
    const double res = l2_distance(space, {c.data(), static_cast<std::size_t>(c.size())}, f);
    const bool ok = res <= 1e-12;
    r.passed = r.passed && ok;
    r.detail += std::to_string(m) + ": " + sci(res) + " ";
  }
  r.detail += "(tol 1e-12)";
  return r;
}

std::vector<CheckResult> AcceptanceSuite::run_all() {
  using Fn = CheckResult (AcceptanceSuite::*)();
  const Fn fns[] = {&AcceptanceSuite::energy_identity,
                    &AcceptanceSuite::monotone_decay,
                    &AcceptanceSuite::multiplier_orthogonality,
                    &AcceptanceSuite::supg_static_pathology,
                    &AcceptanceSuite::local_positivity,
                    &AcceptanceSuite::mass_conservation,
                    &AcceptanceSuite::galerkin_energy_conservation,
                    &AcceptanceSuite::linear_coincidence,
                    &AcceptanceSuite::oracle_assembly,
                    &AcceptanceSuite::small_scale_integrator,
                    &AcceptanceSuite::tau_algebra,
                    &AcceptanceSuite::mesh_convergence,
                    &AcceptanceSuite::initial_condition_exactness};
  std::vector<CheckResult> out;
  int id = 1;
  for (auto fn : fns) {
    try {
      out.push_back((this->*fn)());
    } catch (const std::exception& err) {
      out.push_back({id, "check " + std::to_string(id), false, std::string("exception: ") + err.what()});
    }
    ++id;
  }
  return out;
}

}  // namespace cdlab::checks
