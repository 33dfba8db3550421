#include "cdlab/simulation.hpp"

#include <algorithm>
#include <string>

#include "cdlab/errors.hpp"

namespace cdlab {

void commit_small_scales(const Discretization& disc, SmallScaleField& field,
                         std::span<const double> small_forcing) {
  const auto& grid = disc.grid();
  const int npe = grid.points_per_element();
  const int ne = grid.num_elements();
  int start = 0;
  // Runs of elements sharing one map go through a single kernel call.
  while (start < ne) {
    const auto& map = disc.tau(start).map;
    int end = start + 1;
    while (end < ne) {
      const auto& other = disc.tau(end).map;
      if (other.next_from_value != map.next_from_value ||
          other.next_from_rate != map.next_from_rate || other.next_slope != map.next_slope) {
        break;
      }
      ++end;
    }
    const auto lo = static_cast<std::size_t>(start) * npe;
    const auto len = static_cast<std::size_t>(end - start) * npe;
    SmallScaleField part(field.mode, 0);
    if (start == 0 && end == ne) {
      commit_step(field, map, small_forcing);
    } else {
      part.value.assign(field.value.begin() + lo, field.value.begin() + lo + len);
      part.rate.assign(field.rate.begin() + lo, field.rate.begin() + lo + len);
      commit_step(part, map, small_forcing.subspan(lo, len));
      std::copy(part.value.begin(), part.value.end(), field.value.begin() + lo);
      std::copy(part.rate.begin(), part.rate.end(), field.rate.begin() + lo);
    }
    start = end;
  }
}

Simulation::Simulation(Discretization disc, const Eigen::VectorXd& phi0, Forcing forcing)
    : disc_(std::move(disc)),
      forcing_(std::move(forcing)),
      solver_(assemble_matrix(disc_), assemble_regularization(disc_)) {
  const auto f0 = sample_forcing(disc_.grid(), forcing_, 0.0);
  state_ = initial_state(disc_, phi0, f0);
  fields_ = evaluate_integer_fields(disc_, state_, f0);
}

StepRecord Simulation::step() {
  const auto& alpha = disc_.alpha();
  const int nphi = disc_.num_phi();
  const double t_n = state_.large.time;
  const double t_next = (step_ + 1) * alpha.dt;
  const auto f_alpha = sample_forcing(disc_.grid(), forcing_, t_n + alpha.alpha_f * alpha.dt);

  const Eigen::VectorXd rhs = assemble_rhs(disc_, state_, f_alpha);
  Eigen::VectorXd x;
  try {
    x = solver_.solve(rhs);
  } catch (const SolverError& err) {
    throw SolverError("step " + std::to_string(step_ + 1) + ": " + err.what(), err.residual());
  }

  StepRecord rec;
  rec.step = step_ + 1;
  rec.time_prev = t_n;
  rec.time = t_next;
  rec.solve = solver_.last_stats();
  const Eigen::VectorXd u = x.head(nphi);
  if (disc_.kind_traits().multiplier) rec.sigma = x.tail(nphi);
  rec.alpha = evaluate_alpha_fields(disc_, state_, u, rec.sigma, f_alpha);

  LevelState next;
  next.large.rate = rate_at_next(alpha, state_.large, u);
  next.large.phi = u;
  next.large.time = t_next;
  next.small = state_.small;
  if (is_dynamic(disc_.kind())) {
    std::vector<double> drive(rec.alpha.residual.size());
    for (std::size_t i = 0; i < drive.size(); ++i) {
      drive[i] = rec.alpha.residual[i] - rec.alpha.lap_sigma[i];
    }
    commit_small_scales(disc_, next.small, drive);
  }

  rec.prev = std::move(fields_);
  fields_ = evaluate_integer_fields(disc_, next, sample_forcing(disc_.grid(), forcing_, t_next));
  rec.next = fields_;
  state_ = std::move(next);
  ++step_;
  return rec;
}

}  // namespace cdlab
