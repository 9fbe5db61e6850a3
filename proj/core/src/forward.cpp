#include "imscat/forward.hpp"

#include <cmath>
#include <string>

#include "imscat/krylov.hpp"
#include "imscat/parallel.hpp"

namespace imscat {

CVector incident_plane_wave(const Vec2& direction, double k, const std::vector<Vec2>& points) {
  if (std::abs(direction.norm() - 1.0) > 1e-12) {
    throw std::invalid_argument("incident_plane_wave: direction must be a unit vector");
  }
  CVector out(static_cast<Eigen::Index>(points.size()));
  for (std::size_t p = 0; p < points.size(); ++p) {
    out[static_cast<Eigen::Index>(p)] = std::exp(kI * (k * points[p].dot(direction)));
  }
  return out;
}

ForwardModel::ForwardModel(CellGrid coarse, FineGrid fine, double k, SolverOptions options)
    : coarse_(std::move(coarse)), k_(k), options_(options) {
  if (fine.half_width() != coarse_.half_width() || fine.divisions() != coarse_.divisions()) {
    throw DimensionMismatch("ForwardModel: fine grid was built for a different cell grid");
  }
  if (!(options_.tol > 0.0) || options_.max_iter < 1 || options_.restart < 1) {
    throw std::invalid_argument("ForwardModel: invalid solver options");
  }
  kernel_ = std::make_shared<const KernelOperator>(fine, k);
}

CVector ForwardModel::inject(const CVector& cell_values) const {
  if (static_cast<std::size_t>(cell_values.size()) != coarse_.size()) {
    throw DimensionMismatch("inject: cell vector length does not match the grid");
  }
  const FineGrid& f = fine();
  CVector out(static_cast<Eigen::Index>(f.support_size()));
  for (std::size_t s = 0; s < f.support_size(); ++s) {
    out[static_cast<Eigen::Index>(s)] = cell_values[static_cast<Eigen::Index>(f.cell_of(s))];
  }
  return out;
}

CVector ForwardModel::restrict_sum(const CVector& node_values) const {
  const FineGrid& f = fine();
  if (static_cast<std::size_t>(node_values.size()) != f.support_size()) {
    throw DimensionMismatch("restrict_sum: node vector length does not match the support");
  }
  CVector out = CVector::Zero(static_cast<Eigen::Index>(coarse_.size()));
  for (std::size_t s = 0; s < f.support_size(); ++s) {
    out[static_cast<Eigen::Index>(f.cell_of(s))] += node_values[static_cast<Eigen::Index>(s)];
  }
  return out;
}

void ForwardModel::apply_lippmann_schwinger(const CVector& node_q, const CVector& v, CVector& out) const {
  CVector qv = node_q.cwiseProduct(v);
  kernel_->apply(qv, out);
  out = v - (k_ * k_) * out;
}

TotalField ForwardModel::solve_nodes(const CVector& node_q, const Vec2& direction) const {
  const FineGrid& f = fine();
  if (static_cast<std::size_t>(node_q.size()) != f.support_size()) {
    throw DimensionMismatch("solve: contrast vector length does not match the support");
  }
  const CVector rhs = incident_plane_wave(direction, k_, f.nodes());
  auto apply = [&](const CVector& v, CVector& out) { apply_lippmann_schwinger(node_q, v, out); };

  TotalField field;
  field.direction = direction;
  field.wavenumber = k_;
  CVector x = rhs;
  CVector ax;
  const double bnorm = rhs.norm();
  // GMRES stops on its residual estimate; the loop re-checks the true residual.
  while (true) {
    GmresResult res = gmres(apply, rhs, std::move(x), options_.tol, options_.restart,
                            options_.max_iter - field.iterations);
    field.iterations += res.iterations;
    field.history.insert(field.history.end(), res.history.begin(), res.history.end());
    x = std::move(res.x);
    apply(x, ax);
    field.residual = (rhs - ax).norm() / bnorm;
    if (field.residual <= options_.tol) break;
    if (field.iterations >= options_.max_iter || res.iterations == 0) {
      throw SolverError("Lippmann-Schwinger solve did not converge (relative residual " +
                            std::to_string(field.residual) + ")",
                        field.history);
    }
  }
  field.values = std::move(x);
  return field;
}

CVector ForwardModel::far_field_nodes(const CVector& qu, const std::vector<Vec2>& obs) const {
  const FineGrid& f = fine();
  if (static_cast<std::size_t>(qu.size()) != f.support_size()) {
    throw DimensionMismatch("far_field: node vector length does not match the support");
  }
  const double weight = k_ * k_ / (4.0 * kPi) * f.node_area();
  CVector out(static_cast<Eigen::Index>(obs.size()));
  for (std::size_t j = 0; j < obs.size(); ++j) {
    Complex acc = 0.0;
    for (std::size_t s = 0; s < f.support_size(); ++s) {
      acc += std::exp(-kI * (k_ * obs[j].dot(f.node(s)))) * qu[static_cast<Eigen::Index>(s)];
    }
    out[static_cast<Eigen::Index>(j)] = weight * acc;
  }
  return out;
}

TotalField solve_lippmann_schwinger(const ForwardModel& model, const Medium& medium, const Vec2& direction) {
  if (!(medium.grid() == model.grid())) throw DimensionMismatch("solve: medium grid does not match the model");
  return model.solve_nodes(model.inject(medium.values()), direction);
}

CVector far_field(const ForwardModel& model, const TotalField& field, const Medium& medium,
                  const DirectionSet& obs_dirs) {
  if (!(medium.grid() == model.grid())) throw DimensionMismatch("far_field: medium grid does not match the model");
  if (static_cast<std::size_t>(field.values.size()) != model.fine().support_size()) {
    throw DimensionMismatch("far_field: field was solved on a different fine grid");
  }
  return model.far_field_nodes(model.inject(medium.values()).cwiseProduct(field.values), obs_dirs.vectors());
}

CVector born_far_field(const ForwardModel& model, const Medium& medium, const Vec2& direction,
                       const DirectionSet& obs_dirs) {
  const CVector uinc = incident_plane_wave(direction, model.wavenumber(), model.fine().nodes());
  return model.far_field_nodes(model.inject(medium.values()).cwiseProduct(uinc), obs_dirs.vectors());
}

FarFieldSet forward_map_nodes(const ForwardModel& model, const CVector& node_q, const DirectionSet& obs_dirs,
                              const DirectionSet& inc_dirs) {
  FarFieldSet out;
  out.obs_count = obs_dirs.count();
  out.inc_count = inc_dirs.count();
  out.values = CMatrix::Zero(obs_dirs.count(), inc_dirs.count());
  parallel_for(static_cast<std::size_t>(inc_dirs.count()), [&](std::size_t n) {
    TotalField field;
    try {
      field = model.solve_nodes(node_q, inc_dirs.at(n));
    } catch (const SolverError& e) {
      throw SolverError(std::string(e.what()) + " for incident direction " + std::to_string(n + 1),
                        e.residual_history(), static_cast<int>(n + 1));
    }
    out.values.col(static_cast<Eigen::Index>(n)) =
        model.far_field_nodes(node_q.cwiseProduct(field.values), obs_dirs.vectors());
  });
  return out;
}

FarFieldSet forward_map(const ForwardModel& model, const Medium& medium, const DirectionSet& obs_dirs,
                        const DirectionSet& inc_dirs) {
  if (!(medium.grid() == model.grid())) throw DimensionMismatch("forward_map: medium grid does not match the model");
  return forward_map_nodes(model, model.inject(medium.values()), obs_dirs, inc_dirs);
}

}  // namespace imscat
