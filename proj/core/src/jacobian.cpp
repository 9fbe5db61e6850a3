#include "imscat/jacobian.hpp"

#include <string>

#include "imscat/parallel.hpp"

namespace imscat {
namespace {

std::size_t find_direction(const std::vector<Vec2>& dirs, const Vec2& d) {
  for (std::size_t i = 0; i < dirs.size(); ++i) {
    if ((dirs[i] - d).norm() <= 1e-12) return i;
  }
  return dirs.size();
}

}  // namespace

FieldBundle solve_fields(const ForwardModel& model, const CVector& node_q, const DirectionSet& obs_dirs,
                         const std::vector<Vec2>& incident) {
  // Incident directions first, then the reversed observation directions not already present.
  std::vector<Vec2> unique;
  std::vector<std::size_t> inc_slot;
  std::vector<std::size_t> obs_slot;
  for (const auto& d : incident) {
    std::size_t at = find_direction(unique, d);
    if (at == unique.size()) unique.push_back(d);
    inc_slot.push_back(at);
  }
  for (const auto& x : obs_dirs.vectors()) {
    const Vec2 d = -x;
    std::size_t at = find_direction(unique, d);
    if (at == unique.size()) unique.push_back(d);
    obs_slot.push_back(at);
  }

  std::vector<CVector> fields(unique.size());
  parallel_for(unique.size(), [&](std::size_t i) {
    try {
      fields[i] = model.solve_nodes(node_q, unique[i]).values;
    } catch (const SolverError& e) {
      throw SolverError(std::string(e.what()) + " (direction " + std::to_string(i + 1) + ")", e.residual_history(),
                        static_cast<int>(i + 1));
    }
  });

  FieldBundle out;
  out.incident_fields.reserve(incident.size());
  for (std::size_t slot : inc_slot) out.incident_fields.push_back(fields[slot]);
  out.kernel.resize(obs_dirs.count(), static_cast<Eigen::Index>(model.fine().support_size()));
  for (std::size_t j = 0; j < obs_slot.size(); ++j) {
    out.kernel.row(static_cast<Eigen::Index>(j)) = fields[obs_slot[j]].transpose();
  }
  return out;
}

CMatrix kernel_K(const ForwardModel& model, const Medium& base, const DirectionSet& obs_dirs) {
  if (!(base.grid() == model.grid())) throw DimensionMismatch("kernel_K: medium grid does not match the model");
  return solve_fields(model, model.inject(base.values()), obs_dirs, {}).kernel;
}

CMatrix frechet_block(const ForwardModel& model, const CMatrix& kernel, const CVector& field) {
  const FineGrid& f = model.fine();
  const double k = model.wavenumber();
  const double weight = k * k * f.node_area() / (4.0 * kPi);
  CMatrix block = CMatrix::Zero(kernel.rows(), static_cast<Eigen::Index>(model.grid().size()));
  for (std::size_t s = 0; s < f.support_size(); ++s) {
    const auto si = static_cast<Eigen::Index>(s);
    block.col(static_cast<Eigen::Index>(f.cell_of(s))) += kernel.col(si) * field[si];
  }
  return weight * block;
}

LinearizedOperator assemble_frechet(const ForwardModel& model, const Medium& base, const DirectionSet& obs_dirs,
                                    const DirectionSet& inc_dirs) {
  if (!(base.grid() == model.grid())) throw DimensionMismatch("assemble_frechet: medium grid does not match the model");
  const CVector node_q = model.inject(base.values());
  const FieldBundle fields = solve_fields(model, node_q, obs_dirs, inc_dirs.vectors());

  LinearizedOperator op{{}, base, {}};
  op.base_farfield.obs_count = obs_dirs.count();
  op.base_farfield.inc_count = inc_dirs.count();
  op.base_farfield.values.resize(obs_dirs.count(), inc_dirs.count());
  op.blocks.reserve(static_cast<std::size_t>(inc_dirs.count()));
  for (int n = 0; n < inc_dirs.count(); ++n) {
    const CVector& u = fields.incident_fields[static_cast<std::size_t>(n)];
    op.blocks.push_back(frechet_block(model, fields.kernel, u));
    op.base_farfield.values.col(n) = model.far_field_nodes(node_q.cwiseProduct(u), obs_dirs.vectors());
  }
  return op;
}

CMatrix stack(const std::vector<CMatrix>& blocks) {
  if (blocks.empty()) return {};
  const Eigen::Index rows = blocks.front().rows();
  const Eigen::Index cols = blocks.front().cols();
  CMatrix out(rows * static_cast<Eigen::Index>(blocks.size()), cols);
  for (std::size_t n = 0; n < blocks.size(); ++n) {
    if (blocks[n].rows() != rows || blocks[n].cols() != cols) throw DimensionMismatch("stack: ragged blocks");
    out.middleRows(static_cast<Eigen::Index>(n) * rows, rows) = blocks[n];
  }
  return out;
}

CMatrix stack(const LinearizedOperator& op) { return stack(op.blocks); }

}  // namespace imscat
