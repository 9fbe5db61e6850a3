#include "imscat/observation.hpp"

namespace imscat {

LinearObservation::LinearObservation(std::vector<CMatrix> matrices, std::vector<CVector> offsets)
    : matrices_(std::move(matrices)), offsets_(std::move(offsets)) {
  if (matrices_.empty()) throw std::invalid_argument("LinearObservation: need at least one block");
  const Eigen::Index rows = matrices_.front().rows();
  const Eigen::Index cols = matrices_.front().cols();
  for (const auto& m : matrices_) {
    if (m.rows() != rows || m.cols() != cols) throw DimensionMismatch("LinearObservation: ragged blocks");
  }
  if (offsets_.empty()) offsets_.assign(matrices_.size(), CVector::Zero(rows));
  if (offsets_.size() != matrices_.size()) throw DimensionMismatch("LinearObservation: offset count");
  for (const auto& c : offsets_) {
    if (c.size() != rows) throw DimensionMismatch("LinearObservation: offset length");
  }
}

std::size_t LinearObservation::state_dim() const { return static_cast<std::size_t>(matrices_.front().cols()); }
std::size_t LinearObservation::block_size() const { return static_cast<std::size_t>(matrices_.front().rows()); }

Linearization LinearObservation::linearize(const CVector& phi) const {
  Linearization lin;
  for (std::size_t n = 0; n < matrices_.size(); ++n) {
    lin.values.push_back(matrices_[n] * phi + offsets_[n]);
    lin.blocks.push_back(matrices_[n]);
  }
  return lin;
}

BlockLinearization LinearObservation::linearize_block(const CVector& phi, std::size_t n) const {
  return {matrices_.at(n) * phi + offsets_.at(n), matrices_.at(n)};
}

ScatteringObservation::ScatteringObservation(const ForwardModel& model, int obs_count, int inc_count)
    : model_(model), obs_dirs_(obs_count), inc_dirs_(inc_count) {}

Linearization ScatteringObservation::linearize(const CVector& phi) const {
  LinearizedOperator op = assemble_frechet(model_, Medium(model_.grid(), phi), obs_dirs_, inc_dirs_);
  Linearization lin;
  lin.blocks = std::move(op.blocks);
  for (int n = 0; n < inc_dirs_.count(); ++n) lin.values.push_back(op.base_farfield.values.col(n));
  return lin;
}

BlockLinearization ScatteringObservation::linearize_block(const CVector& phi, std::size_t n) const {
  const CVector node_q = model_.inject(phi);
  const FieldBundle fields = solve_fields(model_, node_q, obs_dirs_, {inc_dirs_.at(n)});
  const CVector& u = fields.incident_fields.front();
  return {model_.far_field_nodes(node_q.cwiseProduct(u), obs_dirs_.vectors()), frechet_block(model_, fields.kernel, u)};
}

}  // namespace imscat
