#pragma once

#include <vector>

#include "imscat/forward.hpp"
#include "imscat/grid.hpp"

namespace imscat {

/// Frechet derivative of the discrete far-field map at a base point.
///
/// Block n is J x (2M)^2 with entry (j, m) equal to
///   (k^2 h^2 / 4 pi) * sum_{s in cell m} K(xhat_j, x_s) u(x_s, theta_n),
/// the exact derivative of forward_map with respect to the cell values. With
/// one node per cell (refine == 1) this is (k^2 S^2 / 4 pi M^2) K(xhat_j, y_m) u(y_m, theta_n).
struct LinearizedOperator {
  std::vector<CMatrix> blocks;
  Medium base_point;
  FarFieldSet base_farfield;
};

/// K_q(xhat_j, x_s) on the support nodes (J x support), computed from the
/// reciprocity identity K_q(xhat, y) = u_q(y, -xhat): one solve per direction.
CMatrix kernel_K(const ForwardModel& model, const Medium& base, const DirectionSet& obs_dirs);

/// Node-level total fields and their far fields for the directions of a
/// linearization. Solves each distinct direction once.
struct FieldBundle {
  std::vector<CVector> incident_fields;  // u(., theta_n), one per incident direction
  CMatrix kernel;                        // J x support, K(xhat_j, x_s)
};

FieldBundle solve_fields(const ForwardModel& model, const CVector& node_q, const DirectionSet& obs_dirs,
                         const std::vector<Vec2>& incident);

/// Derivative block from node-level kernel values and total field.
CMatrix frechet_block(const ForwardModel& model, const CMatrix& kernel, const CVector& field);

LinearizedOperator assemble_frechet(const ForwardModel& model, const Medium& base, const DirectionSet& obs_dirs,
                                    const DirectionSet& inc_dirs);

/// Vertical concatenation of the blocks in direction order.
CMatrix stack(const LinearizedOperator& op);
CMatrix stack(const std::vector<CMatrix>& blocks);

}  // namespace imscat
