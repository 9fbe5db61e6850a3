#pragma once

#include <memory>
#include <optional>
#include <stdexcept>
#include <vector>

#include "imscat/fine_grid.hpp"
#include "imscat/grid.hpp"
#include "imscat/types.hpp"

namespace imscat {

struct SolverOptions {
  double tol = 1e-8;
  int max_iter = 500;
  int restart = 50;
};

/// Krylov solve that failed to reach its tolerance.
class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, std::vector<double> history, std::optional<int> direction = std::nullopt)
      : std::runtime_error(what), history_(std::move(history)), direction_(direction) {}

  const std::vector<double>& residual_history() const { return history_; }
  /// 1-based index of the offending incident/observation direction, when known.
  std::optional<int> direction() const { return direction_; }

 private:
  std::vector<double> history_;
  std::optional<int> direction_;
};

/// Total field u(., theta) on the support nodes of a FineGrid.
struct TotalField {
  CVector values;
  Vec2 direction;
  double wavenumber = 0.0;
  /// ||u - u_inc - k^2 G(q u)|| / ||u_inc|| re-checked after the solve.
  double residual = 0.0;
  int iterations = 0;
  std::vector<double> history;
};

/// u_inc(x) = exp(i k x . direction) for each point.
CVector incident_plane_wave(const Vec2& direction, double k, const std::vector<Vec2>& points);

/// Discretized Lippmann-Schwinger / far-field model for one wavenumber on one
/// (coarse, fine) grid pair. Immutable once built; safe to share across threads.
class ForwardModel {
 public:
  ForwardModel(CellGrid coarse, FineGrid fine, double k, SolverOptions options = {});

  const CellGrid& grid() const { return coarse_; }
  const FineGrid& fine() const { return kernel_->fine(); }
  double wavenumber() const { return k_; }
  const SolverOptions& options() const { return options_; }
  const KernelOperator& kernel() const { return *kernel_; }

  /// Piecewise-constant injection of cell values onto the support nodes.
  CVector inject(const CVector& cell_values) const;
  /// Adjoint of inject: sums node values cell by cell.
  CVector restrict_sum(const CVector& node_values) const;

  /// out = v - k^2 G (q v).
  void apply_lippmann_schwinger(const CVector& node_q, const CVector& v, CVector& out) const;

  /// Solves the discrete Lippmann-Schwinger equation for a node-level contrast.
  TotalField solve_nodes(const CVector& node_q, const Vec2& direction) const;

  /// Far field (k^2 / 4 pi) sum_s h^2 exp(-i k xhat . x_s) q_s u_s for each xhat.
  CVector far_field_nodes(const CVector& node_values_times_q, const std::vector<Vec2>& obs) const;

 private:
  CellGrid coarse_;
  double k_;
  SolverOptions options_;
  std::shared_ptr<const KernelOperator> kernel_;
};

TotalField solve_lippmann_schwinger(const ForwardModel& model, const Medium& medium, const Vec2& direction);

/// Far-field pattern of a solved total field in the observation directions.
CVector far_field(const ForwardModel& model, const TotalField& field, const Medium& medium, const DirectionSet& obs_dirs);

/// Born approximation: far_field with u replaced by u_inc.
CVector born_far_field(const ForwardModel& model, const Medium& medium, const Vec2& direction,
                       const DirectionSet& obs_dirs);

/// Far-field data u_inf(xhat_j, theta_n), J x N.
struct FarFieldSet {
  CMatrix values;
  int obs_count = 0;
  int inc_count = 0;
  double sigma = 0.0;

  DirectionSet obs_dirs() const { return DirectionSet(obs_count); }
  DirectionSet inc_dirs() const { return DirectionSet(inc_count); }
};

/// Column n is the far field of the solve for theta_n. Solves run in parallel.
FarFieldSet forward_map(const ForwardModel& model, const Medium& medium, const DirectionSet& obs_dirs,
                        const DirectionSet& inc_dirs);

/// Node-level variant (contrast given directly on support nodes).
FarFieldSet forward_map_nodes(const ForwardModel& model, const CVector& node_q, const DirectionSet& obs_dirs,
                              const DirectionSet& inc_dirs);

}  // namespace imscat
