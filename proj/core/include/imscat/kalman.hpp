#pragma once

#include <functional>
#include <vector>

#include "imscat/observation.hpp"
#include "imscat/regularize.hpp"

namespace imscat {

/// Iterate phi_{i,n} with its weight B_{i,n}.
struct FilterState {
  CVector phi;
  CMatrix B;
  int outer = 0;
  int inner = 0;
};

struct KalmanTraceRecord {
  int outer = 0;
  int inner = 0;
  double innovation_norm = 0.0;
  /// Spectral norm of B after the update.
  double b_norm = 0.0;
  double mse = 0.0;
};

struct TraceOptions {
  std::function<void(const KalmanTraceRecord&)> sink;
  std::optional<CVector> truth;
};

/// K = B A^H (R + A B A^H)^-1.
CMatrix kalman_gain(const CMatrix& B, const CMatrix& op, const WeightOperator& weight);

/// One measurement update: phi += K innovation, B = (I - K A) B (re-symmetrized).
FilterState kalman_update(const FilterState& state, const CMatrix& op, const CVector& innovation,
                          const WeightOperator& weight);

/// KFL sweep over n = 1..N with every block linearized at the sweep's base point.
/// `lin` must be the linearization at `base` (= state.phi at entry).
FilterState kfl_sweep(const FilterState& state, const CMatrix& data, const Linearization& lin, const CVector& base,
                      const WeightOperator& weight, const TraceOptions& trace = {});

/// EKF sweep: relinearizes A_n at the current iterate before each update.
FilterState ekf_sweep(const FilterState& state, const CMatrix& data, const ObservationModel& model,
                      const WeightOperator& weight, const TraceOptions& trace = {});

/// Kalman-filter Levenberg-Marquardt: per outer iteration, alpha_i from the
/// discrepancy principle on the stacked system, B_{i,0} = I / alpha_i.
RunResult kfl_run(const ObservationModel& model, const CMatrix& data, const WeightOperator& weight,
                  const LMConfig& config, const CVector& q0, const RunOptions& options = {},
                  const TraceOptions& trace = {});

struct EkfConfig {
  double alpha0 = 50.0;
  int iters = 10;
  double blowup_factor = 1e3;
};

/// Iterative extended Kalman filter: B_{0,0} = I / alpha0, carried across outer iterations.
RunResult ekf_run(const ObservationModel& model, const CMatrix& data, const WeightOperator& weight,
                  const EkfConfig& config, const CVector& q0, const RunOptions& options = {},
                  const TraceOptions& trace = {});

}  // namespace imscat
