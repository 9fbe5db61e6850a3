#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "imscat/observation.hpp"
#include "imscat/types.hpp"

namespace imscat {

/// Observation weight R = r^2 I.
struct WeightOperator {
  double r = 3.0;

  double variance() const { return r * r; }
  /// ||v||_{R^-1} = ||v|| / r.
  double norm(const CVector& v) const { return v.norm() / r; }
};

struct LMConfig {
  double rho = 0.4;
  double alpha_min = 1e-8;
  double alpha_max = 1e8;
  double bisect_tol = 1e-3;
  int max_bisect = 60;
  int max_outer = 10;
  /// Relative change of the nonlinear residual below which the iteration stops.
  double stagnation_tol = 1e-6;
  /// MSE growth over e_0 that counts as blow-up.
  double blowup_factor = 1e3;

  void validate() const;
};

/// Solves mat * x = rhs for Hermitian positive definite mat via Cholesky.
/// Throws NotPositiveDefinite if the factorization breaks down.
CMatrix hermitian_solve(const CMatrix& mat, const CMatrix& rhs);
CVector hermitian_solve(const CMatrix& mat, const CVector& rhs);

/// (alpha I + A^H R^-1 A)^-1 A^H R^-1 residual.
CVector tikhonov_step(const CMatrix& op, const CVector& residual, double alpha, const WeightOperator& weight);

/// ||residual - A dphi(alpha)||_{R^-1}.
double linearized_discrepancy(const CMatrix& op, const CVector& residual, double alpha, const WeightOperator& weight);

struct MorozovResult {
  double alpha = 0.0;
  double discrepancy = 0.0;
  double target = 0.0;
  /// True when no bracket existed and alpha sits at alpha_min or alpha_max.
  bool clamped = false;
  /// Clamped because discrepancy(alpha_min) already exceeds the target; alpha is then alpha_max.
  bool unreachable = false;
  int iterations = 0;
};

/// Bisection on log(alpha) for ||residual - A dphi(alpha)|| = rho ||residual|| (R^-1 norms).
/// Without a bracket the result is clamped: alpha_max both when the target lies
/// above discrepancy(alpha_max) and when it lies below discrepancy(alpha_min).
MorozovResult morozov_alpha(const CMatrix& op, const CVector& residual, const WeightOperator& weight,
                            const LMConfig& config);

struct IterationRecord {
  int iter = 0;
  double alpha = std::numeric_limits<double>::quiet_NaN();
  double discrepancy = std::numeric_limits<double>::quiet_NaN();
  double target = std::numeric_limits<double>::quiet_NaN();
  bool clamped = false;
  double residual_norm = std::numeric_limits<double>::quiet_NaN();
  double mse = std::numeric_limits<double>::quiet_NaN();
  double seconds = 0.0;
};

/// Iterates q_0, q_1, ... with one record per iterate (record 0 is the start).
struct RunResult {
  std::vector<CVector> iterates;
  std::vector<IterationRecord> records;
  bool blew_up = false;
  bool stagnated = false;
  /// Non-empty when a stage failed; iterates computed before the failure are kept.
  std::string failure;
};

struct RunOptions {
  std::optional<CVector> truth;
  /// Regularization parameters to use instead of the discrepancy principle.
  std::optional<std::vector<double>> alpha_schedule;
  /// Called after each completed iterate.
  std::function<void(const RunResult&)> on_iterate;
};

/// Full-data Levenberg-Marquardt on the stacked system. `data` is J x N (column n = f_n).
RunResult flm_run(const ObservationModel& model, const CMatrix& data, const WeightOperator& weight,
                  const LMConfig& config, const CVector& q0, const RunOptions& options = {});

namespace detail {
// Shared bookkeeping for the outer loops of FLM, KFL and EKF.
bool finish_iterate(RunResult& run, const RunOptions& options, double blowup_factor, CVector next,
                    IterationRecord record);
CVector stacked_residual(const CMatrix& data, const std::vector<CVector>& values);
}  // namespace detail

}  // namespace imscat
