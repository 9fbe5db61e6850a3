#include "imscat/regularize.hpp"

#include <chrono>
#include <cmath>

namespace imscat {

void LMConfig::validate() const {
  if (!(rho > 0.0 && rho < 1.0)) throw std::invalid_argument("LMConfig: rho must lie in (0, 1)");
  if (!(alpha_min > 0.0 && alpha_min < alpha_max)) throw std::invalid_argument("LMConfig: need 0 < alpha_min < alpha_max");
  if (!(bisect_tol > 0.0)) throw std::invalid_argument("LMConfig: bisect_tol must be positive");
  if (max_outer < 0) throw std::invalid_argument("LMConfig: max_outer must be >= 0");
}

CMatrix hermitian_solve(const CMatrix& mat, const CMatrix& rhs) {
  if (mat.rows() != mat.cols() || mat.rows() != rhs.rows()) throw DimensionMismatch("hermitian_solve: shape");
  const double scale = std::max(mat.norm(), 1e-300);
  if ((mat - mat.adjoint()).norm() > 1e-12 * scale) {
    throw std::invalid_argument("hermitian_solve: matrix is not Hermitian");
  }
  Eigen::LLT<CMatrix> llt(mat);
  if (llt.info() != Eigen::Success) throw NotPositiveDefinite("hermitian_solve: non-positive pivot");
  CMatrix x = llt.solve(rhs);
  // One refinement sweep keeps the residual at rounding level for moderately conditioned systems.
  x += llt.solve(rhs - mat * x);
  return x;
}

CVector hermitian_solve(const CMatrix& mat, const CVector& rhs) {
  return hermitian_solve(mat, CMatrix(rhs)).col(0);
}

CVector tikhonov_step(const CMatrix& op, const CVector& residual, double alpha, const WeightOperator& weight) {
  if (!(alpha > 0.0)) throw std::invalid_argument("tikhonov_step: alpha must be positive");
  if (op.rows() != residual.size()) throw DimensionMismatch("tikhonov_step: residual length");
  const double inv_var = 1.0 / weight.variance();
  CMatrix normal = inv_var * (op.adjoint() * op);
  normal.diagonal().array() += alpha;
  normal = 0.5 * (normal + normal.adjoint()).eval();
  return hermitian_solve(normal, CVector(inv_var * (op.adjoint() * residual)));
}

double linearized_discrepancy(const CMatrix& op, const CVector& residual, double alpha, const WeightOperator& weight) {
  return weight.norm(residual - op * tikhonov_step(op, residual, alpha, weight));
}

MorozovResult morozov_alpha(const CMatrix& op, const CVector& residual, const WeightOperator& weight,
                            const LMConfig& config) {
  config.validate();
  if (op.rows() != residual.size()) throw DimensionMismatch("morozov_alpha: residual length");
  MorozovResult out;
  out.target = config.rho * weight.norm(residual);

  // Spectral form of the normal matrix: one decomposition serves every trial alpha.
  const double inv_var = 1.0 / weight.variance();
  CMatrix normal = inv_var * (op.adjoint() * op);
  normal = 0.5 * (normal + normal.adjoint()).eval();
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(normal);
  const CMatrix& vecs = eig.eigenvectors();
  const RVector lambda = eig.eigenvalues().cwiseMax(0.0);
  const CVector g = vecs.adjoint() * (inv_var * (op.adjoint() * residual));
  const CMatrix op_vecs = op * vecs;
  auto discrepancy = [&](double alpha) {
    CVector coef = g;
    for (Eigen::Index i = 0; i < coef.size(); ++i) coef[i] /= (lambda[i] + alpha);
    return weight.norm(residual - op_vecs * coef);
  };

  if (out.target == 0.0) {
    out.alpha = config.alpha_max;
    out.discrepancy = 0.0;
    out.clamped = true;
    return out;
  }
  double lo = std::log(config.alpha_min);
  double hi = std::log(config.alpha_max);
  const double d_lo = discrepancy(config.alpha_min);
  if (std::abs(d_lo / out.target - 1.0) <= config.bisect_tol) {
    out.alpha = config.alpha_min;
    out.discrepancy = d_lo;
    return out;
  }
  if (d_lo > out.target) {
    // Even the least regularized step cannot explain the required fraction of
    // the residual (data fit down to the noise): take no appreciable step.
    out.alpha = config.alpha_max;
    out.discrepancy = discrepancy(config.alpha_max);
    out.clamped = true;
    out.unreachable = true;
    return out;
  }
  const double d_hi = discrepancy(config.alpha_max);
  if (d_hi <= out.target) {
    out.alpha = config.alpha_max;
    out.discrepancy = d_hi;
    out.clamped = std::abs(d_hi / out.target - 1.0) > config.bisect_tol;
    return out;
  }
  for (int it = 0; it < config.max_bisect; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double alpha = std::exp(mid);
    const double d = discrepancy(alpha);
    out.alpha = alpha;
    out.discrepancy = d;
    out.iterations = it + 1;
    if (std::abs(d / out.target - 1.0) <= config.bisect_tol) return out;
    if (d < out.target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return out;
}

namespace detail {

CVector stacked_residual(const CMatrix& data, const std::vector<CVector>& values) {
  const Eigen::Index rows = data.rows();
  if (static_cast<std::size_t>(data.cols()) != values.size()) throw DimensionMismatch("data block count");
  CVector out(rows * data.cols());
  for (Eigen::Index n = 0; n < data.cols(); ++n) {
    out.segment(n * rows, rows) = data.col(n) - values[static_cast<std::size_t>(n)];
  }
  return out;
}

bool finish_iterate(RunResult& run, const RunOptions& options, double blowup_factor, CVector next,
                    IterationRecord record) {
  const bool finite = next.allFinite();
  if (options.truth) record.mse = (*options.truth - next).squaredNorm();
  run.iterates.push_back(std::move(next));
  run.records.push_back(record);
  if (options.on_iterate) options.on_iterate(run);
  if (!finite) {
    run.blew_up = true;
    run.failure = "iterate became non-finite";
    return false;
  }
  if (options.truth) {
    const double e0 = run.records.front().mse;
    if (e0 > 0.0 && record.mse > blowup_factor * e0) {
      run.blew_up = true;
      return false;
    }
  }
  return true;
}

}  // namespace detail

namespace {

IterationRecord initial_record(const RunOptions& options, const CVector& q0) {
  IterationRecord r;
  r.iter = 0;
  if (options.truth) r.mse = (*options.truth - q0).squaredNorm();
  return r;
}

}  // namespace

RunResult flm_run(const ObservationModel& model, const CMatrix& data, const WeightOperator& weight,
                  const LMConfig& config, const CVector& q0, const RunOptions& options) {
  config.validate();
  if (static_cast<std::size_t>(data.rows()) != model.block_size() ||
      static_cast<std::size_t>(data.cols()) != model.block_count()) {
    throw DimensionMismatch("flm_run: data shape does not match the observation model");
  }
  RunResult run;
  run.iterates.push_back(q0);
  run.records.push_back(initial_record(options, q0));
  if (options.on_iterate) options.on_iterate(run);

  double previous_residual = -1.0;
  for (int i = 0; i < config.max_outer; ++i) {
    const auto start = std::chrono::steady_clock::now();
    const CVector& phi = run.iterates.back();
    try {
      const Linearization lin = model.linearize(phi);
      const CVector residual = detail::stacked_residual(data, lin.values);
      const double res_norm = weight.norm(residual);
      if (previous_residual > 0.0 && std::abs(res_norm - previous_residual) <= config.stagnation_tol * previous_residual) {
        run.stagnated = true;
        break;
      }
      const CMatrix op = stack(lin.blocks);
      IterationRecord rec;
      rec.iter = i + 1;
      rec.residual_norm = res_norm;
      CVector next = phi;
      if (res_norm > 0.0) {
        if (options.alpha_schedule && static_cast<std::size_t>(i) < options.alpha_schedule->size()) {
          rec.alpha = (*options.alpha_schedule)[static_cast<std::size_t>(i)];
        } else {
          const MorozovResult mz = morozov_alpha(op, residual, weight, config);
          rec.alpha = mz.alpha;
          rec.clamped = mz.clamped;
          rec.target = mz.target;
        }
        next += tikhonov_step(op, residual, rec.alpha, weight);
        rec.discrepancy = weight.norm(residual - op * (next - phi));
      } else {
        run.stagnated = true;
      }
      rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      previous_residual = res_norm;
      if (!detail::finish_iterate(run, options, config.blowup_factor, std::move(next), rec)) break;
      if (run.stagnated) break;
    } catch (const std::exception& e) {
      run.failure = std::string("FLM iteration ") + std::to_string(i + 1) + ": " + e.what();
      break;
    }
  }
  return run;
}

}  // namespace imscat
