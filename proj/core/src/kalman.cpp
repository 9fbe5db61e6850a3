#include "imscat/kalman.hpp"

#include <chrono>
#include <cmath>
#include <string>

namespace imscat {
namespace {

double spectral_norm_hermitian(const CMatrix& B) {
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(B, Eigen::EigenvaluesOnly);
  return eig.eigenvalues().cwiseAbs().maxCoeff();
}

void emit(const TraceOptions& trace, const FilterState& s, const CVector& innovation) {
  if (!trace.sink) return;
  KalmanTraceRecord rec;
  rec.outer = s.outer;
  rec.inner = s.inner;
  rec.innovation_norm = innovation.norm();
  rec.b_norm = spectral_norm_hermitian(s.B);
  rec.mse = trace.truth ? (*trace.truth - s.phi).squaredNorm() : std::numeric_limits<double>::quiet_NaN();
  trace.sink(rec);
}

void check_data(const ObservationModel& model, const CMatrix& data) {
  if (static_cast<std::size_t>(data.rows()) != model.block_size() ||
      static_cast<std::size_t>(data.cols()) != model.block_count()) {
    throw DimensionMismatch("data shape does not match the observation model");
  }
}

}  // namespace

CMatrix kalman_gain(const CMatrix& B, const CMatrix& op, const WeightOperator& weight) {
  if (B.rows() != B.cols() || op.cols() != B.rows()) throw DimensionMismatch("kalman_gain: shape");
  const CMatrix ab = op * B;  // A B; (B A^H)^H since B is Hermitian
  CMatrix inner = ab * op.adjoint();
  inner.diagonal().array() += weight.variance();
  inner = 0.5 * (inner + inner.adjoint()).eval();
  Eigen::LLT<CMatrix> llt(inner);
  if (llt.info() != Eigen::Success) throw NotPositiveDefinite("kalman_gain: R + A B A^H is not positive definite");
  return llt.solve(ab).adjoint();
}

FilterState kalman_update(const FilterState& state, const CMatrix& op, const CVector& innovation,
                          const WeightOperator& weight) {
  const CMatrix gain = kalman_gain(state.B, op, weight);
  FilterState next;
  next.phi = state.phi + gain * innovation;
  next.B = state.B - gain * (op * state.B);
  next.B = 0.5 * (next.B + next.B.adjoint()).eval();
  next.outer = state.outer;
  next.inner = state.inner + 1;
  return next;
}

FilterState kfl_sweep(const FilterState& state, const CMatrix& data, const Linearization& lin, const CVector& base,
                      const WeightOperator& weight, const TraceOptions& trace) {
  if (static_cast<std::size_t>(data.cols()) != lin.blocks.size() || lin.values.size() != lin.blocks.size()) {
    throw DimensionMismatch("kfl_sweep: data and linearization disagree on the block count");
  }
  FilterState s = state;
  s.inner = 0;
  for (std::size_t n = 0; n < lin.blocks.size(); ++n) {
    const CMatrix& op = lin.blocks[n];
    const auto col = static_cast<Eigen::Index>(n);
    // f_n - A_n(base) + A'_n base - A'_n phi
    const CVector innovation = data.col(col) - lin.values[n] - op * (s.phi - base);
    try {
      s = kalman_update(s, op, innovation, weight);
    } catch (const std::exception& e) {
      throw std::runtime_error("KFL update (i=" + std::to_string(s.outer) + ", n=" + std::to_string(n + 1) +
                               "): " + e.what());
    }
    emit(trace, s, innovation);
  }
  return s;
}

FilterState ekf_sweep(const FilterState& state, const CMatrix& data, const ObservationModel& model,
                      const WeightOperator& weight, const TraceOptions& trace) {
  check_data(model, data);
  FilterState s = state;
  s.inner = 0;
  for (std::size_t n = 0; n < model.block_count(); ++n) {
    try {
      const BlockLinearization lin = model.linearize_block(s.phi, n);
      const CVector innovation = data.col(static_cast<Eigen::Index>(n)) - lin.value;
      s = kalman_update(s, lin.jacobian, innovation, weight);
      emit(trace, s, innovation);
    } catch (const std::exception& e) {
      throw std::runtime_error("EKF update (i=" + std::to_string(s.outer) + ", n=" + std::to_string(n + 1) +
                               "): " + e.what());
    }
  }
  return s;
}

RunResult kfl_run(const ObservationModel& model, const CMatrix& data, const WeightOperator& weight,
                  const LMConfig& config, const CVector& q0, const RunOptions& options, const TraceOptions& trace) {
  config.validate();
  check_data(model, data);
  RunResult run;
  run.iterates.push_back(q0);
  IterationRecord first;
  if (options.truth) first.mse = (*options.truth - q0).squaredNorm();
  run.records.push_back(first);
  if (options.on_iterate) options.on_iterate(run);

  const auto dim = static_cast<Eigen::Index>(model.state_dim());
  double previous_residual = -1.0;
  for (int i = 0; i < config.max_outer; ++i) {
    const auto start = std::chrono::steady_clock::now();
    const CVector base = run.iterates.back();
    try {
      const Linearization lin = model.linearize(base);
      const CVector residual = detail::stacked_residual(data, lin.values);
      const double res_norm = weight.norm(residual);
      if (previous_residual > 0.0 && std::abs(res_norm - previous_residual) <= config.stagnation_tol * previous_residual) {
        run.stagnated = true;
        break;
      }
      IterationRecord rec;
      rec.iter = i + 1;
      rec.residual_norm = res_norm;
      CVector next = base;
      if (res_norm > 0.0) {
        if (options.alpha_schedule && static_cast<std::size_t>(i) < options.alpha_schedule->size()) {
          rec.alpha = (*options.alpha_schedule)[static_cast<std::size_t>(i)];
        } else {
          const MorozovResult mz = morozov_alpha(stack(lin.blocks), residual, weight, config);
          rec.alpha = mz.alpha;
          rec.clamped = mz.clamped;
          rec.target = mz.target;
        }
        FilterState s{base, CMatrix::Identity(dim, dim) / rec.alpha, i, 0};
        s = kfl_sweep(s, data, lin, base, weight, trace);
        next = s.phi;
        rec.discrepancy = weight.norm(residual - stack(lin.blocks) * (next - base));
      } else {
        run.stagnated = true;
      }
      rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      previous_residual = res_norm;
      if (!detail::finish_iterate(run, options, config.blowup_factor, std::move(next), rec)) break;
      if (run.stagnated) break;
    } catch (const std::exception& e) {
      run.failure = std::string("KFL iteration ") + std::to_string(i + 1) + ": " + e.what();
      break;
    }
  }
  return run;
}

RunResult ekf_run(const ObservationModel& model, const CMatrix& data, const WeightOperator& weight,
                  const EkfConfig& config, const CVector& q0, const RunOptions& options, const TraceOptions& trace) {
  if (!(config.alpha0 > 0.0)) throw std::invalid_argument("ekf_run: alpha0 must be positive");
  if (config.iters < 0) throw std::invalid_argument("ekf_run: iters must be >= 0");
  check_data(model, data);
  RunResult run;
  run.iterates.push_back(q0);
  IterationRecord first;
  if (options.truth) first.mse = (*options.truth - q0).squaredNorm();
  run.records.push_back(first);
  if (options.on_iterate) options.on_iterate(run);

  const auto dim = static_cast<Eigen::Index>(model.state_dim());
  FilterState s{q0, CMatrix::Identity(dim, dim) / config.alpha0, 0, 0};
  for (int i = 0; i < config.iters; ++i) {
    const auto start = std::chrono::steady_clock::now();
    try {
      s.outer = i;
      s = ekf_sweep(s, data, model, weight, trace);
    } catch (const std::exception& e) {
      run.failure = std::string("EKF iteration ") + std::to_string(i + 1) + ": " + e.what();
      break;
    }
    IterationRecord rec;
    rec.iter = i + 1;
    if (i == 0) rec.alpha = config.alpha0;
    rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!detail::finish_iterate(run, options, config.blowup_factor, s.phi, rec)) break;
  }
  return run;
}

}  // namespace imscat
