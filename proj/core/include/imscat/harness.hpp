#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "imscat/forward.hpp"
#include "imscat/grid.hpp"
#include "imscat/io.hpp"
#include "imscat/kalman.hpp"
#include "imscat/regularize.hpp"

namespace imscat {

enum class Algo { FLM, KFL, EKF };

Algo parse_algo(const std::string& name);
std::string algo_name(Algo algo);

/// Everything needed to reproduce one experiment.
struct ExperimentConfig {
  double k = 3.0;
  double S = 3.0;
  int M = 8;
  int J = 30;
  int N = 30;
  double r = 3.0;
  double sigma = 0.01;
  double rho = 0.4;
  double alpha0 = 50.0;
  ShapeTag shape = ShapeTag::B1;
  double contrast = 0.1;
  Algo algo = Algo::KFL;
  int iters = 10;
  std::uint64_t seed = 1;
  /// Generate data on the inversion grid instead of a twice finer one.
  bool inverse_crime = false;
  /// Inversion fine-grid nodes per axis over the periodization cell.
  int fine_grid = 128;
  double period_factor = kDefaultPeriodFactor;
  double solver_tol = 1e-8;
  bool verbose_trace = false;
  bool png = false;
  /// Fill the `seconds` column of mse.csv (makes output run-dependent).
  bool timings = false;

  void validate() const;
  int data_fine_grid() const { return inverse_crime ? fine_grid : 2 * fine_grid; }
  CellGrid grid() const { return make_grid(S, M); }
  Medium truth() const;
};

ForwardModel make_inversion_model(const ExperimentConfig& config);
ForwardModel make_data_model(const ExperimentConfig& config);

/// Noisy far-field data of the true medium (or `truth_override`) on the data grid.
FarFieldSet generate_data(const ExperimentConfig& config, const std::optional<Medium>& truth_override = std::nullopt);

FarFieldMeta make_farfield_meta(const ExperimentConfig& config);

struct ExperimentReport {
  Algo algo = Algo::KFL;
  RunResult run;
  std::vector<KalmanTraceRecord> trace;

  std::vector<double> mse_series() const;
  bool blew_up() const { return run.blew_up; }
  bool failed() const { return !run.failure.empty(); }
};

/// Runs the configured algorithm from q0 = 0 on the given data.
ExperimentReport run_experiment(const ExperimentConfig& config, const FarFieldSet& data,
                                const ForwardModel& model);
ExperimentReport run_experiment(const ExperimentConfig& config, const FarFieldSet& data);

/// Output writers. `dir` must exist.
void write_mse_csv(const std::filesystem::path& path, const std::vector<ExperimentReport>& reports, bool timings);
void write_iterates(const std::filesystem::path& dir, const ExperimentConfig& config, const ExperimentReport& report);
void write_trace_csv(const std::filesystem::path& path, const ExperimentReport& report);
void write_meta(const std::filesystem::path& path, const ExperimentConfig& config,
                const std::vector<ExperimentReport>& reports, const std::string& command);

/// Exit status for a finished run set: 0 ok, 2 blow-up detected, 3 stage failure.
int exit_status(const std::vector<ExperimentReport>& reports);

/// CLI drivers; each writes into `out` (created if needed) and returns the exit status.
int command_forward(const ExperimentConfig& config, const std::filesystem::path& out);
int command_reconstruct(const ExperimentConfig& config, const std::filesystem::path& out,
                        const std::optional<std::filesystem::path>& data_path);
int command_compare(const ExperimentConfig& config, const std::filesystem::path& out,
                    const std::optional<std::filesystem::path>& data_path);

}  // namespace imscat
