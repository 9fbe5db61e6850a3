#include "imscat/harness.hpp"

#include <fmt/format.h>

#include <cmath>
#include <fstream>
#include <stdexcept>

#include "imscat/heatmap.hpp"
#include "imscat/noise.hpp"
#include "imscat/observation.hpp"
#include "json.hpp"

namespace imscat {
namespace fs = std::filesystem;

namespace {

std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

// Empty cell for NaN so optional columns stay blank.
std::string cell(double v) { return std::isfinite(v) ? format_double(v) : std::string{}; }

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  return out;
}

LMConfig lm_config(const ExperimentConfig& c) {
  LMConfig lm;
  lm.rho = c.rho;
  lm.max_outer = c.iters;
  return lm;
}

fs::path resolve_data_path(const fs::path& p) { return fs::is_directory(p) ? p / "farfield.csv" : p; }

fs::path sidecar_of(const fs::path& csv) {
  fs::path meta = csv;
  meta.replace_extension(".meta.json");
  return meta;
}

FarFieldSet load_data(const ExperimentConfig& config, const fs::path& data_path) {
  const fs::path csv = resolve_data_path(data_path);
  const fs::path meta_path = sidecar_of(csv);
  if (fs::exists(meta_path)) {
    const FarFieldMeta meta = read_farfield_meta(meta_path);
    if (meta.J != config.J || meta.N != config.N) {
      throw std::invalid_argument(fmt::format("data has J={}, N={} but the config asks for J={}, N={}", meta.J, meta.N,
                                              config.J, config.N));
    }
    if (std::abs(meta.k - config.k) > 1e-12 * std::max(1.0, config.k)) {
      throw std::invalid_argument(fmt::format("data was generated at k={} but the config asks for k={}", meta.k, config.k));
    }
    FarFieldSet data = read_farfield_csv(csv, config.J, config.N);
    data.sigma = meta.sigma;
    return data;
  }
  return read_farfield_csv(csv, config.J, config.N);
}

void write_data(const ExperimentConfig& config, const FarFieldSet& data, const fs::path& out) {
  write_farfield_csv(out / "farfield.csv", data);
  write_farfield_meta(out / "farfield.meta.json", make_farfield_meta(config));
}

}  // namespace

Algo parse_algo(const std::string& name) {
  const std::string n = lower(name);
  if (n == "flm") return Algo::FLM;
  if (n == "kfl") return Algo::KFL;
  if (n == "ekf") return Algo::EKF;
  throw std::invalid_argument("unknown algorithm '" + name + "' (expected flm, kfl or ekf)");
}

std::string algo_name(Algo algo) {
  switch (algo) {
    case Algo::FLM: return "flm";
    case Algo::KFL: return "kfl";
    case Algo::EKF: return "ekf";
  }
  return "?";
}

void ExperimentConfig::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(what);
  };
  require(k > 0.0 && std::isfinite(k), "k must be positive");
  require(S > 0.0 && std::isfinite(S), "S must be positive");
  require(M > 0, "M must be positive");
  require(J > 0 && N > 0, "J and N must be positive");
  require(r > 0.0, "r must be positive");
  require(sigma >= 0.0 && std::isfinite(sigma), "sigma must be >= 0");
  require(rho > 0.0 && rho < 1.0, "rho must lie in (0, 1)");
  require(alpha0 > 0.0, "alpha0 must be positive");
  require(iters >= 0, "iters must be >= 0");
  require(solver_tol > 0.0 && solver_tol < 1.0, "solver_tol must lie in (0, 1)");
  require(std::isfinite(contrast), "contrast must be finite");
  // Grid compatibility is checked by FineGrid; surface it early.
  (void)make_fine_grid(grid(), fine_grid, period_factor);
  (void)make_fine_grid(grid(), data_fine_grid(), period_factor);
}

Medium ExperimentConfig::truth() const {
  return characteristic_medium(ShapeId{shape, Complex(contrast, 0.0)}, grid());
}

ForwardModel make_inversion_model(const ExperimentConfig& c) {
  const CellGrid g = c.grid();
  SolverOptions opts;
  opts.tol = c.solver_tol;
  return ForwardModel(g, make_fine_grid(g, c.fine_grid, c.period_factor), c.k, opts);
}

ForwardModel make_data_model(const ExperimentConfig& c) {
  const CellGrid g = c.grid();
  SolverOptions opts;
  opts.tol = c.solver_tol;
  return ForwardModel(g, make_fine_grid(g, c.data_fine_grid(), c.period_factor), c.k, opts);
}

FarFieldSet generate_data(const ExperimentConfig& config, const std::optional<Medium>& truth_override) {
  config.validate();
  const ForwardModel model = make_data_model(config);
  const Medium truth = truth_override ? *truth_override : config.truth();
  const FarFieldSet clean = forward_map(model, truth, make_directions(config.J), make_directions(config.N));
  return add_noise(clean, NoiseModel{config.sigma, config.seed});
}

FarFieldMeta make_farfield_meta(const ExperimentConfig& c) {
  FarFieldMeta meta;
  meta.k = c.k;
  meta.J = c.J;
  meta.N = c.N;
  meta.sigma = c.sigma;
  meta.seed = c.seed;
  meta.S = c.S;
  meta.M = c.M;
  meta.fine_grid = c.data_fine_grid();
  meta.period = c.period_factor * c.S;
  meta.shape = shape_name(c.shape);
  return meta;
}

std::vector<double> ExperimentReport::mse_series() const {
  std::vector<double> out;
  out.reserve(run.records.size());
  for (const auto& r : run.records) out.push_back(r.mse);
  return out;
}

ExperimentReport run_experiment(const ExperimentConfig& config, const FarFieldSet& data, const ForwardModel& model) {
  config.validate();
  if (data.values.rows() != config.J || data.values.cols() != config.N) {
    throw DimensionMismatch("run_experiment: data is not J x N");
  }
  const ScatteringObservation obs(model, config.J, config.N);
  const WeightOperator weight{config.r};
  const CVector q0 = CVector::Zero(static_cast<Eigen::Index>(obs.state_dim()));

  ExperimentReport report;
  report.algo = config.algo;
  RunOptions options;
  options.truth = config.truth().values();
  TraceOptions trace;
  if (config.verbose_trace) {
    trace.truth = options.truth;
    trace.sink = [&report](const KalmanTraceRecord& r) { report.trace.push_back(r); };
  }

  switch (config.algo) {
    case Algo::FLM:
      report.run = flm_run(obs, data.values, weight, lm_config(config), q0, options);
      break;
    case Algo::KFL:
      report.run = kfl_run(obs, data.values, weight, lm_config(config), q0, options, trace);
      break;
    case Algo::EKF: {
      EkfConfig ekf;
      ekf.alpha0 = config.alpha0;
      ekf.iters = config.iters;
      report.run = ekf_run(obs, data.values, weight, ekf, q0, options, trace);
      break;
    }
  }
  return report;
}

ExperimentReport run_experiment(const ExperimentConfig& config, const FarFieldSet& data) {
  config.validate();
  const ForwardModel model = make_inversion_model(config);
  return run_experiment(config, data, model);
}

void write_mse_csv(const fs::path& path, const std::vector<ExperimentReport>& reports, bool timings) {
  auto out = open_out(path);
  out << "iter,algo,mse,alpha,seconds\n";
  for (const auto& rep : reports) {
    for (const auto& r : rep.run.records) {
      out << r.iter << ',' << algo_name(rep.algo) << ',' << cell(r.mse) << ',' << cell(r.alpha) << ','
          << (timings && r.iter > 0 ? cell(r.seconds) : std::string{}) << '\n';
    }
  }
}

void write_iterates(const fs::path& dir, const ExperimentConfig& config, const ExperimentReport& report) {
  const CellGrid g = config.grid();
  for (std::size_t i = 0; i < report.run.iterates.size(); ++i) {
    const Medium m(g, report.run.iterates[i]);
    write_medium_csv(dir / fmt::format("medium_iter_{}.csv", i), m);
    if (config.png) render_heatmap(m, dir / fmt::format("medium_iter_{}.png", i));
  }
}

void write_trace_csv(const fs::path& path, const ExperimentReport& report) {
  auto out = open_out(path);
  out << "outer,inner,algo,innovation_norm,b_norm,mse\n";
  for (const auto& r : report.trace) {
    out << r.outer + 1 << ',' << r.inner << ',' << algo_name(report.algo) << ',' << cell(r.innovation_norm) << ','
        << cell(r.b_norm) << ',' << cell(r.mse) << '\n';
  }
}

void write_meta(const fs::path& path, const ExperimentConfig& c, const std::vector<ExperimentReport>& reports,
                const std::string& command) {
  nlohmann::ordered_json j;
  j["command"] = command;
  j["config"] = {
      {"k", c.k},         {"S", c.S},
      {"M", c.M},         {"J", c.J},
      {"N", c.N},         {"r", c.r},
      {"sigma", c.sigma}, {"rho", c.rho},
      {"alpha0", c.alpha0}, {"shape", shape_name(c.shape)},
      {"contrast", c.contrast}, {"algo", algo_name(c.algo)},
      {"iters", c.iters}, {"seed", c.seed},
      {"inverse_crime", c.inverse_crime}, {"fine_grid", c.fine_grid},
      {"data_fine_grid", c.data_fine_grid()}, {"period", c.period_factor * c.S},
      {"solver_tol", c.solver_tol},
  };
  j["rng"] = "splitmix64 counter stream, Box-Muller; entry (j, n) uses counter n*J + j";
  j["q0"] = "zero";
  j["e0"] = reports.empty() || reports.front().run.records.empty() ? 0.0 : reports.front().run.records.front().mse;
  auto runs = nlohmann::ordered_json::array();
  for (const auto& rep : reports) {
    nlohmann::ordered_json r;
    r["algo"] = algo_name(rep.algo);
    r["iterates"] = rep.run.iterates.size();
    r["blew_up"] = rep.run.blew_up;
    r["stagnated"] = rep.run.stagnated;
    r["failure"] = rep.run.failure;
    runs.push_back(r);
  }
  j["runs"] = runs;
  j["exit_status"] = exit_status(reports);
  auto out = open_out(path);
  out << j.dump(2) << '\n';
}

int exit_status(const std::vector<ExperimentReport>& reports) {
  int status = 0;
  for (const auto& r : reports) {
    if (r.failed()) return 3;
    if (r.blew_up()) status = 2;
  }
  return status;
}

int command_forward(const ExperimentConfig& config, const fs::path& out) {
  config.validate();
  fs::create_directories(out);
  write_data(config, generate_data(config), out);
  return 0;
}

namespace {

FarFieldSet obtain_data(const ExperimentConfig& config, const fs::path& out, const std::optional<fs::path>& data_path) {
  if (data_path) return load_data(config, *data_path);
  FarFieldSet data = generate_data(config);
  write_data(config, data, out);
  return data;
}

}  // namespace

int command_reconstruct(const ExperimentConfig& config, const fs::path& out, const std::optional<fs::path>& data_path) {
  config.validate();
  fs::create_directories(out);
  const FarFieldSet data = obtain_data(config, out, data_path);
  std::vector<ExperimentReport> reports{run_experiment(config, data)};
  write_iterates(out, config, reports.front());
  write_mse_csv(out / "mse.csv", reports, config.timings);
  if (config.verbose_trace && config.algo != Algo::FLM) write_trace_csv(out / "kalman_trace.csv", reports.front());
  write_meta(out / "meta.json", config, reports, "reconstruct");
  return exit_status(reports);
}

int command_compare(const ExperimentConfig& config, const fs::path& out, const std::optional<fs::path>& data_path) {
  config.validate();
  fs::create_directories(out);
  const FarFieldSet data = obtain_data(config, out, data_path);
  const ForwardModel model = make_inversion_model(config);
  std::vector<ExperimentReport> reports;
  for (Algo algo : {Algo::FLM, Algo::KFL, Algo::EKF}) {
    ExperimentConfig c = config;
    c.algo = algo;
    reports.push_back(run_experiment(c, data, model));
    const fs::path sub = out / algo_name(algo);
    fs::create_directories(sub);
    write_iterates(sub, c, reports.back());
    if (c.verbose_trace && algo != Algo::FLM) write_trace_csv(sub / "kalman_trace.csv", reports.back());
  }
  write_mse_csv(out / "mse.csv", reports, config.timings);
  write_meta(out / "meta.json", config, reports, "compare");
  return exit_status(reports);
}

}  // namespace imscat
