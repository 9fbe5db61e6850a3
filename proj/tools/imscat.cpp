// Command line front end: forward / reconstruct / compare.
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "imscat/harness.hpp"

namespace {

struct Options {
  imscat::ExperimentConfig config;
  std::string shape = "b1";
  std::string algo = "kfl";
  std::string out = "out";
  std::string data;
};

void add_common(CLI::App& app, Options& o) {
  auto& c = o.config;
  app.add_option("--k", c.k, "Wavenumber")->capture_default_str();
  app.add_option("--shape", o.shape, "True medium: b1 or b2")->capture_default_str();
  app.add_option("--contrast", c.contrast, "Contrast value inside the shape")->capture_default_str();
  app.add_option("--sigma", c.sigma, "Noise standard deviation per real/imaginary part")->capture_default_str();
  app.add_option("--rho", c.rho, "Discrepancy constant for FLM/KFL")->capture_default_str();
  app.add_option("--alpha0", c.alpha0, "Initial regularization for EKF")->capture_default_str();
  app.add_option("--iters", c.iters, "Outer iterations")->capture_default_str();
  app.add_option("--seed", c.seed, "Noise seed")->capture_default_str();
  app.add_option("--out", o.out, "Output directory")->capture_default_str();
  app.add_flag("--inverse-crime", c.inverse_crime, "Generate data on the inversion grid");
  app.add_option("--fine-grid", c.fine_grid, "Inversion fine-grid nodes per axis (power of two)")->capture_default_str();
  app.add_option("--period", c.period_factor, "Periodization cell side in units of S")->capture_default_str();
  app.add_option("--solver-tol", c.solver_tol, "GMRES relative tolerance")->capture_default_str();
  app.add_option("--r", c.r, "Observation weight scale, R = r^2 I")->capture_default_str();
  app.add_option("--M", c.M, "Cells per half axis")->capture_default_str();
  app.add_option("--S", c.S, "Half width of the domain")->capture_default_str();
  app.add_option("--J", c.J, "Observation directions")->capture_default_str();
  app.add_option("--N", c.N, "Incident directions")->capture_default_str();
  app.add_flag("--verbose-trace", c.verbose_trace, "Write kalman_trace.csv");
  app.add_flag("--png", c.png, "Write medium_iter_<i>.png heatmaps");
  app.add_flag("--timings", c.timings, "Fill the seconds column of mse.csv");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Inverse medium scattering: data generation and FLM / KFL / EKF reconstruction"};
  app.set_config("--config", "", "TOML/INI file with the same keys as the flags; flags override it");
  app.require_subcommand(1);

  Options opts;
  add_common(app, opts);
  auto* forward = app.add_subcommand("forward", "Generate far-field data");
  auto* reconstruct = app.add_subcommand("reconstruct", "Run one reconstruction algorithm");
  reconstruct->add_option("--algo", opts.algo, "flm, kfl or ekf")->capture_default_str();
  reconstruct->add_option("--data", opts.data, "farfield.csv (or its directory) to invert instead of generating");
  auto* compare = app.add_subcommand("compare", "Run FLM, KFL and EKF on shared data");
  compare->add_option("--data", opts.data, "farfield.csv (or its directory) to invert instead of generating");
  for (auto* sub : {forward, reconstruct, compare}) sub->fallthrough();

  CLI11_PARSE(app, argc, argv);

  try {
    opts.config.shape = imscat::parse_shape(opts.shape);
    opts.config.algo = imscat::parse_algo(opts.algo);
    std::optional<std::filesystem::path> data;
    if (!opts.data.empty()) data = opts.data;
    int status = 0;
    if (*forward) {
      status = imscat::command_forward(opts.config, opts.out);
    } else if (*reconstruct) {
      status = imscat::command_reconstruct(opts.config, opts.out, data);
    } else {
      status = imscat::command_compare(opts.config, opts.out, data);
    }
    if (status == 2) std::cerr << "warning: blow-up detected; see " << opts.out << "/meta.json\n";
    if (status == 3) std::cerr << "error: a stage failed; see " << opts.out << "/meta.json\n";
    return status;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
