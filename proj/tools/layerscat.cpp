// layerscat: synthetic data, forward solves, reconstruction and plot data for the
// two-layer transmission problem.

#include "layerscat/data_io.hpp"
#include "layerscat/errors.hpp"
#include "layerscat/frechet.hpp"
#include "layerscat/inverse.hpp"

#include <CLI11.hpp>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace layerscat;

namespace {

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  int threads = 0;
  std::string out = ".";
  std::vector<std::string> overrides;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config, "JSON run configuration");
  cmd->add_option("--seed", c.seed, "noise seed (overrides the config)");
  cmd->add_option("--threads", c.threads, "worker threads, 0 = all cores")->check(CLI::NonNegativeNumber);
  cmd->add_option("--out", c.out, "output directory");
  cmd->add_option("--set", c.overrides, "override a config key, key=value")->take_all();
}

RunConfig load(const Common& c) {
  RunConfig cfg;
  if (!c.config.empty()) cfg = read_config(c.config);
  for (const auto& o : c.overrides) apply_override(cfg, o);
  if (c.seed) cfg.seed = *c.seed;
#ifdef _OPENMP
  if (c.threads > 0) omp_set_num_threads(c.threads);
#endif
  return cfg;
}

ParametricCurve truth_outer(const RunConfig& cfg) { return cfg.truth_outer.curve(); }
ParametricCurve truth_inner(const RunConfig& cfg) { return cfg.truth_inner.curve(); }

int run_synth(const Common& c) {
  const RunConfig cfg = load(c);
  const Dataset clean =
      synthesize(truth_outer(cfg), truth_inner(cfg), cfg.truth_lambda1, cfg.solver);
  const Dataset noisy = add_noise(clean, cfg.solver.delta, cfg.seed);
  const fs::path path = fs::path(c.out) / "dataset.csv";
  write_dataset(path, noisy);
  std::printf("wrote %s (%zu frequencies, %zu incident, %zu observation directions, delta %g)\n",
              path.c_str(), noisy.frequencies.size(), noisy.incident_angles.size(),
              noisy.observation_angles.size(), noisy.delta);
  return 0;
}

int run_forward(const Common& c) {
  RunConfig cfg = load(c);
  // forward solves use the solving resolution, not the synthesis one
  cfg.solver.n_synth = cfg.solver.n_solve;
  const Dataset d = synthesize(truth_outer(cfg), truth_inner(cfg), cfg.truth_lambda1, cfg.solver);
  const fs::path path = fs::path(c.out) / "far_field.csv";
  write_dataset(path, d);
  for (std::size_t q = 0; q < d.frequencies.size(); ++q)
    for (std::size_t p = 0; p < d.incident_angles.size(); ++p)
      std::printf("k0 %g  d %zu  |u_inf|_2 %.10g\n", d.frequencies[q], p,
                  std::sqrt(discrete_l2_sq(d.values[q].col(p))));
  std::printf("wrote %s\n", path.c_str());
  return 0;
}

int run_invert(const Common& c, const std::string& data_path) {
  const RunConfig cfg = load(c);
  Dataset data;
  if (!data_path.empty()) {
    data = read_dataset(data_path);
  } else {
    data = add_noise(synthesize(truth_outer(cfg), truth_inner(cfg), cfg.truth_lambda1, cfg.solver),
                     cfg.solver.delta, cfg.seed);
  }
  if (static_cast<int>(data.observation_angles.size()) != cfg.solver.n_obs)
    std::fprintf(stderr, "note: dataset has %zu observation directions\n",
                 data.observation_angles.size());
  ReconstructionTrace trace;
  const ShapeState final_state = multi_frequency_drive(cfg.initial_state(), data, cfg.solver, trace);
  for (const auto& s : trace.stages)
    std::printf("k0 %g: %d iterations, Err %.6g, stop %s\n", s.k0, s.iterations, s.err,
                s.stop_reason.c_str());
  std::printf("lambda1 %.6g  tau1 %.6g  classification %s\n", final_state.lambda1,
              final_state.tau1, std::string(boundary_class_name(classify_boundary(final_state))).c_str());
  const fs::path out(c.out);
  write_trace(out / "trace.json", trace, final_state);
  write_curve_csv(out / "outer.csv", final_state.curve0());
  write_curve_csv(out / "inner.csv", final_state.curve1());
  if (data_path.empty()) {
    write_curve_csv(out / "truth_outer.csv", truth_outer(cfg));
    write_curve_csv(out / "truth_inner.csv", truth_inner(cfg));
  }
  std::printf("wrote %s\n", (out / "trace.json").c_str());
  return 0;
}

int run_check_derivative(const Common& c, const std::string& at, double step) {
  const RunConfig cfg = load(c);
  const SolverConfig& s = cfg.solver;
  ShapeState state = cfg.initial_state();
  if (at == "truth")
    state = ShapeState(polar_projection(truth_outer(cfg), s.modes),
                       polar_projection(truth_inner(cfg), s.modes), cfg.truth_lambda1);
  state.active_form = std::abs(state.lambda1) <= s.lambda_switch ? TransmissionForm::lambda
                                                                  : TransmissionForm::tau;
  const auto incident = equispaced_directions(s.incident_count);
  const auto observation = equispaced_directions(s.n_obs);
  const ParameterLayout layout{s.modes, true};
  const double k0 = s.frequencies.front();
  const auto analytic =
      jacobian(state, s.medium(), k0, s.n_solve, incident, observation, layout, {}).jacobian;
  const auto fd = finite_difference_jacobian(state, s.medium(), k0, s.n_solve, incident,
                                             observation, layout, step);
  std::printf("columns %d  step %g  max relative column error %.6e\n", layout.size(), step,
              max_relative_column_error(analytic, fd));
  return 0;
}

int run_export_plot(const Common& c, const std::string& trace_path) {
  load(c);
  const TraceShapes shapes = read_trace_shapes(trace_path);
  const fs::path out(c.out);
  for (std::size_t i = 0; i < shapes.states.size(); ++i) {
    const std::string stem =
        "stage" + std::to_string(shapes.stage[i]) + "_iter" + std::to_string(shapes.iteration[i]);
    write_curve_csv(out / (stem + "_outer.csv"), shapes.states[i].curve0());
    write_curve_csv(out / (stem + "_inner.csv"), shapes.states[i].curve1());
  }
  std::printf("wrote %zu curve pairs to %s\n", shapes.states.size(), out.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-layer transmission scattering: forward solver and shape reconstruction"};
  app.require_subcommand(1);
  app.failure_message(CLI::FailureMessage::help);

  Common common;
  auto* synth = app.add_subcommand("synth", "write a synthetic (optionally noisy) dataset");
  auto* forward = app.add_subcommand("forward", "far field of the truth geometry at n_solve");
  auto* invert = app.add_subcommand("invert", "multi-frequency reconstruction");
  auto* check = app.add_subcommand("check-derivative", "Jacobian vs central finite differences");
  auto* plot = app.add_subcommand("export-plot", "per-iteration curve CSVs from a trace");
  for (auto* cmd : {synth, forward, invert, check, plot}) add_common(cmd, common);

  std::string data_path, at = "initial", trace_path;
  double step = 1e-3;
  invert->add_option("--data", data_path, "dataset CSV; synthesised from the config if omitted");
  check->add_option("--at", at, "evaluation point")->check(CLI::IsMember({"initial", "truth"}));
  check->add_option("--step", step, "finite-difference step")->check(CLI::PositiveNumber);
  plot->add_option("--trace", trace_path, "trace JSON written by invert")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (synth->parsed()) return run_synth(common);
    if (forward->parsed()) return run_forward(common);
    if (invert->parsed()) return run_invert(common, data_path);
    if (check->parsed()) return run_check_derivative(common, at, step);
    if (plot->parsed()) return run_export_plot(common, trace_path);
  } catch (const InputError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const NumericalError& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return 2;
  } catch (const std::filesystem::filesystem_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 1;
}
