#pragma once

#include "layerscat/dataset.hpp"
#include "layerscat/geometry.hpp"
#include "layerscat/inverse.hpp"

#include <complex>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace layerscat {

/// Far fields of the truth configuration at config.n_synth for every configured frequency,
/// on config.incident_count equispaced incident and config.n_obs equispaced observation
/// directions. Clean data (delta = 0).
Dataset synthesize(const ParametricCurve& outer, const ParametricCurve& inner, double lambda1,
                   const SolverConfig& config);

/// Counter-based 64-bit generator: the k-th output for a seed is the SplitMix64 finaliser
/// applied to seed + (k + 1) * 0x9e3779b97f4a7c15.
std::uint64_t splitmix64(std::uint64_t seed, std::uint64_t counter);
/// Uniform in (0, 1] from the top 53 bits.
double unit_uniform(std::uint64_t bits);
/// Standard complex Gaussian sample number `index` (real and imaginary parts N(0,1)) by
/// Box-Muller on counters 2 index and 2 index + 1.
std::complex<double> gaussian_pair(std::uint64_t seed, std::uint64_t index);

/// u + delta zeta |u| / |zeta| per (frequency, incident) column, columns visited in
/// frequency-major order and samples numbered consecutively. delta = 0 returns the input.
Dataset add_noise(const Dataset& clean, double delta, std::uint64_t seed);

/// Dataset CSV (header k0,d_index,d_angle_rad,obs_angle_rad,re,im) plus a JSON sidecar
/// `<path>.meta.json` holding delta and seed.
void write_dataset(const std::filesystem::path& path, const Dataset& data);
/// Reads the CSV and, when present, the sidecar. Throws ParseError with line context.
Dataset read_dataset(const std::filesystem::path& path);

/// Geometry and initial guess of a run, next to the solver settings.
struct CurveSpec {
  /// Preset name, or "starlike" for an explicit radius. Only circles and starlike curves
  /// take a centre.
  std::string kind = "circle";
  double radius = 1.0;
  Vec2 center = Vec2::Zero();
  std::vector<double> coeffs;

  ParametricCurve curve() const;
};

struct RunConfig {
  SolverConfig solver;
  CurveSpec truth_outer{"rounded_triangle", 1.0, Vec2::Zero(), {}};
  CurveSpec truth_inner{"apple", 1.0, Vec2::Zero(), {}};
  double truth_lambda1 = 1e8;
  double initial_outer_radius = 2.4;
  double initial_inner_radius = 0.5;
  Vec2 initial_inner_center = Vec2::Zero();
  double initial_lambda1 = 10.0;
  std::uint64_t seed = 0;

  /// Initial ShapeState with solver.modes modes.
  ShapeState initial_state() const;
};

/// JSON config. Top-level keys mirror SolverConfig fields (snake_case) plus "truth",
/// "initial" and "seed". Unknown keys are rejected; "frequencies" is required.
RunConfig parse_config(const std::string& json_text);
RunConfig read_config(const std::filesystem::path& path);
std::string config_to_json(const RunConfig& config);
/// Applies one `key=value` override; the value is parsed as JSON, falling back to a string.
/// Nested keys use dots, e.g. truth.lambda1=1e-8.
void apply_override(RunConfig& config, const std::string& assignment);

/// Trace JSON: per-iteration arrays and the final classification.
std::string trace_to_json(const ReconstructionTrace& trace, const ShapeState& final_state);
void write_trace(const std::filesystem::path& path, const ReconstructionTrace& trace,
                 const ShapeState& final_state);

/// Per-iteration shapes recovered from a trace file.
struct TraceShapes {
  std::vector<int> stage, iteration;
  std::vector<ShapeState> states;
};
TraceShapes read_trace_shapes(const std::filesystem::path& path);

/// CSV theta,x,y at `samples` equispaced parameter values.
void write_curve_csv(const std::filesystem::path& path, const ParametricCurve& curve,
                     int samples = 256);

/// Full precision text for a double.
std::string format_double(double v);

}  // namespace layerscat
