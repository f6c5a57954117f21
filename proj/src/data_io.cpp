#include "layerscat/data_io.hpp"

#include "layerscat/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>

namespace layerscat {

using nlohmann::json;

namespace {

constexpr double kPi = std::numbers::pi;

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  return out;
}

std::filesystem::path meta_path(const std::filesystem::path& csv) {
  return std::filesystem::path(csv.string() + ".meta.json");
}

double parse_number(std::string_view field, const std::string& where) {
  double v = 0.0;
  const auto* end = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(field.data(), end, v);
  if (ec != std::errc() || ptr != end)
    throw ParseError(where + ": cannot parse number '" + std::string(field) + "'");
  return v;
}

// json null stands for +inf (tau1 of a zero lambda1)
json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }
double number_from(const json& j) {
  return j.is_null() ? std::numeric_limits<double>::infinity() : j.get<double>();
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

Dataset synthesize(const ParametricCurve& outer, const ParametricCurve& inner, double lambda1,
                   const SolverConfig& config) {
  config.validate();
  validate_pair(outer, inner);
  Dataset out;
  out.frequencies = config.frequencies;
  out.incident_angles = equispaced_angles(config.incident_count);
  out.observation_angles = equispaced_angles(config.n_obs);
  const auto incident = out.incident_directions();
  const auto observation = out.observation_directions();
  for (double k0 : config.frequencies) {
    const MediumParams params =
        MediumParams::lambda_form(k0, config.n1, config.lambda0, lambda1, config.k2);
    const TransmissionSystem system(outer, inner, config.n_synth, params);
    out.values.push_back(sweep_far_fields(forward_sweep(system, incident, observation)));
  }
  return out;
}

std::uint64_t splitmix64(std::uint64_t seed, std::uint64_t counter) {
  std::uint64_t z = seed + (counter + 1) * 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double unit_uniform(std::uint64_t bits) {
  return static_cast<double>((bits >> 11) + 1) * 0x1.0p-53;
}

std::complex<double> gaussian_pair(std::uint64_t seed, std::uint64_t index) {
  const double u1 = unit_uniform(splitmix64(seed, 2 * index));
  const double u2 = unit_uniform(splitmix64(seed, 2 * index + 1));
  const double rad = std::sqrt(-2.0 * std::log(u1));
  return {rad * std::cos(2 * kPi * u2), rad * std::sin(2 * kPi * u2)};
}

Dataset add_noise(const Dataset& clean, double delta, std::uint64_t seed) {
  if (!(delta >= 0)) throw InputError("noise level must be nonnegative");
  clean.validate();
  Dataset out = clean;
  out.delta = delta;
  out.seed = seed;
  if (delta == 0.0) return out;
  std::uint64_t index = 0;
  for (auto& block : out.values) {
    for (Eigen::Index p = 0; p < block.cols(); ++p) {
      Eigen::VectorXcd zeta(block.rows());
      for (Eigen::Index i = 0; i < block.rows(); ++i) zeta[i] = gaussian_pair(seed, index++);
      // the 2 pi / n factor of the discrete norm cancels in the ratio
      block.col(p) += (delta * block.col(p).norm() / zeta.norm()) * zeta;
    }
  }
  return out;
}

void write_dataset(const std::filesystem::path& path, const Dataset& data) {
  data.validate();
  auto out = open_out(path);
  out << "k0,d_index,d_angle_rad,obs_angle_rad,re,im\n";
  for (std::size_t q = 0; q < data.frequencies.size(); ++q)
    for (std::size_t p = 0; p < data.incident_angles.size(); ++p)
      for (std::size_t i = 0; i < data.observation_angles.size(); ++i) {
        const auto v = data.values[q](i, p);
        out << format_double(data.frequencies[q]) << ',' << p << ','
            << format_double(data.incident_angles[p]) << ','
            << format_double(data.observation_angles[i]) << ',' << format_double(v.real())
            << ',' << format_double(v.imag()) << '\n';
      }
  json meta = {{"delta", data.delta},
               {"seed", data.seed},
               {"frequencies", data.frequencies},
               {"incident_count", data.incident_angles.size()},
               {"n_obs", data.observation_angles.size()}};
  open_out(meta_path(path)) << meta.dump(2) << '\n';
}

Dataset read_dataset(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != "k0,d_index,d_angle_rad,obs_angle_rad,re,im")
    throw ParseError(path.string() + ":1: expected header k0,d_index,d_angle_rad,obs_angle_rad,re,im");

  struct Row {
    double k0;
    std::size_t p;
    double d_angle, obs;
    std::complex<double> v;
  };
  std::vector<Row> rows;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const std::string where = path.string() + ":" + std::to_string(lineno);
    std::vector<std::string_view> f;
    std::string_view rest(line);
    for (;;) {
      const auto comma = rest.find(',');
      f.push_back(rest.substr(0, comma));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (f.size() != 6)
      throw ParseError(where + ": expected 6 fields, found " + std::to_string(f.size()));
    const double p = parse_number(f[1], where);
    if (p < 0 || p != std::floor(p)) throw ParseError(where + ": d_index must be a nonnegative integer");
    rows.push_back({parse_number(f[0], where), static_cast<std::size_t>(p), parse_number(f[2], where),
                    parse_number(f[3], where), {parse_number(f[4], where), parse_number(f[5], where)}});
  }
  if (rows.empty()) throw ParseError(path.string() + ": no data rows");

  Dataset d;
  std::map<double, std::size_t> freq_index, obs_index;
  std::map<std::size_t, double> incident;
  for (const auto& r : rows) {
    if (!freq_index.count(r.k0)) {
      freq_index[r.k0] = d.frequencies.size();
      d.frequencies.push_back(r.k0);
    }
    if (!obs_index.count(r.obs)) {
      obs_index[r.obs] = d.observation_angles.size();
      d.observation_angles.push_back(r.obs);
    }
    auto [it, fresh] = incident.emplace(r.p, r.d_angle);
    if (!fresh && it->second != r.d_angle)
      throw ParseError(path.string() + ": incident direction " + std::to_string(r.p) +
                       " has two different angles");
  }
  for (std::size_t p = 0; p < incident.size(); ++p) {
    if (!incident.count(p)) throw ParseError(path.string() + ": incident indices are not contiguous");
    d.incident_angles.push_back(incident[p]);
  }
  const auto nq = d.frequencies.size(), np = d.incident_angles.size(),
             no = d.observation_angles.size();
  if (rows.size() != nq * np * no)
    throw ParseError(path.string() + ": expected " + std::to_string(nq * np * no) +
                     " rows for a full grid, found " + std::to_string(rows.size()));
  d.values.assign(nq, Eigen::MatrixXcd::Constant(no, np, std::nan("")));
  for (const auto& r : rows) d.values[freq_index[r.k0]](obs_index[r.obs], r.p) = r.v;
  for (const auto& b : d.values)
    if (b.hasNaN()) throw ParseError(path.string() + ": duplicate or missing samples");

  if (std::filesystem::exists(meta_path(path))) {
    try {
      const json meta = json::parse(slurp(meta_path(path)));
      d.delta = meta.value("delta", 0.0);
      d.seed = meta.value("seed", std::uint64_t{0});
    } catch (const json::exception& e) {
      throw ParseError(meta_path(path).string() + ": " + e.what());
    }
  }
  d.validate();
  return d;
}

ParametricCurve CurveSpec::curve() const {
  if (kind == "starlike") {
    if (coeffs.empty()) throw ConfigError("starlike curve needs coeffs");
    return ParametricCurve(StarlikeShape(center, coeffs));
  }
  if (!center.isZero()) {
    if (kind != "circle") throw ConfigError("preset '" + kind + "' cannot be shifted");
    return ParametricCurve(StarlikeShape::circle(center, radius, 0));
  }
  return ParametricCurve::preset(kind, radius);
}

ShapeState RunConfig::initial_state() const {
  const int m = solver.modes;
  return ShapeState(StarlikeShape::circle(Vec2::Zero(), initial_outer_radius, m),
                    StarlikeShape::circle(initial_inner_center, initial_inner_radius, m),
                    initial_lambda1);
}

namespace {

json curve_to_json(const CurveSpec& c) {
  json j = {{"kind", c.kind}};
  if (c.kind == "circle" || c.kind == "starlike") j["center"] = {c.center.x(), c.center.y()};
  if (c.kind == "circle") j["radius"] = c.radius;
  if (c.kind == "starlike") j["coeffs"] = c.coeffs;
  return j;
}

// Reads keys of `j` through `take`, then rejects whatever was not consumed.
class KeyReader {
 public:
  KeyReader(const json& j, std::string scope) : j_(j), scope_(std::move(scope)) {
    if (!j.is_object()) throw ConfigError(name("") + " must be a JSON object");
  }

  template <class T>
  void take(const std::string& key, T& target, bool required = false) {
    if (!j_.contains(key)) {
      if (required) throw ConfigError("missing required config key '" + name(key) + "'");
      return;
    }
    seen_.push_back(key);
    try {
      target = j_.at(key).get<T>();
    } catch (const json::exception&) {
      throw ConfigError("config key '" + name(key) + "' has the wrong type");
    }
  }
  const json* get(const std::string& key, bool required = false) {
    if (!j_.contains(key)) {
      if (required) throw ConfigError("missing required config key '" + name(key) + "'");
      return nullptr;
    }
    seen_.push_back(key);
    return &j_.at(key);
  }
  void finish() const {
    for (const auto& [key, value] : j_.items())
      if (std::find(seen_.begin(), seen_.end(), key) == seen_.end())
        throw ConfigError("unknown config key '" + name(key) + "'");
  }
  std::string name(const std::string& key) const {
    return scope_.empty() ? key : key.empty() ? scope_ : scope_ + "." + key;
  }

 private:
  const json& j_;
  std::string scope_;
  std::vector<std::string> seen_;
};

Vec2 vec2_from(const json& j, const std::string& key) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw ConfigError("config key '" + key + "' must be a two-element array");
  return {j[0].get<double>(), j[1].get<double>()};
}

CurveSpec curve_from_json(const json& j, const std::string& scope) {
  CurveSpec c;
  if (j.is_string()) {
    c.kind = j.get<std::string>();
  } else {
    KeyReader r(j, scope);
    r.take("kind", c.kind, true);
    r.take("radius", c.radius);
    r.take("coeffs", c.coeffs);
    if (const json* ctr = r.get("center")) c.center = vec2_from(*ctr, r.name("center"));
    r.finish();
  }
  if (c.kind != "starlike") preset_from_name(c.kind);  // throws ConfigError for unknown names
  return c;
}

json run_to_json(const RunConfig& c) {
  const SolverConfig& s = c.solver;
  json center;
  switch (s.center.mode) {
    case CenterSchedule::Mode::always: center = "always"; break;
    case CenterSchedule::Mode::never: center = "never"; break;
    case CenterSchedule::Mode::first: center = s.center.count; break;
  }
  return {{"n1", s.n1},
          {"lambda0", s.lambda0},
          {"s", s.s},
          {"modes", s.modes},
          {"rho", s.rho},
          {"tau", s.tau},
          {"lambda_switch", s.lambda_switch},
          {"delta", s.delta},
          {"max_iterations", s.max_iterations},
          {"frequencies", s.frequencies},
          {"incident_count", s.incident_count},
          {"n_obs", s.n_obs},
          {"n_solve", s.n_solve},
          {"n_synth", s.n_synth},
          {"center_updates", center},
          {"k2", s.k2 ? json(*s.k2) : json(nullptr)},
          {"seed", c.seed},
          {"truth",
           {{"outer", curve_to_json(c.truth_outer)},
            {"inner", curve_to_json(c.truth_inner)},
            {"lambda1", c.truth_lambda1}}},
          {"initial",
           {{"outer_radius", c.initial_outer_radius},
            {"inner_radius", c.initial_inner_radius},
            {"inner_center", {c.initial_inner_center.x(), c.initial_inner_center.y()}},
            {"lambda1", c.initial_lambda1}}}};
}

RunConfig run_from_json(const json& j) {
  RunConfig c;
  SolverConfig& s = c.solver;
  KeyReader r(j, "");
  r.take("n1", s.n1);
  r.take("lambda0", s.lambda0);
  r.take("s", s.s);
  r.take("modes", s.modes);
  r.take("rho", s.rho);
  r.take("tau", s.tau);
  r.take("lambda_switch", s.lambda_switch);
  r.take("delta", s.delta);
  r.take("max_iterations", s.max_iterations);
  r.take("frequencies", s.frequencies, true);
  r.take("incident_count", s.incident_count);
  r.take("n_obs", s.n_obs);
  r.take("n_solve", s.n_solve);
  r.take("n_synth", s.n_synth);
  r.take("seed", c.seed);
  if (const json* k2 = r.get("k2"); k2 && !k2->is_null()) {
    if (!k2->is_number()) throw ConfigError("config key 'k2' must be a number or null");
    s.k2 = k2->get<double>();
  }
  if (const json* cu = r.get("center_updates")) {
    if (cu->is_string() && *cu == "always") {
      s.center = {CenterSchedule::Mode::always, 0};
    } else if (cu->is_string() && *cu == "never") {
      s.center = {CenterSchedule::Mode::never, 0};
    } else if (cu->is_number_integer()) {
      s.center = {CenterSchedule::Mode::first, cu->get<int>()};
    } else {
      throw ConfigError("config key 'center_updates' must be \"always\", \"never\" or an integer");
    }
  }
  if (const json* t = r.get("truth")) {
    KeyReader tr(*t, "truth");
    c.truth_outer = curve_from_json(*tr.get("outer", true), "truth.outer");
    c.truth_inner = curve_from_json(*tr.get("inner", true), "truth.inner");
    tr.take("lambda1", c.truth_lambda1, true);
    tr.finish();
  }
  if (const json* in = r.get("initial")) {
    KeyReader ir(*in, "initial");
    ir.take("outer_radius", c.initial_outer_radius);
    ir.take("inner_radius", c.initial_inner_radius);
    if (const json* ctr = ir.get("inner_center"))
      c.initial_inner_center = vec2_from(*ctr, "initial.inner_center");
    ir.take("lambda1", c.initial_lambda1);
    ir.finish();
  }
  r.finish();
  s.validate();
  return c;
}

json state_to_json(const ShapeState& st) {
  return {{"r0", st.gamma0.coeffs()},
          {"r1", st.gamma1.coeffs()},
          {"center", {st.gamma1.center().x(), st.gamma1.center().y()}},
          {"lambda1", number_or_null(st.lambda1)},
          {"tau1", number_or_null(st.tau1)}};
}

ShapeState state_from_json(const json& j) {
  ShapeState st(StarlikeShape(Vec2::Zero(), j.at("r0").get<std::vector<double>>()),
                StarlikeShape(vec2_from(j.at("center"), "center"),
                              j.at("r1").get<std::vector<double>>()),
                1.0);
  st.lambda1 = number_from(j.at("lambda1"));
  st.tau1 = number_from(j.at("tau1"));
  return st;
}

}  // namespace

RunConfig parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("config is not valid JSON: ") + e.what());
  }
  return run_from_json(j);
}

RunConfig read_config(const std::filesystem::path& path) {
  try {
    return parse_config(slurp(path));
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

std::string config_to_json(const RunConfig& config) { return run_to_json(config).dump(2); }

void apply_override(RunConfig& config, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0)
    throw ConfigError("override '" + assignment + "' is not of the form key=value");
  const std::string key = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  json value;
  try {
    value = json::parse(text);
  } catch (const json::parse_error&) {
    value = text;
  }
  json j = run_to_json(config);
  json* node = &j;
  std::string_view rest(key);
  for (;;) {
    const auto dot = rest.find('.');
    const std::string part(rest.substr(0, dot));
    if (!node->is_object() || !node->contains(part))
      throw ConfigError("unknown config key '" + key + "'");
    node = &(*node)[part];
    if (dot == std::string_view::npos) break;
    rest.remove_prefix(dot + 1);
  }
  *node = value;
  config = run_from_json(j);
}

std::string trace_to_json(const ReconstructionTrace& trace, const ShapeState& final_state) {
  json iters = json::array();
  for (const auto& r : trace.iterations) {
    json it = state_to_json(r.state);
    it["stage"] = r.stage;
    it["k0"] = r.k0;
    it["iteration"] = r.iteration;
    it["err"] = r.err;
    it["beta"] = number_or_null(r.beta);
    it["infeasible"] = r.infeasible;
    it["form"] = r.form == TransmissionForm::lambda ? "lambda" : "tau";
    it["form_switched"] = r.form_switched;
    it["halvings"] = r.halvings;
    iters.push_back(std::move(it));
  }
  json stages = json::array();
  for (const auto& s : trace.stages) {
    json st = {{"k0", s.k0}, {"iterations", s.iterations}, {"err", s.err},
               {"stop_reason", s.stop_reason}};
    if (s.final_state) st["final_state"] = state_to_json(*s.final_state);
    stages.push_back(std::move(st));
  }
  json fin = state_to_json(final_state);
  fin["classification"] = std::string(boundary_class_name(classify_boundary(final_state)));
  return json{{"iterations", iters}, {"stages", stages}, {"final", fin}}.dump(2);
}

void write_trace(const std::filesystem::path& path, const ReconstructionTrace& trace,
                 const ShapeState& final_state) {
  open_out(path) << trace_to_json(trace, final_state) << '\n';
}

TraceShapes read_trace_shapes(const std::filesystem::path& path) {
  TraceShapes out;
  try {
    const json j = json::parse(slurp(path));
    for (const auto& it : j.at("iterations")) {
      out.stage.push_back(it.at("stage").get<int>());
      out.iteration.push_back(it.at("iteration").get<int>());
      out.states.push_back(state_from_json(it));
    }
  } catch (const json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  return out;
}

void write_curve_csv(const std::filesystem::path& path, const ParametricCurve& curve,
                     int samples) {
  if (samples < 1) throw InputError("need at least one curve sample");
  auto out = open_out(path);
  out << "theta,x,y\n";
  for (int i = 0; i < samples; ++i) {
    const double t = 2 * kPi * i / samples;
    const Vec2 p = curve.point(t);
    out << format_double(t) << ',' << format_double(p.x()) << ',' << format_double(p.y()) << '\n';
  }
}

}  // namespace layerscat
