#include <cmath>
#include <fstream>
#include <set>

#include "nhtopo/errors.hpp"
#include "nhtopo/pipeline.hpp"

namespace nhtopo {

using nlohmann::json;

const char* to_string(Mode m) noexcept {
  switch (m) {
    case Mode::exact: return "exact";
    case Mode::fit: return "fit";
    case Mode::dilated: return "dilated";
    case Mode::noisy: return "noisy";
  }
  return "unknown";
}

Mode parse_mode(const std::string& s) {
  if (s == "exact") return Mode::exact;
  if (s == "fit") return Mode::fit;
  if (s == "dilated") return Mode::dilated;
  if (s == "noisy" || s == "dilated+noise") return Mode::noisy;
  throw ConfigError("unknown mode '" + s + "' (expected exact, fit, dilated or noisy)");
}

const char* to_string(NoiseDistribution d) noexcept {
  return d == NoiseDistribution::gaussian ? "gaussian" : "uniform";
}

NoiseDistribution parse_distribution(const std::string& s) {
  if (s == "gaussian") return NoiseDistribution::gaussian;
  if (s == "uniform") return NoiseDistribution::uniform;
  throw ConfigError("unknown noise distribution '" + s + "'");
}

void ScenarioConfig::validate() const {
  auto finite = [](double v) { return std::isfinite(v); };
  if (!finite(model.J0) || !finite(model.J1) || !finite(model.J2) || !finite(model.delta) || !finite(model.hz))
    throw ConfigError("model parameters must be finite");
  if (k_points < 8) throw ConfigError("k_points must be at least 8");
  if (winding_grid < 8) throw ConfigError("winding_grid must be at least 8");
  if (!(t_max > 0) || !finite(t_max)) throw ConfigError("t_max must be positive");
  if (samples < 2) throw ConfigError("samples must be at least 2");
  if (mode != Mode::exact && samples < 12) throw ConfigError("fitting needs at least 12 samples");
  if (trotter_slices < 1) throw ConfigError("trotter_slices must be positive");
  if (trotter_slices < samples - 1) throw ConfigError("trotter_slices must be at least samples - 1");
  if (eta0 && !(*eta0 > 0)) throw ConfigError("eta0 must be positive");
  if (!(noise_level >= 0) || !finite(noise_level)) throw ConfigError("noise_level must be non-negative");
  if (noise_level > 0 && !seed) throw ConfigError("a seed is required when noise_level > 0");
  if (!finite(c_plus) || !finite(c_minus) || (c_plus == 0 && c_minus == 0))
    throw ConfigError("initial-state coefficients must be finite and not both zero");
  if (threads < 1) throw ConfigError("threads must be at least 1");
  if (coupling_hz == 0 || !finite(coupling_hz)) throw ConfigError("coupling_hz must be nonzero");
  if (fit_restarts < 1) throw ConfigError("fit_restarts must be at least 1");
}

namespace {

template <class T>
T get(const json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config key '") + key + "': " + e.what());
  }
}

}  // namespace

ScenarioConfig scenario_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  static const std::set<std::string> known{
      "model", "k_points", "winding_grid", "t_max", "samples", "eta0", "trotter_slices", "noise_level",
      "noise_distribution", "seed", "c_plus", "c_minus", "mode", "out_dir", "threads", "coupling_hz",
      "fit_restarts"};
  for (const auto& [key, _] : j.items())
    if (!known.count(key)) throw ConfigError("unknown config key '" + key + "'");

  ScenarioConfig c;
  if (j.contains("model")) {
    const json& m = j.at("model");
    if (!m.is_object()) throw ConfigError("'model' must be an object");
    for (const auto& [key, _] : m.items())
      if (key != "J0" && key != "J1" && key != "J2" && key != "delta" && key != "hz")
        throw ConfigError("unknown model key '" + key + "'");
    if (m.contains("J0")) c.model.J0 = get<double>(m, "J0");
    if (m.contains("J1")) c.model.J1 = get<double>(m, "J1");
    if (m.contains("J2")) c.model.J2 = get<double>(m, "J2");
    if (m.contains("delta")) c.model.delta = get<double>(m, "delta");
    if (m.contains("hz")) c.model.hz = get<double>(m, "hz");
  }
  if (j.contains("k_points")) c.k_points = get<int>(j, "k_points");
  if (j.contains("winding_grid")) c.winding_grid = get<int>(j, "winding_grid");
  if (j.contains("t_max")) c.t_max = get<double>(j, "t_max");
  if (j.contains("samples")) c.samples = get<int>(j, "samples");
  if (j.contains("eta0")) {
    const json& e = j.at("eta0");
    if (e.is_null() || (e.is_string() && e.get<std::string>() == "auto"))
      c.eta0.reset();
    else
      c.eta0 = get<double>(j, "eta0");
  }
  if (j.contains("trotter_slices")) c.trotter_slices = get<int>(j, "trotter_slices");
  if (j.contains("noise_level")) c.noise_level = get<double>(j, "noise_level");
  if (j.contains("noise_distribution")) c.distribution = parse_distribution(get<std::string>(j, "noise_distribution"));
  if (j.contains("seed") && !j.at("seed").is_null()) c.seed = get<std::uint64_t>(j, "seed");
  if (j.contains("c_plus")) c.c_plus = get<double>(j, "c_plus");
  if (j.contains("c_minus")) c.c_minus = get<double>(j, "c_minus");
  if (j.contains("mode")) c.mode = parse_mode(get<std::string>(j, "mode"));
  if (j.contains("out_dir")) c.out_dir = get<std::string>(j, "out_dir");
  if (j.contains("threads")) c.threads = get<int>(j, "threads");
  if (j.contains("coupling_hz")) c.coupling_hz = get<double>(j, "coupling_hz");
  if (j.contains("fit_restarts")) c.fit_restarts = get<int>(j, "fit_restarts");
  c.validate();
  return c;
}

json to_json(const ScenarioConfig& c) {
  json j;
  j["model"] = {{"J0", c.model.J0}, {"J1", c.model.J1}, {"J2", c.model.J2}, {"delta", c.model.delta},
                {"hz", c.model.hz}};
  j["k_points"] = c.k_points;
  j["winding_grid"] = c.winding_grid;
  j["t_max"] = c.t_max;
  j["samples"] = c.samples;
  j["eta0"] = c.eta0 ? json(*c.eta0) : json("auto");
  j["trotter_slices"] = c.trotter_slices;
  j["noise_level"] = c.noise_level;
  j["noise_distribution"] = to_string(c.distribution);
  j["seed"] = c.seed ? json(*c.seed) : json(nullptr);
  j["c_plus"] = c.c_plus;
  j["c_minus"] = c.c_minus;
  j["mode"] = to_string(c.mode);
  j["out_dir"] = c.out_dir;
  j["threads"] = c.threads;
  j["coupling_hz"] = c.coupling_hz;
  j["fit_restarts"] = c.fit_restarts;
  return j;
}

ScenarioConfig load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("config '" + path + "' is not valid JSON: " + e.what());
  }
  return scenario_from_json(j);
}

}  // namespace nhtopo
