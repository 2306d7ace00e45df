#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "nhtopo/dilation.hpp"
#include "nhtopo/extraction.hpp"
#include "nhtopo/topology.hpp"

namespace nhtopo {

enum class Mode { exact, fit, dilated, noisy };
enum class NoiseDistribution { gaussian, uniform };

const char* to_string(Mode m) noexcept;
Mode parse_mode(const std::string& s);
const char* to_string(NoiseDistribution d) noexcept;
NoiseDistribution parse_distribution(const std::string& s);

struct ScenarioConfig {
  ModelParams model{1.0, 1.0, 0.0, 0.3, 0.5};
  int k_points = 25;
  int winding_grid = 721;
  double t_max = 3.0;
  int samples = 30;
  std::optional<double> eta0;  // auto-search when empty
  int trotter_slices = 1000;
  double noise_level = 0.0;
  NoiseDistribution distribution = NoiseDistribution::gaussian;
  std::optional<std::uint64_t> seed;
  double c_plus = 2.0;
  double c_minus = 1.0;
  Mode mode = Mode::exact;
  std::string out_dir = ".";
  int threads = 1;
  double coupling_hz = kDefaultCouplingHz;
  int fit_restarts = 8;

  void validate() const;  // throws ConfigError
};

ScenarioConfig scenario_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ScenarioConfig& c);
ScenarioConfig load_scenario(const std::string& path);

// Sample times snapped onto the Trotter slice grid: slice index round(i n / (N - 1)).
std::vector<int> sample_slices(const ScenarioConfig& c);
std::vector<double> sample_times(const ScenarioConfig& c);

struct KPointSeries {
  EigenSystem es;
  StateVec psi0;
  double eta0 = 0.0;
  TextureSeries measured;
  TextureSeries theory;  // exact non-unitary evolution at the same times
};

KPointSeries generate_series(const ScenarioConfig& c, double k, std::uint64_t k_index);

FitConfig fit_config_for(const ScenarioConfig& c, const KPointSeries& s, std::uint64_t k_index);

struct ScanRow {
  double k = 0.0;
  double phi_pp = 0.0;
  double phi_mm = 0.0;
  double re_phi = 0.0;
  cplx E;
  std::string status = "ok";
  double fit_rms = 0.0;
  double eta0 = 0.0;
};

struct RmsReport {
  double sigma_x = 0.0;
  double sigma_y = 0.0;
  std::size_t N = 0;
  std::string source;
};

struct ScanSummary {
  std::optional<IntegerInvariant> w_t;
  std::optional<IntegerInvariant> nu_E;
  std::string w_t_error;
  std::string nu_E_error;
  std::optional<WindingReport> model;
  std::string model_error;
  std::vector<double> failed_k;
  std::optional<RmsReport> rms;
};

struct ScanResult {
  ScenarioConfig config;
  std::vector<ScanRow> rows;
  ScanSummary summary;
};

ScanResult run_scan(const ScenarioConfig& c);

// B1, B2, B3 scaled by (1 + level g); g drawn per (seed, slice, field).
std::vector<PulseSlice> inject_pulse_noise(const std::vector<PulseSlice>& pulses, double level, std::uint64_t seed,
                                           NoiseDistribution dist = NoiseDistribution::gaussian);

double rms_error(const std::vector<double>& measured, const std::vector<double>& theory);

// Pooled over several series pairs.
RmsReport rms_report(const std::vector<TextureSeries>& measured, const std::vector<TextureSeries>& theory,
                     const std::string& source);

std::string format_number(double v);  // %.17g
void write_scan_csv(std::ostream& os, const ScanResult& r);
nlohmann::json summary_json(const ScanResult& r);
nlohmann::json to_json(const IntegerInvariant& v);
nlohmann::json to_json(const WindingReport& w);

// One record per slice: index B1 Phi1 B2 B3 tau1 tau2 tau3 [inv1 inv2 inv3]
void write_pulse_program(std::ostream& os, const std::vector<PulseSlice>& pulses, bool hardware = false);

enum class PhaseAxis { delta, hz, J1, J2 };
PhaseAxis parse_phase_axis(const std::string& s);
const char* to_string(PhaseAxis a) noexcept;

struct PhaseDiagramSpec {
  double j0_min = 0.0;
  double j0_max = 3.0;
  int nx = 31;
  PhaseAxis y_axis = PhaseAxis::delta;
  double y_min = 0.0;
  double y_max = 1.0;
  int ny = 21;
  int grid = 721;
  int threads = 1;
};

struct PhasePoint {
  double j0 = 0.0;
  double y = 0.0;
  long w_t = 0;
  long nu_E = 0;
  std::string status = "ok";
};

std::vector<PhasePoint> phase_diagram(const ModelParams& base, const PhaseDiagramSpec& spec);
void write_phase_csv(std::ostream& os, const std::vector<PhasePoint>& pts, PhaseAxis y_axis);

// Runs f(i) for i in [0, n) on `threads` workers; results must be stored by index.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& f);

}  // namespace nhtopo
