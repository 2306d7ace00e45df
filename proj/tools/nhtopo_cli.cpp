#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "nhtopo/errors.hpp"
#include "nhtopo/pipeline.hpp"

using namespace nhtopo;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

json cjson(cplx z) { return json::array({z.real(), z.imag()}); }
json vjson(const Vec2& v) { return json::array({cjson(v(0)), cjson(v(1))}); }
json tjson(const Texture& t) { return json::array({t.x, t.y, t.z}); }

// Flags shared by the model-driven subcommands. Values left unset fall back to
// the config file (if any) and then to the built-in defaults.
struct Common {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<int> grid;
  std::optional<std::string> mode;
  std::optional<double> noise;
  std::optional<int> threads;
  std::optional<double> J0, J1, J2, delta, hz;
  std::optional<int> k_points, samples, slices;
  std::optional<double> t_max, eta0;

  void add(CLI::App* app, bool scenario_flags = true) {
    app->add_option("--config", config, "JSON scenario file")->check(CLI::ExistingFile);
    app->add_option("--out", out, "output directory");
    app->add_option("--J0", J0);
    app->add_option("--J1", J1);
    app->add_option("--J2", J2);
    app->add_option("--delta", delta);
    app->add_option("--hz", hz);
    app->add_option("--grid", grid, "winding integration grid");
    if (!scenario_flags) return;
    app->add_option("--seed", seed);
    app->add_option("--mode", mode, "exact, fit, dilated or noisy");
    app->add_option("--noise", noise, "relative pulse noise level");
    app->add_option("--threads", threads);
    app->add_option("--k-points", k_points);
    app->add_option("--samples", samples);
    app->add_option("--slices", slices, "Trotter slices");
    app->add_option("--t-max", t_max);
    app->add_option("--eta0", eta0);
  }

  ScenarioConfig scenario() const {
    json j = config.empty() ? json::object() : to_json(load_scenario(config));
    auto set = [&](const char* key, const auto& v) {
      if (v) j[key] = *v;
    };
    auto set_model = [&](const char* key, const std::optional<double>& v) {
      if (v) j["model"][key] = *v;
    };
    set_model("J0", J0);
    set_model("J1", J1);
    set_model("J2", J2);
    set_model("delta", delta);
    set_model("hz", hz);
    set("seed", seed);
    set("winding_grid", grid);
    set("mode", mode);
    set("noise_level", noise);
    set("threads", threads);
    set("k_points", k_points);
    set("samples", samples);
    set("trotter_slices", slices);
    set("t_max", t_max);
    set("eta0", eta0);
    if (!out.empty()) j["out_dir"] = out;
    return scenario_from_json(j);
  }
};

std::ostream& open_output(const std::string& dir, const std::string& name, std::ofstream& file) {
  if (dir.empty()) return std::cout;
  fs::create_directories(dir);
  const fs::path p = fs::path(dir) / name;
  file.open(p);
  if (!file) throw ConfigError("cannot write '" + p.string() + "'");
  std::cerr << "wrote " << p.string() << '\n';
  return file;
}

void write_series_csv(std::ostream& os, const TextureSeries& s) {
  os << "t,sx,sy" << (s.has_sz() ? ",sz" : "") << '\n';
  for (std::size_t i = 0; i < s.size(); ++i) {
    os << format_number(s.times[i]) << ',' << format_number(s.sx[i]) << ',' << format_number(s.sy[i]);
    if (s.has_sz()) os << ',' << format_number(s.sz[i]);
    os << '\n';
  }
}

TextureSeries read_series_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open series '" + path + "'");
  TextureSeries s;
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string cell;
    std::vector<double> v;
    while (std::getline(row, cell, ',')) {
      try {
        v.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw ConfigError("bad number '" + cell + "' in " + path);
      }
    }
    if (v.size() < 3) throw ConfigError("series rows need t,sx,sy in " + path);
    s.times.push_back(v[0]);
    s.sx.push_back(v[1]);
    s.sy.push_back(v[2]);
  }
  return s;
}

json fit_json(const FitResult& f) {
  json j{{"E", cjson(f.model.E)},
         {"E_minus", cjson(f.model.E_minus)},
         {"v_plus", vjson(f.model.v_plus)},
         {"v_minus", vjson(f.model.v_minus)},
         {"texture_plus", tjson(f.tex_plus)},
         {"texture_minus", tjson(f.tex_minus)},
         {"phi_pp", f.phi_pp},
         {"phi_mm", f.phi_mm},
         {"residual_rms", f.residual_rms},
         {"converged", f.converged},
         {"restarts", f.restarts},
         {"iterations", f.iterations},
         {"mirrored", f.mirrored}};
  try {
    j["re_phi"] = re_phi_from_fit(f);
  } catch (const NumericalError& e) {
    j["re_phi"] = nullptr;
    j["re_phi_error"] = e.what();
  }
  return j;
}

DilatedSchedule schedule_for(const ScenarioConfig& c, double k, double* eta0_out) {
  const ComplexField h = eval_field(c.model, k);
  const double eta0 = c.eta0 ? *c.eta0 : auto_eta0(eigensystem(h), c.t_max);
  if (eta0_out) *eta0_out = eta0;
  DilatedSchedule s = dilated_schedule(h, eta0, c.t_max / c.trotter_slices, c.trotter_slices);
  s.k = k;
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Non-Hermitian two-band topology toolkit"};
  app.require_subcommand(1);

  Common common;
  double k = -0.448 * pi;
  std::string side = "right";
  double cp = 2.0, cm = 1.0;
  bool hardware = false;
  std::string input;

  CLI::App* field = app.add_subcommand("field", "Bloch field h(k) and E^2");
  common.add(field, false);
  field->add_option("--k", k);

  CLI::App* eigs = app.add_subcommand("eigs", "biorthogonal eigensystem of a field");
  double hx = 0, hx_im = 0, hy = 0, hy_im = 0, hz_re = 0, hz_im = 0;
  std::optional<double> eig_k;
  eigs->add_option("--hx", hx);
  eigs->add_option("--hx-im", hx_im);
  eigs->add_option("--hy", hy);
  eigs->add_option("--hy-im", hy_im);
  eigs->add_option("--hz", hz_re);
  eigs->add_option("--hz-im", hz_im);
  eigs->add_option("--k", eig_k, "use the model field at k instead of explicit components");
  eigs->add_option("--config", common.config)->check(CLI::ExistingFile);
  eigs->add_option("--J0", common.J0);
  eigs->add_option("--J1", common.J1);
  eigs->add_option("--J2", common.J2);
  eigs->add_option("--delta", common.delta);

  CLI::App* wind = app.add_subcommand("windings", "w_+, w_-, w_t and nu_E of the model");
  common.add(wind, false);

  CLI::App* evolve = app.add_subcommand("evolve", "exact texture series at one k");
  common.add(evolve);
  evolve->add_option("--k", k);
  evolve->add_option("--side", side)->check(CLI::IsMember({"right", "left"}));
  evolve->add_option("--c-plus", cp);
  evolve->add_option("--c-minus", cm);

  CLI::App* dilate = app.add_subcommand("dilate", "Trotterized dilation vs exact textures at one k");
  common.add(dilate);
  dilate->add_option("--k", k);

  CLI::App* pulses = app.add_subcommand("pulses", "compile the pulse program at one k");
  common.add(pulses);
  pulses->add_option("--k", k);
  pulses->add_flag("--hardware", hardware, "non-negative delays with inverted sandwiches");

  CLI::App* fit = app.add_subcommand("fit", "fit a texture series");
  common.add(fit);
  fit->add_option("--k", k);
  fit->add_option("--input", input, "CSV with t,sx,sy columns")->check(CLI::ExistingFile);

  CLI::App* scan = app.add_subcommand("scan", "k-scan with winding summary");
  common.add(scan);

  CLI::App* phase = app.add_subcommand("phase-diagram", "w_t and nu_E over a parameter plane");
  common.add(phase, false);
  PhaseDiagramSpec pspec;
  std::string y_axis = "delta";
  phase->add_option("--j0-min", pspec.j0_min);
  phase->add_option("--j0-max", pspec.j0_max);
  phase->add_option("--nx", pspec.nx);
  phase->add_option("--y-axis", y_axis, "delta, hz, J1 or J2");
  phase->add_option("--y-min", pspec.y_min);
  phase->add_option("--y-max", pspec.y_max);
  phase->add_option("--ny", pspec.ny);
  phase->add_option("--threads", pspec.threads);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (*field) {
      const ScenarioConfig c = common.scenario();
      const ComplexField h = eval_field(c.model, k);
      std::cout << json{{"k", k},
                        {"hx", cjson(h.hx)},
                        {"hy", cjson(h.hy)},
                        {"hz", cjson(h.hz)},
                        {"E2", cjson(h.energy_squared())}}
                       .dump(2)
                << '\n';
    } else if (*eigs) {
      ComplexField h{cplx(hx, hx_im), cplx(hy, hy_im), cplx(hz_re, hz_im)};
      if (eig_k) h = eval_field(common.scenario().model, *eig_k);
      const EigenSystem es = eigensystem(h);
      json j{{"E_plus", cjson(es.E_plus)},
             {"right", {vjson(es.right[0]), vjson(es.right[1])}},
             {"left", {vjson(es.left[0]), vjson(es.left[1])}},
             {"texture_plus", tjson(eigen_texture(es, Band::plus))},
             {"texture_minus", tjson(eigen_texture(es, Band::minus))}};
      try {
        j["re_phi_yx"] = re_phi_yx(h);
      } catch (const NumericalError& e) {
        j["re_phi_yx"] = nullptr;
        j["re_phi_yx_error"] = e.what();
      }
      std::cout << j.dump(2) << '\n';
    } else if (*wind) {
      const ScenarioConfig c = common.scenario();
      const WindingReport w = windings(c.model, KGrid(c.winding_grid));
      json j{{"w_plus", w.w_plus},       {"w_minus", w.w_minus},         {"w_t", w.w_t.value},
             {"w_t_raw", w.w_t.raw},     {"w_t_residual", w.w_t.residual}, {"nu_E", w.nu_E.value},
             {"nu_E_raw", w.nu_E.raw},   {"nu_E_residual", w.nu_E.residual}, {"grid", w.grid_n}};
      std::cout << j.dump(2) << '\n';
    } else if (*evolve) {
      const ScenarioConfig c = common.scenario();
      const EigenSystem es = eigensystem(eval_field(c.model, k));
      StateVec psi = side == "right" ? right_state(es, cp, cm) : left_state(es, cp, cm);
      psi.amplitudes /= psi.amplitudes.norm();
      std::vector<double> times;
      for (int i = 0; i < c.samples; ++i) times.push_back(c.t_max * i / (c.samples - 1));
      std::ofstream f;
      write_series_csv(open_output(common.out, "evolve.csv", f), texture_series(es, psi, times, true));
    } else if (*dilate) {
      const ScenarioConfig c = common.scenario();
      double eta0 = 0;
      const DilatedSchedule s = schedule_for(c, k, &eta0);
      const EigenSystem es = eigensystem(eval_field(c.model, k));
      StateVec psi = right_state(es, c.c_plus, c.c_minus);
      psi.amplitudes /= psi.amplitudes.norm();
      const auto states = trotter_evolve(s, prepare_dilated_state(psi.amplitudes, eta0));
      std::ofstream f;
      std::ostream& os = open_output(common.out, "dilate.csv", f);
      os << "t,sx,sy,sx_exact,sy_exact\n";
      double dev = 0;
      for (int m : sample_slices(c)) {
        const double t = m * s.tau;
        const Texture a = project_texture(readout_rotation(states[static_cast<std::size_t>(m)]));
        const Texture b = texture_of(evolve_state(es, psi, t).amplitudes);
        dev = std::max({dev, std::abs(a.x - b.x), std::abs(a.y - b.y)});
        os << format_number(t) << ',' << format_number(a.x) << ',' << format_number(a.y) << ','
           << format_number(b.x) << ',' << format_number(b.y) << '\n';
      }
      std::cerr << "eta0 = " << eta0 << ", max deviation = " << dev << '\n';
    } else if (*pulses) {
      const ScenarioConfig c = common.scenario();
      const DilatedSchedule s = schedule_for(c, k, nullptr);
      auto program = compile_pulses(s, c.coupling_hz);
      if (c.noise_level > 0) program = inject_pulse_noise(program, c.noise_level, c.seed.value(), c.distribution);
      std::ofstream f;
      write_pulse_program(open_output(common.out, "pulses.txt", f), program, hardware);
    } else if (*fit) {
      ScenarioConfig c = common.scenario();
      FitResult r;
      if (!input.empty()) {
        FitConfig cfg;
        cfg.restarts = c.fit_restarts;
        cfg.seed = c.seed.value_or(0);
        r = fit_series(read_series_csv(input), cfg);
      } else {
        if (c.mode == Mode::exact) c.mode = Mode::fit;
        const KPointSeries s = generate_series(c, k, 0);
        r = fit_series(s.measured, fit_config_for(c, s, 0));
      }
      std::cout << fit_json(r).dump(2) << '\n';
    } else if (*scan) {
      const ScenarioConfig c = common.scenario();
      const ScanResult r = run_scan(c);
      fs::create_directories(c.out_dir);
      std::ofstream csv(fs::path(c.out_dir) / "scan.csv");
      write_scan_csv(csv, r);
      std::ofstream js(fs::path(c.out_dir) / "summary.json");
      js << summary_json(r).dump(2) << '\n';
      if (!csv || !js) throw ConfigError("cannot write into '" + c.out_dir + "'");
      std::cout << "mode = " << to_string(c.mode) << ", k-points = " << r.rows.size() << ", failed = "
                << r.summary.failed_k.size() << '\n';
      if (r.summary.w_t)
        std::cout << "w_t = " << r.summary.w_t->value << " (raw " << r.summary.w_t->raw << ")"
                  << (r.summary.w_t->quantized ? "" : " NOT QUANTIZED") << '\n';
      else
        std::cout << "w_t unavailable: " << r.summary.w_t_error << '\n';
      if (r.summary.nu_E)
        std::cout << "nu_E = " << r.summary.nu_E->value << " (raw " << r.summary.nu_E->raw << ")\n";
      if (r.summary.rms)
        std::cout << "rms sigma_x = " << r.summary.rms->sigma_x << ", sigma_y = " << r.summary.rms->sigma_y << '\n';
      std::cout << "output in " << c.out_dir << '\n';
      if (!r.summary.w_t) return 3;
    } else if (*phase) {
      const ScenarioConfig c = common.scenario();
      pspec.y_axis = parse_phase_axis(y_axis);
      pspec.grid = c.winding_grid;
      const auto pts = phase_diagram(c.model, pspec);
      std::ofstream f;
      write_phase_csv(open_output(common.out, "phase.csv", f), pts, pspec.y_axis);
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid argument: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
