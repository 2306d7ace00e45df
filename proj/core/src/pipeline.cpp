#include "nhtopo/pipeline.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <mutex>
#include <ostream>
#include <random>
#include <thread>

#include "nhtopo/errors.hpp"
#include "nhtopo/random.hpp"

namespace nhtopo {

using nlohmann::json;

void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& f) {
  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(std::max(threads, 1)), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          f(i);
        } catch (...) {
          std::lock_guard<std::mutex> lk(failure_mu);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

std::vector<int> sample_slices(const ScenarioConfig& c) {
  std::vector<int> idx(static_cast<std::size_t>(c.samples));
  for (int i = 0; i < c.samples; ++i)
    idx[static_cast<std::size_t>(i)] =
        static_cast<int>(std::lround(static_cast<double>(i) * c.trotter_slices / (c.samples - 1)));
  return idx;
}

std::vector<double> sample_times(const ScenarioConfig& c) {
  const double tau = c.t_max / c.trotter_slices;
  std::vector<double> t;
  for (int m : sample_slices(c)) t.push_back(m * tau);
  return t;
}

KPointSeries generate_series(const ScenarioConfig& c, double k, std::uint64_t k_index) {
  KPointSeries out;
  const ComplexField h = eval_field(c.model, k);
  out.es = eigensystem(h);
  out.psi0 = right_state(out.es, c.c_plus, c.c_minus);
  out.psi0.amplitudes /= out.psi0.amplitudes.norm();
  const std::vector<double> times = sample_times(c);
  out.theory = texture_series(out.es, out.psi0, times);
  out.theory.k = k;
  if (c.mode == Mode::exact || c.mode == Mode::fit) {
    out.measured = out.theory;
    return out;
  }

  const double tau = c.t_max / c.trotter_slices;
  DilatedSchedule sched;
  if (c.eta0) {
    out.eta0 = *c.eta0;
    sched = dilated_schedule(h, out.eta0, tau, c.trotter_slices);
  } else {
    // keep doubling past the positivity threshold while the schedule is ill-conditioned
    out.eta0 = auto_eta0(out.es, c.t_max);
    for (int attempt = 0;; ++attempt) {
      try {
        sched = dilated_schedule(h, out.eta0, tau, c.trotter_slices);
        break;
      } catch (const NumericalError& e) {
        const bool retry = e.kind() == ErrorKind::NonHermitianResidual || e.kind() == ErrorKind::PositivityLost;
        if (!retry || attempt >= 6) throw;
        out.eta0 *= 2;
      }
    }
  }
  sched.k = k;
  const DilatedState start = prepare_dilated_state(out.psi0.amplitudes, out.eta0);

  std::vector<DilatedState> states;
  if (c.mode == Mode::dilated) {
    states = trotter_evolve(sched, start);
  } else {
    const auto pulses = compile_pulses(sched, c.coupling_hz);
    const std::uint64_t seed = mix_seed({c.seed.value_or(0), k_index});
    states = simulate_pulses(inject_pulse_noise(pulses, c.noise_level, seed, c.distribution), tau, c.coupling_hz,
                             start);
  }

  TextureSeries& m = out.measured;
  m.k = k;
  m.source = c.mode == Mode::dilated ? SeriesSource::dilated : SeriesSource::noisy;
  m.times = times;
  for (int idx : sample_slices(c)) {
    const DilatedState psi = readout_rotation(states[static_cast<std::size_t>(idx)]);
    Texture t;
    if (c.mode == Mode::noisy) {
      const Density4 rho = dephase_ancilla(psi * psi.adjoint());
      t = project_texture(rho);
    } else {
      t = project_texture(psi);
    }
    m.sx.push_back(t.x);
    m.sy.push_back(t.y);
  }
  return out;
}

FitConfig fit_config_for(const ScenarioConfig& c, const KPointSeries& s, std::uint64_t k_index) {
  FitConfig f;
  f.restarts = c.fit_restarts;
  f.seed = c.seed.value_or(0);
  f.stream = k_index;
  f.nominal_E = s.es.E_plus;
  const auto coeff = expansion(s.es, s.psi0);
  f.nominal_v = std::array<Vec2, 2>{coeff[0] * s.es.right[0], coeff[1] * s.es.right[1]};
  return f;
}

ScanResult run_scan(const ScenarioConfig& c) {
  c.validate();
  ScanResult res;
  res.config = c;
  const KGrid grid(c.k_points);
  const std::size_t n = static_cast<std::size_t>(grid.n);
  res.rows.resize(n);
  std::vector<KPointSeries> series(n);
  std::vector<char> have_series(n, 0);

  parallel_for(n, c.threads, [&](std::size_t j) {
    ScanRow& row = res.rows[j];
    row.k = grid.at(static_cast<int>(j));
    try {
      if (c.mode == Mode::exact) {
        const EigenSystem es = eigensystem(eval_field(c.model, row.k));
        row.phi_pp = eigen_azimuth(es, Band::plus);
        row.phi_mm = eigen_azimuth(es, Band::minus);
        row.re_phi = half_azimuth_sum(row.phi_pp, row.phi_mm);
        row.E = es.E_plus;
        return;
      }
      KPointSeries s = generate_series(c, row.k, j);
      row.eta0 = s.eta0;
      const FitResult fit = fit_series(s.measured, fit_config_for(c, s, j));
      row.phi_pp = fit.phi_pp;
      row.phi_mm = fit.phi_mm;
      row.re_phi = re_phi_from_fit(fit);
      row.E = fit.model.E;
      row.fit_rms = fit.residual_rms;
      series[j] = std::move(s);
      have_series[j] = 1;
    } catch (const NumericalError& e) {
      row.status = to_string(e.kind());
      const double nan = std::nan("");
      row.phi_pp = row.phi_mm = row.re_phi = nan;
      row.E = cplx(nan, nan);
    }
  });

  std::vector<double> ks, phis;
  std::vector<cplx> es;
  for (const auto& row : res.rows) {
    if (row.status != "ok") {
      res.summary.failed_k.push_back(row.k);
      continue;
    }
    ks.push_back(row.k);
    phis.push_back(row.re_phi);
    es.push_back(row.E);
  }
  try {
    res.summary.w_t = winding_from_phi_series(ks, phis, pi / 2);
  } catch (const std::exception& e) {
    res.summary.w_t_error = e.what();
  }
  try {
    res.summary.nu_E = winding_from_energy_series(es);
  } catch (const std::exception& e) {
    res.summary.nu_E_error = e.what();
  }
  try {
    res.summary.model = windings(c.model, KGrid(c.winding_grid));
  } catch (const NumericalError& e) {
    res.summary.model_error = e.what();
  }

  if (c.mode == Mode::dilated || c.mode == Mode::noisy || c.mode == Mode::fit) {
    std::vector<TextureSeries> meas, theo;
    for (std::size_t j = 0; j < n; ++j) {
      if (!have_series[j]) continue;
      meas.push_back(series[j].measured);
      theo.push_back(series[j].theory);
    }
    if (!meas.empty()) res.summary.rms = rms_report(meas, theo, to_string(c.mode));
  }
  return res;
}

std::vector<PulseSlice> inject_pulse_noise(const std::vector<PulseSlice>& pulses, double level, std::uint64_t seed,
                                           NoiseDistribution dist) {
  if (!(level >= 0)) throw std::invalid_argument("noise level must be non-negative");
  std::vector<PulseSlice> out = pulses;
  if (level == 0) return out;
  auto draw = [&](std::uint64_t slice, std::uint64_t field) {
    std::mt19937_64 rng(mix_seed({seed, slice, field}));
    if (dist == NoiseDistribution::gaussian) return std::normal_distribution<double>(0.0, 1.0)(rng);
    return std::uniform_real_distribution<double>(-1.0, 1.0)(rng);
  };
  for (std::size_t m = 0; m < out.size(); ++m) {
    out[m].B1 *= 1.0 + level * draw(m, 0);
    out[m].B2 *= 1.0 + level * draw(m, 1);
    out[m].B3 *= 1.0 + level * draw(m, 2);
  }
  return out;
}

double rms_error(const std::vector<double>& measured, const std::vector<double>& theory) {
  if (measured.size() != theory.size())
    throw NumericalError(ErrorKind::LengthMismatch, "measured and theory series differ in length");
  if (measured.empty()) throw std::invalid_argument("rms_error needs at least one sample");
  double acc = 0.0;
  for (std::size_t i = 0; i < measured.size(); ++i) acc += (measured[i] - theory[i]) * (measured[i] - theory[i]);
  return std::sqrt(acc / static_cast<double>(measured.size()));
}

RmsReport rms_report(const std::vector<TextureSeries>& measured, const std::vector<TextureSeries>& theory,
                     const std::string& source) {
  if (measured.size() != theory.size())
    throw NumericalError(ErrorKind::LengthMismatch, "measured and theory series counts differ");
  std::vector<double> mx, my, tx, ty;
  for (std::size_t i = 0; i < measured.size(); ++i) {
    mx.insert(mx.end(), measured[i].sx.begin(), measured[i].sx.end());
    my.insert(my.end(), measured[i].sy.begin(), measured[i].sy.end());
    tx.insert(tx.end(), theory[i].sx.begin(), theory[i].sx.end());
    ty.insert(ty.end(), theory[i].sy.begin(), theory[i].sy.end());
  }
  RmsReport r;
  r.sigma_x = rms_error(mx, tx);
  r.sigma_y = rms_error(my, ty);
  r.N = mx.size();
  r.source = source;
  return r;
}

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_scan_csv(std::ostream& os, const ScanResult& r) {
  os << "k,phi_pp,phi_mm,re_phi,reE,imE,status\n";
  for (const auto& row : r.rows) {
    os << format_number(row.k) << ',' << format_number(row.phi_pp) << ',' << format_number(row.phi_mm) << ','
       << format_number(row.re_phi) << ',' << format_number(row.E.real()) << ',' << format_number(row.E.imag())
       << ',' << row.status << '\n';
  }
}

json to_json(const IntegerInvariant& v) {
  return {{"value", v.value}, {"raw", v.raw}, {"residual", v.residual}, {"quantized", v.quantized}};
}

json to_json(const WindingReport& w) {
  return {{"w_plus", w.w_plus}, {"w_minus", w.w_minus}, {"w_t", to_json(w.w_t)}, {"nu_E", to_json(w.nu_E)},
          {"grid", w.grid_n}};
}

json summary_json(const ScanResult& r) {
  json j;
  const ScanSummary& s = r.summary;
  j["w_t"] = s.w_t ? to_json(*s.w_t) : json(nullptr);
  if (!s.w_t_error.empty()) j["w_t_error"] = s.w_t_error;
  j["nu_E"] = s.nu_E ? to_json(*s.nu_E) : json(nullptr);
  if (!s.nu_E_error.empty()) j["nu_E_error"] = s.nu_E_error;
  j["model_windings"] = s.model ? to_json(*s.model) : json(nullptr);
  if (!s.model_error.empty()) j["model_error"] = s.model_error;
  j["failed_k"] = s.failed_k;
  if (s.rms)
    j["rms"] = {{"sigma_x", s.rms->sigma_x}, {"sigma_y", s.rms->sigma_y}, {"N", s.rms->N}, {"source", s.rms->source}};
  else
    j["rms"] = nullptr;
  j["rows"] = r.rows.size();
  j["config"] = to_json(r.config);
  j["seed"] = r.config.seed ? json(*r.config.seed) : json(nullptr);
  return j;
}

void write_pulse_program(std::ostream& os, const std::vector<PulseSlice>& pulses, bool hardware) {
  char buf[512];
  os << (hardware ? "# index B1 Phi1 B2 B3 tau1 tau2 tau3 inv1 inv2 inv3\n" : "# index B1 Phi1 B2 B3 tau1 tau2 tau3\n");
  for (std::size_t m = 0; m < pulses.size(); ++m) {
    if (hardware) {
      const HardwarePulse h = hardware_form(pulses[m]);
      const PulseSlice& p = h.pulse;
      std::snprintf(buf, sizeof buf, "%zu %.15e %.15e %.15e %.15e %.15e %.15e %.15e %d %d %d\n", m, p.B1, p.Phi1,
                    p.B2, p.B3, p.tau1, p.tau2, p.tau3, int(h.inverted[0]), int(h.inverted[1]), int(h.inverted[2]));
    } else {
      const PulseSlice& p = pulses[m];
      std::snprintf(buf, sizeof buf, "%zu %.15e %.15e %.15e %.15e %.15e %.15e %.15e\n", m, p.B1, p.Phi1, p.B2, p.B3,
                    p.tau1, p.tau2, p.tau3);
    }
    os << buf;
  }
}

PhaseAxis parse_phase_axis(const std::string& s) {
  if (s == "delta") return PhaseAxis::delta;
  if (s == "hz") return PhaseAxis::hz;
  if (s == "J1") return PhaseAxis::J1;
  if (s == "J2") return PhaseAxis::J2;
  throw ConfigError("unknown phase-diagram axis '" + s + "' (expected delta, hz, J1 or J2)");
}

const char* to_string(PhaseAxis a) noexcept {
  switch (a) {
    case PhaseAxis::delta: return "delta";
    case PhaseAxis::hz: return "hz";
    case PhaseAxis::J1: return "J1";
    case PhaseAxis::J2: return "J2";
  }
  return "unknown";
}

std::vector<PhasePoint> phase_diagram(const ModelParams& base, const PhaseDiagramSpec& spec) {
  if (spec.nx < 1 || spec.ny < 1) throw ConfigError("phase diagram needs at least one point per axis");
  const KGrid grid(spec.grid);
  auto lerp = [](double a, double b, int i, int n) { return n == 1 ? a : a + (b - a) * i / (n - 1); };
  std::vector<PhasePoint> pts(static_cast<std::size_t>(spec.nx) * static_cast<std::size_t>(spec.ny));
  parallel_for(pts.size(), spec.threads, [&](std::size_t q) {
    const int iy = static_cast<int>(q / static_cast<std::size_t>(spec.nx));
    const int ix = static_cast<int>(q % static_cast<std::size_t>(spec.nx));
    PhasePoint& pt = pts[q];
    pt.j0 = lerp(spec.j0_min, spec.j0_max, ix, spec.nx);
    pt.y = lerp(spec.y_min, spec.y_max, iy, spec.ny);
    ModelParams p = base;
    p.J0 = pt.j0;
    switch (spec.y_axis) {
      case PhaseAxis::delta: p.delta = pt.y; break;
      case PhaseAxis::hz: p.hz = pt.y; break;
      case PhaseAxis::J1: p.J1 = pt.y; break;
      case PhaseAxis::J2: p.J2 = pt.y; break;
    }
    try {
      pt.w_t = winding_w_t(p, grid).value;
      pt.nu_E = winding_nu_E(p, grid).value;
    } catch (const NumericalError& e) {
      pt.status = to_string(e.kind());
    }
  });
  return pts;
}

void write_phase_csv(std::ostream& os, const std::vector<PhasePoint>& pts, PhaseAxis y_axis) {
  os << "J0," << to_string(y_axis) << ",w_t,nu_E,status\n";
  for (const auto& p : pts)
    os << format_number(p.j0) << ',' << format_number(p.y) << ',' << p.w_t << ',' << p.nu_E << ',' << p.status
       << '\n';
}

}  // namespace nhtopo
