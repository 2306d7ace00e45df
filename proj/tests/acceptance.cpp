// One PASS/FAIL line per acceptance criterion. Exit status 1 if any fails.
#include <chrono>
#include <cstdio>
#include <random>
#include <sstream>
#include <string>

#include "nhtopo/errors.hpp"
#include "nhtopo/pipeline.hpp"

using namespace nhtopo;

namespace {

int failures = 0;

void report(int id, const char* name, bool ok, const std::string& detail) {
  if (!ok) ++failures;
  std::printf("%s [%d] %s: %s\n", ok ? "PASS" : "FAIL", id, name, detail.c_str());
  std::fflush(stdout);
}

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

const ModelParams kExp1{1, 1, 0, 0.3, 0.5};
const ModelParams kExp2{0.3, 1, 0, 0.3, 0.5};
const double kShow = -0.448 * pi;

ComplexField random_field(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-2, 2);
  for (;;) {
    ComplexField h{cplx(u(rng), u(rng)), cplx(u(rng), u(rng)), cplx(u(rng), u(rng))};
    if (std::abs(h.energy_squared()) >= 1e-3 && std::abs(h.hx * h.hx + h.hy * h.hy) >= 1e-3) return h;
  }
}

void windings_criterion() {
  struct Case {
    ModelParams p;
    long w;
  };
  const Case cases[] = {{{3, 1, 1, 0.3, 0.5}, 0}, {{1, 1, 1, 0.3, 0.5}, 2}, {kExp1, 1}, {kExp2, 2}};
  bool ok = true;
  std::string detail;
  for (const auto& c : cases) {
    const IntegerInvariant w = winding_w_t(c.p, KGrid(721));
    ok = ok && w.value == c.w && w.residual < 1e-3;
    detail += std::to_string(w.value) + fmt(" (res %.1e) ", w.residual);
  }
  report(1, "w_t on the 721-point grid", ok, "got " + detail + "expected 0 2 1 2");
}

void energy_criterion() {
  bool ok = true;
  std::string detail;
  for (const ModelParams& p : {kExp1, kExp2}) {
    const IntegerInvariant v = winding_nu_E(p, KGrid(721));
    ok = ok && v.value == 0 && v.residual < 1e-3;
    detail += "nu_E=" + std::to_string(v.value) + fmt(" (res %.1e), ", v.residual);
  }
  const ModelParams q{0.8, 1, 0, 0.3, 0};
  const IntegerInvariant v = winding_nu_E(q, KGrid(721));
  // dense unwrapping of arg E^2
  const int n = 100000;
  double total = 0, prev = std::arg(eval_field(q, -pi).energy_squared());
  for (int j = 1; j <= n; ++j) {
    const double a = std::arg(eval_field(q, -pi + 2 * pi * j / n).energy_squared());
    total += wrap_angle(a - prev);
    prev = a;
  }
  const double dense = total / (2 * pi);
  ok = ok && v.value == -1 && std::abs(dense + 1) < 1e-6 && v.residual < 1e-3;
  detail += "nu_E=" + std::to_string(v.value) + fmt(" for (0.8,1,0,0.3,0), dense oracle %.6f", dense);
  report(2, "energy winding", ok, detail);
}

void identity_criterion() {
  std::mt19937_64 rng(4242);
  double worst = 0;
  for (int i = 0; i < 10000; ++i) {
    const ComplexField h = random_field(rng);
    const EigenSystem es = eigensystem(h);
    const double s = half_azimuth_sum(eigen_azimuth(es, Band::plus), eigen_azimuth(es, Band::minus));
    worst = std::max(worst, angle_distance(s, re_phi_yx(h), pi / 2));
  }
  report(3, "band azimuth identity over 10000 fields", worst <= 1e-9, fmt("max distance %.3e (tol 1e-9)", worst));
}

double congruence_distance(bool adaptive) {
  LongTimeOptions opt;
  opt.adaptive = adaptive;
  double worst = 0;
  for (const ModelParams& p : {kExp1, kExp2}) {
    const KGrid g(25);
    for (int j = 0; j < g.n; ++j) {
      const EigenSystem es = eigensystem(eval_field(p, g.at(j)));
      const double band = half_azimuth_sum(eigen_azimuth(es, Band::plus), eigen_azimuth(es, Band::minus));
      const double rr = long_time_phi(es, {2.0, 1.0}, Side::right, opt).angle;
      const double ll = long_time_phi(es, {2.0, 1.0}, Side::left, opt).angle;
      worst = std::max(worst, angle_distance(half_azimuth_sum(rr, ll), band, pi / 2));
    }
  }
  return worst;
}

void congruence_criterion() {
  const double fixed = congruence_distance(false), adaptive = congruence_distance(true);
  report(4, "long-time averages at T = 200/gap", fixed < 1e-2, fmt("max distance %.3e (tol 1e-2)", fixed));
  report(4, "long-time averages, horizon doubled until stable", adaptive < 1e-2,
         fmt("max distance %.3e (tol 1e-2)", adaptive));
}

double dilation_deviation(int slices) {
  const ComplexField h = eval_field(kExp1, kShow);
  const EigenSystem es = eigensystem(h);
  const double eta0 = auto_eta0(es, 3.0);
  StateVec psi0 = right_state(es, 2.0, 1.0);
  psi0.amplitudes /= psi0.amplitudes.norm();
  const DilatedSchedule s = dilated_schedule(h, eta0, 3.0 / slices, slices);
  const auto states = trotter_evolve(s, prepare_dilated_state(psi0.amplitudes, eta0));
  double dev = 0;
  for (int m = 0; m <= slices; ++m) {
    const Texture a = project_texture(readout_rotation(states[static_cast<std::size_t>(m)]));
    const Texture b = texture_of(evolve_state(es, psi0, 3.0 * m / slices).amplitudes);
    dev = std::max({dev, std::abs(a.x - b.x), std::abs(a.y - b.y)});
  }
  return dev;
}

void dilation_criterion() {
  const double d1 = dilation_deviation(1000), d2 = dilation_deviation(2000);
  const double ratio = d1 / d2;
  report(5, "dilated texture at 1000 slices", d1 < 1e-3,
         fmt("max deviation %.4e (tol 1e-3), ", d1) + fmt("halving ratio %.3f", ratio));
  report(5, "first-order Trotter scaling", std::abs(ratio - 2) < 0.1, fmt("deviation ratio %.3f (expect 2)", ratio));
}

void round_trip_criterion() {
  bool ok = true;
  std::string detail;
  for (auto [p, w] : {std::pair{kExp1, 1L}, std::pair{kExp2, 2L}}) {
    ScenarioConfig c;
    c.model = p;
    c.mode = Mode::dilated;
    c.trotter_slices = 20000;
    c.seed = 1;
    const ScanResult r = run_scan(c);
    double rel = 0;
    for (const auto& row : r.rows) {
      if (row.status != "ok") continue;
      const cplx E = eigensystem(eval_field(p, row.k)).E_plus;
      rel = std::max(rel, std::abs(row.E - E) / std::abs(E));
    }
    const bool got = r.summary.w_t && r.summary.w_t->value == w;
    ok = ok && got && r.summary.failed_k.empty() && rel < 1e-4;
    detail += "w_t=" + (r.summary.w_t ? std::to_string(r.summary.w_t->value) : std::string("none")) +
              fmt(" max|dE|/|E|=%.2e; ", rel);
  }
  report(6, "dilated fit round trip (20000 slices)", ok, detail + "tol 1e-4");
}

void noise_criterion() {
  ScenarioConfig c;
  c.model = kExp1;
  c.mode = Mode::noisy;
  c.noise_level = 0.01;
  const cplx E = eigensystem(eval_field(kExp1, kShow)).E_plus;
  int good = 0;
  double worst = 0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    c.seed = seed;
    try {
      const KPointSeries s = generate_series(c, kShow, 0);
      const FitResult f = fit_series(s.measured, fit_config_for(c, s, 0));
      const double rel = std::abs(f.model.E - E) / std::abs(E);
      worst = std::max(worst, rel);
      if (rel < 0.02) ++good;
    } catch (const NumericalError&) {
    }
  }
  report(7, "1% pulse noise at the showcase k", good >= 95,
         std::to_string(good) + "/100 seeds below 2%" + fmt(", worst %.3e", worst));

  bool ok = true;
  std::string detail;
  c.seed = 7;
  for (const ModelParams& p : {kExp1, kExp2}) {
    c.model = p;
    const ScanResult r = run_scan(c);
    const RmsReport& q = r.summary.rms.value();
    auto in = [](double v) { return v >= 0.005 && v <= 0.06; };
    ok = ok && in(q.sigma_x) && in(q.sigma_y);
    detail += fmt("sigma_x=%.4f ", q.sigma_x) + fmt("sigma_y=%.4f; ", q.sigma_y);
  }
  report(7, "scan RMS within [0.005, 0.06]", ok, detail);
}

void property_criterion() {
  std::mt19937_64 rng(2024);
  double bio = 0;
  for (int i = 0; i < 10000; ++i) {
    const EigenSystem es = eigensystem(random_field(rng));
    Mat2 R, L;
    R << es.right[0], es.right[1];
    L << es.left[0], es.left[1];
    bio = std::max({bio, (L.transpose() * R - Mat2::Identity()).norm(), (R * L.transpose() - Mat2::Identity()).norm()});
  }
  report(8, "biorthonormality and completeness", bio <= 1e-10, fmt("max residual %.2e (tol 1e-10)", bio));

  const ComplexField herm = eval_field(ModelParams{0.6, 1, 0, 0.0, 0.3}, 0.8);
  const DilatedSchedule s = dilated_schedule(herm, 1.0, 0.003, 100);
  double hdev = 0;
  for (const auto& c : s.slices) {
    hdev = std::max({hdev, std::abs(c.lambda[0]), std::abs(c.lambda[1] - herm.hx.real()),
                     std::abs(c.lambda[2] - herm.hy.real()), std::abs(c.lambda[3] - herm.hz.real())});
    for (double g : c.gamma) hdev = std::max(hdev, std::abs(g));
  }
  report(8, "Hermitian collapse of the dilation", hdev < 1e-12, fmt("max |Gamma|, |Lambda - H| %.2e", hdev));

  double semi = 0;
  for (int i = 0; i < 200; ++i) {
    const EigenSystem es = eigensystem(eval_field(kExp1, -pi + 2 * pi * i / 200.0));
    const StateVec psi = right_state(es, 2.0, 1.0);
    const double t1 = 0.7, t2 = 1.9;
    const Vec2 a = evolve_state(es, evolve_state(es, psi, t1), t2).amplitudes;
    const Vec2 b = evolve_state(es, psi, t1 + t2).amplitudes;
    semi = std::max(semi, (a - b).norm() / b.norm());
  }
  report(8, "semigroup property", semi <= 1e-10, fmt("max relative defect %.2e (tol 1e-10)", semi));

  ScenarioConfig c;
  c.mode = Mode::noisy;
  c.noise_level = 0.01;
  c.seed = 7;
  c.trotter_slices = 300;
  c.k_points = 9;
  auto csv = [&](int threads) {
    c.threads = threads;
    std::ostringstream os;
    write_scan_csv(os, run_scan(c));
    return os.str();
  };
  const std::string a = csv(1), b = csv(1), d = csv(4);
  report(8, "seeded scan determinism", a == b && a == d, "CSV identical across runs and 1/4 threads");
}

}  // namespace

int main() {
  const auto t0 = std::chrono::steady_clock::now();
  windings_criterion();
  energy_criterion();
  identity_criterion();
  congruence_criterion();
  dilation_criterion();
  round_trip_criterion();
  noise_criterion();
  property_criterion();
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::printf("%d failing criteria, %.1f s\n", failures, secs);
  return failures == 0 ? 0 : 1;
}
