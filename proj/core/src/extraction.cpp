#include "nhtopo/extraction.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>

#include "nhtopo/errors.hpp"
#include "nhtopo/random.hpp"

namespace nhtopo {

Eigen::VectorXd pack(const FitModel& m, bool traceless) {
  Eigen::VectorXd x(traceless ? 10 : 12);
  x << m.E.real(), m.E.imag(), m.v_plus(0).real(), m.v_plus(0).imag(), m.v_plus(1).real(),
      m.v_plus(1).imag(), m.v_minus(0).real(), m.v_minus(0).imag(), m.v_minus(1).real(),
      m.v_minus(1).imag();
  if (!traceless) {
    x(10) = m.E_minus.real();
    x(11) = m.E_minus.imag();
  }
  return x;
}

FitModel unpack(const Eigen::VectorXd& x, bool traceless) {
  FitModel m;
  m.E = cplx(x(0), x(1));
  m.v_plus = Vec2(cplx(x(2), x(3)), cplx(x(4), x(5)));
  m.v_minus = Vec2(cplx(x(6), x(7)), cplx(x(8), x(9)));
  m.E_minus = traceless ? -m.E : cplx(x(10), x(11));
  return m;
}

namespace {

struct ModelPoint {
  Vec2 psi;
  cplx a, b;  // scaled e^{-i E t}, e^{-i E_minus t}
};

ModelPoint model_point(const FitModel& m, double t) {
  const cplx za = -I * m.E * t;
  const cplx zb = -I * m.E_minus * t;
  const double shift = std::max(za.real(), zb.real());
  ModelPoint p;
  p.a = std::exp(za - shift);
  p.b = std::exp(zb - shift);
  p.psi = m.v_plus * p.a + m.v_minus * p.b;
  return p;
}

}  // namespace

void texture_residuals(const Eigen::VectorXd& x, const TextureSeries& s, bool traceless, Eigen::VectorXd& r,
                       Eigen::MatrixXd* J) {
  const FitModel m = unpack(x, traceless);
  const int nch = s.has_sz() ? 3 : 2;
  const int n = static_cast<int>(s.size());
  r.resize(nch * n);
  if (J) J->setZero(nch * n, x.size());
  for (int i = 0; i < n; ++i) {
    const double t = s.times[static_cast<std::size_t>(i)];
    const ModelPoint p = model_point(m, t);
    const Texture tx = texture_of(p.psi);
    const std::array<double, 3> data{s.sx[static_cast<std::size_t>(i)], s.sy[static_cast<std::size_t>(i)],
                                     nch == 3 ? s.sz[static_cast<std::size_t>(i)] : 0.0};
    const std::array<double, 3> model{tx.x, tx.y, tx.z};
    for (int c = 0; c < nch; ++c) r(nch * i + c) = model[static_cast<std::size_t>(c)] - data[static_cast<std::size_t>(c)];
    if (!J) continue;

    const cplx c0 = std::conj(p.psi(0));
    const cplx c1 = std::conj(p.psi(1));
    const double nrm = std::norm(p.psi(0)) + std::norm(p.psi(1));
    // Wirtinger gradients of each texture with respect to psi
    std::array<Vec2, 3> g;
    g[0] = Vec2(c1 - tx.x * c0, c0 - tx.x * c1) / nrm;
    g[1] = Vec2(I * c1 - tx.y * c0, -I * c0 - tx.y * c1) / nrm;
    g[2] = Vec2((1.0 - tx.z) * c0, (-1.0 - tx.z) * c1) / nrm;

    // d psi / d z for each complex parameter z
    std::array<Vec2, 6> w;
    std::array<int, 6> col;
    int nz = 0;
    auto add = [&](const Vec2& dpsi, int column) {
      w[static_cast<std::size_t>(nz)] = dpsi;
      col[static_cast<std::size_t>(nz)] = column;
      ++nz;
    };
    const Vec2 d_e_plus = -I * t * p.a * m.v_plus;
    const Vec2 d_e_minus = -I * t * p.b * m.v_minus;
    add(traceless ? Vec2(d_e_plus - d_e_minus) : d_e_plus, 0);
    add(Vec2(p.a, 0.0), 2);
    add(Vec2(0.0, p.a), 4);
    add(Vec2(p.b, 0.0), 6);
    add(Vec2(0.0, p.b), 8);
    if (!traceless) add(d_e_minus, 10);

    for (int c = 0; c < nch; ++c) {
      for (int q = 0; q < nz; ++q) {
        const cplx d = g[static_cast<std::size_t>(c)].transpose() * w[static_cast<std::size_t>(q)];
        (*J)(nch * i + c, col[static_cast<std::size_t>(q)]) = 2.0 * d.real();
        (*J)(nch * i + c, col[static_cast<std::size_t>(q)] + 1) = -2.0 * d.imag();
      }
    }
  }
}

LmResult levenberg_marquardt(const ResidualFn& f, Eigen::VectorXd x, const LmOptions& opt) {
  Eigen::VectorXd r, r_new;
  Eigen::MatrixXd J;
  f(x, r, &J);
  double cost = 0.5 * r.squaredNorm();
  Eigen::MatrixXd A = J.transpose() * J;
  Eigen::VectorXd g = J.transpose() * r;

  LmResult out;
  out.cost_history.push_back(cost);
  double mu = opt.initial_damping * std::max(A.diagonal().maxCoeff(), 1e-300);
  double nu = 2.0;
  bool done = g.lpNorm<Eigen::Infinity>() < opt.gradient_tol;
  out.converged = done;
  int it = 0;
  for (; it < opt.max_iterations && !done; ++it) {
    Eigen::MatrixXd Am = A;
    Am.diagonal().array() += mu;
    const Eigen::VectorXd h = Am.ldlt().solve(-g);
    if (!h.allFinite()) break;
    if (h.norm() <= opt.step_tol * (x.norm() + opt.step_tol)) {
      out.converged = true;
      break;
    }
    const Eigen::VectorXd x_new = x + h;
    f(x_new, r_new, nullptr);
    const double cost_new = 0.5 * r_new.squaredNorm();
    const double predicted = 0.5 * h.dot(mu * h - g);
    const double rho = predicted > 0 ? (cost - cost_new) / predicted : -1.0;
    if (std::isfinite(cost_new) && cost_new < cost && rho > 0) {
      x = x_new;
      f(x, r, &J);
      cost = 0.5 * r.squaredNorm();
      A = J.transpose() * J;
      g = J.transpose() * r;
      out.cost_history.push_back(cost);
      mu *= std::max(1.0 / 3.0, 1.0 - std::pow(2.0 * rho - 1.0, 3));
      nu = 2.0;
      if (g.lpNorm<Eigen::Infinity>() < opt.gradient_tol) {
        out.converged = true;
        done = true;
      }
    } else {
      mu *= nu;
      nu *= 2.0;
      if (!std::isfinite(mu) || mu > 1e300) break;
    }
  }
  out.x = x;
  out.cost = cost;
  out.gradient_inf = g.lpNorm<Eigen::Infinity>();
  out.iterations = it;
  return out;
}

FitModel canonicalize(FitModel m, bool traceless) {
  if (traceless) {
    if (m.E.real() < 0 || (m.E.real() == 0 && m.E.imag() < 0)) {
      m.E = -m.E;
      std::swap(m.v_plus, m.v_minus);
    }
    m.E_minus = -m.E;
  } else if (m.E.real() < m.E_minus.real()) {
    std::swap(m.E, m.E_minus);
    std::swap(m.v_plus, m.v_minus);
  }
  const double nrm = m.v_plus.norm();
  if (nrm == 0.0) return m;
  const int j = std::abs(m.v_plus(0)) > 1e-14 * nrm ? 0 : 1;
  const cplx scale = std::conj(m.v_plus(j)) / std::abs(m.v_plus(j)) / nrm;
  m.v_plus *= scale;
  m.v_minus *= scale;
  return m;
}

FitModel mirror(const FitModel& m, bool traceless) {
  const Mat2& sx = pauli(1);
  FitModel out;
  out.v_plus = sx * m.v_minus.conjugate();
  out.v_minus = sx * m.v_plus.conjugate();
  out.E = -std::conj(m.E_minus);
  out.E_minus = -std::conj(m.E);
  return canonicalize(out, traceless);
}

TextureSeries forward_series(const FitModel& m, const std::vector<double>& times, bool record_sz) {
  TextureSeries s;
  s.times = times;
  for (double t : times) {
    const Texture tx = texture_of(model_point(m, t).psi);
    s.sx.push_back(tx.x);
    s.sy.push_back(tx.y);
    if (record_sz) s.sz.push_back(tx.z);
  }
  return s;
}

double dominant_frequency(const std::vector<double>& times, const std::vector<std::vector<double>>& channels,
                          int grid) {
  const std::size_t n = times.size();
  if (n < 2) throw std::invalid_argument("dominant_frequency needs two samples");
  const double span = times.back() - times.front();
  const double w_max = pi * static_cast<double>(n - 1) / span;
  const double w_min = w_max / grid;
  double best_w = w_min, best_p = -1.0;
  std::vector<std::vector<double>> centered;
  for (const auto& ch : channels) {
    double mean = 0.0;
    for (double v : ch) mean += v;
    mean /= static_cast<double>(ch.size());
    std::vector<double> c(ch.size());
    for (std::size_t i = 0; i < ch.size(); ++i) c[i] = ch[i] - mean;
    centered.push_back(std::move(c));
  }
  for (int q = 1; q <= grid; ++q) {
    const double w = w_max * q / grid;
    double p = 0.0;
    for (const auto& c : centered) {
      cplx acc{};
      for (std::size_t i = 0; i < n; ++i) acc += c[i] * std::exp(-I * w * times[i]);
      p += std::norm(acc);
    }
    if (p > best_p) {
      best_p = p;
      best_w = w;
    }
  }
  return best_w;
}

namespace {

// Decay rate of the oscillation envelope from windowed RMS.
double envelope_decay(const TextureSeries& s) {
  const std::size_t n = s.size();
  const int windows = n >= 24 ? 4 : 2;
  std::vector<double> tc, lr;
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += s.sx[i];
    my += s.sy[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  for (int w = 0; w < windows; ++w) {
    const std::size_t lo = n * static_cast<std::size_t>(w) / static_cast<std::size_t>(windows);
    const std::size_t hi = n * static_cast<std::size_t>(w + 1) / static_cast<std::size_t>(windows);
    double acc = 0.0, t = 0.0;
    for (std::size_t i = lo; i < hi; ++i) {
      acc += (s.sx[i] - mx) * (s.sx[i] - mx) + (s.sy[i] - my) * (s.sy[i] - my);
      t += s.times[i];
    }
    const double cnt = static_cast<double>(hi - lo);
    if (acc <= 0) continue;
    tc.push_back(t / cnt);
    lr.push_back(0.5 * std::log(acc / cnt));
  }
  if (tc.size() < 2) return 0.0;
  double st = 0, sl = 0, stt = 0, stl = 0;
  const double m = static_cast<double>(tc.size());
  for (std::size_t i = 0; i < tc.size(); ++i) {
    st += tc[i];
    sl += lr[i];
    stt += tc[i] * tc[i];
    stl += tc[i] * lr[i];
  }
  const double den = m * stt - st * st;
  if (den == 0) return 0.0;
  const double slope = (m * stl - st * sl) / den;
  return std::max(0.0, -slope / 2.0);
}

Vec2 random_vec(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  return Vec2(cplx(g(rng), g(rng)), cplx(g(rng), g(rng)));
}

}  // namespace

FitResult fit_series(const TextureSeries& s, const FitConfig& cfg) {
  const std::size_t n = s.size();
  if (s.sx.size() != n || s.sy.size() != n || (s.has_sz() && s.sz.size() != n))
    throw NumericalError(ErrorKind::LengthMismatch, "texture channels and times differ in length");
  if (n < 12) throw std::invalid_argument("fit_series needs at least 12 samples");

  auto spread = [](const std::vector<double>& v) {
    if (v.empty()) return 0.0;
    auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    return *hi - *lo;
  };
  if (std::max({spread(s.sx), spread(s.sy), spread(s.sz)}) < 1e-9)
    throw NumericalError(ErrorKind::SingleBandDegenerate, "texture series is constant; only one band present");

  std::vector<std::vector<double>> channels{s.sx, s.sy};
  if (s.has_sz()) channels.push_back(s.sz);
  const double re_e0 = 0.5 * dominant_frequency(s.times, channels);
  const double im_e0 = envelope_decay(s);

  std::mt19937_64 rng(mix_seed({cfg.seed, cfg.stream}));
  std::normal_distribution<double> gauss;

  const ResidualFn f = [&](const Eigen::VectorXd& x, Eigen::VectorXd& r, Eigen::MatrixXd* J) {
    texture_residuals(x, s, cfg.traceless, r, J);
  };
  LmOptions lm;
  lm.max_iterations = cfg.max_iterations;
  lm.gradient_tol = cfg.gradient_tol;

  const int restarts = std::max(cfg.restarts, 1);
  LmResult best;
  best.cost = std::numeric_limits<double>::infinity();
  int total_iterations = 0;
  for (int q = 0; q < restarts; ++q) {
    FitModel start;
    const bool have_v = cfg.nominal_v.has_value();
    if (q == 2 && cfg.nominal_E) {
      start.E = *cfg.nominal_E;
    } else if (q < 2) {
      start.E = cplx(re_e0, q == 0 ? im_e0 : -im_e0);
    } else {
      start.E = cplx(re_e0 * (1.0 + 0.1 * gauss(rng)), (gauss(rng) > 0 ? 1.0 : -1.0) * im_e0 + 0.1 * gauss(rng));
    }
    if (have_v && q <= 2) {
      start.v_plus = (*cfg.nominal_v)[0];
      start.v_minus = (*cfg.nominal_v)[1];
    } else {
      start.v_plus = random_vec(rng);
      start.v_minus = random_vec(rng);
    }
    start.E_minus = -start.E;
    const LmResult res = levenberg_marquardt(f, pack(start, cfg.traceless), lm);
    total_iterations += res.iterations;
    if (std::isfinite(res.cost) && res.cost < best.cost) best = res;
  }
  if (!best.x.size() || !std::isfinite(best.cost))
    throw NumericalError(ErrorKind::NotConverged, "no restart produced a finite cost");
  if (!best.converged) {
    std::ostringstream os;
    os << "best restart stopped with |g|_inf = " << best.gradient_inf;
    throw NumericalError(ErrorKind::NotConverged, os.str());
  }

  FitResult out;
  out.model = canonicalize(unpack(best.x, cfg.traceless), cfg.traceless);
  if (cfg.nominal_E && !s.has_sz()) {
    const FitModel alt = mirror(out.model, cfg.traceless);
    if (std::abs(alt.E - *cfg.nominal_E) < std::abs(out.model.E - *cfg.nominal_E)) {
      out.model = alt;
      out.mirrored = true;
    }
  }

  const FitModel& m = out.model;
  double ratio = 0.0;
  for (double t : s.times) {
    const double wp = m.v_plus.squaredNorm() * std::exp(2.0 * m.E.imag() * t);
    const double wm = m.v_minus.squaredNorm() * std::exp(2.0 * m.E_minus.imag() * t);
    const double hi = std::max(wp, wm);
    if (hi > 0) ratio = std::max(ratio, std::min(wp, wm) / hi);
  }
  const double overlap = std::abs(m.v_plus.dot(m.v_minus)) / (m.v_plus.norm() * m.v_minus.norm());
  if (!(std::sqrt(ratio) >= cfg.single_band_ratio) || !(1.0 - overlap > 1e-12)) {
    std::ostringstream os;
    os << "fitted band weight ratio " << std::sqrt(ratio) << " below " << cfg.single_band_ratio;
    throw NumericalError(ErrorKind::SingleBandDegenerate, os.str());
  }

  out.tex_plus = texture_of(m.v_plus);
  out.tex_minus = texture_of(m.v_minus);
  out.phi_pp = std::atan2(out.tex_plus.y, out.tex_plus.x);
  out.phi_mm = std::atan2(out.tex_minus.y, out.tex_minus.x);
  out.cost = best.cost;
  out.residual_rms = std::sqrt(2.0 * best.cost / static_cast<double>(n * (s.has_sz() ? 3 : 2)));
  out.converged = best.converged;
  out.restarts = restarts;
  out.iterations = total_iterations;
  return out;
}

double re_phi_from_fit(const FitResult& fit) {
  auto tiny = [](const Texture& t) { return std::abs(t.x) < 1e-9 && std::abs(t.y) < 1e-9; };
  if (tiny(fit.tex_plus) || tiny(fit.tex_minus))
    throw NumericalError(ErrorKind::DegenerateTexture, "in-plane texture of a band vanishes");
  return half_azimuth_sum(fit.phi_pp, fit.phi_mm);
}

}  // namespace nhtopo
