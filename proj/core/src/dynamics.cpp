#include "nhtopo/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "nhtopo/errors.hpp"

namespace nhtopo {

const char* to_string(SeriesSource s) noexcept {
  switch (s) {
    case SeriesSource::exact: return "exact";
    case SeriesSource::dilated: return "dilated";
    case SeriesSource::noisy: return "noisy";
  }
  return "unknown";
}

namespace {

Vec2 basis_vector(const EigenSystem& es, Band b, Side side) {
  return side == Side::right ? es.right[index(b)] : es.left_ket(b);
}

}  // namespace

std::array<cplx, 2> expansion(const EigenSystem& es, const StateVec& psi0) {
  std::array<cplx, 2> c;
  for (Band b : {Band::plus, Band::minus}) {
    c[index(b)] = psi0.side == Side::right ? es.overlap(b, psi0.amplitudes)
                                           : cplx(es.right[index(b)].dot(psi0.amplitudes));
  }
  return c;
}

StateVec evolve_state(const EigenSystem& es, const StateVec& psi0, double t) {
  if (t < 0) throw std::invalid_argument("evolve_state: t must be non-negative");
  if (t == 0) return psi0;
  const auto c = expansion(es, psi0);
  StateVec out{Vec2::Zero(), psi0.side};
  for (Band b : {Band::plus, Band::minus})
    out.amplitudes += c[index(b)] * std::exp(-I * es.energy(b) * t) * basis_vector(es, b, psi0.side);
  return out;
}

StateVec evolve_state(const ComplexField& h, const StateVec& psi0, double t) {
  return evolve_state(eigensystem(h), psi0, t);
}

Vec2 evolve_adjoint(const EigenSystem& es, const Vec2& psi0, double t) {
  Vec2 out = Vec2::Zero();
  for (Band b : {Band::plus, Band::minus}) {
    const cplx c = es.right[index(b)].dot(psi0);
    out += c * std::exp(-I * std::conj(es.energy(b)) * t) * es.left_ket(b);
  }
  return out;
}

Vec2 scaled_state(const EigenSystem& es, const std::array<cplx, 2>& c, Side side, double t) {
  const cplx zp = -I * es.E_plus * t;
  const double shift = std::abs(zp.real());
  return c[0] * std::exp(zp - shift) * basis_vector(es, Band::plus, side) +
         c[1] * std::exp(-zp - shift) * basis_vector(es, Band::minus, side);
}

TextureSeries texture_series(const EigenSystem& es, const StateVec& psi0, const std::vector<double>& times,
                             bool record_sz) {
  for (std::size_t i = 1; i < times.size(); ++i)
    if (!(times[i] > times[i - 1])) throw std::invalid_argument("texture_series: times must increase");
  const auto c = expansion(es, psi0);
  TextureSeries s;
  s.times = times;
  s.sx.reserve(times.size());
  s.sy.reserve(times.size());
  for (double t : times) {
    const Texture tx = texture_of(scaled_state(es, c, psi0.side, t));
    s.sx.push_back(tx.x);
    s.sy.push_back(tx.y);
    if (record_sz) s.sz.push_back(tx.z);
  }
  return s;
}

TextureSeries texture_series(const ComplexField& h, const StateVec& psi0, const std::vector<double>& times,
                             bool record_sz) {
  return texture_series(eigensystem(h), psi0, times, record_sz);
}

StateVec right_state(const EigenSystem& es, cplx c_plus, cplx c_minus) {
  return {c_plus * es.right[0] + c_minus * es.right[1], Side::right};
}

StateVec left_state(const EigenSystem& es, cplx c_plus, cplx c_minus) {
  return {c_plus * es.left_ket(Band::plus) + c_minus * es.left_ket(Band::minus), Side::left};
}

double band_gap(const EigenSystem& es) {
  const cplx d = 2.0 * es.E_plus;
  return std::max(std::abs(d.real()), std::abs(d.imag()));
}

LongTimeAverage long_time_phi(const EigenSystem& es, const std::array<cplx, 2>& c, Side side,
                              const LongTimeOptions& opt) {
  const double gap = band_gap(es);
  double horizon = opt.horizon > 0 ? opt.horizon : opt.horizon_factor / gap;
  if (!(horizon > 0) || !std::isfinite(horizon))
    throw std::invalid_argument("long_time_phi: horizon must be positive and finite");

  const double re = std::abs(es.E_plus.real());
  const int ppp = std::max(opt.points_per_period, 2);
  double dt = re > 0 ? pi / re / ppp : horizon / (100.0 * ppp);
  const long n0 = 2 * std::max(1L, static_cast<long>(std::ceil(horizon / dt / 2)));
  dt = horizon / n0;

  double ix = 0.0, iy = 0.0;
  Texture prev = texture_of(scaled_state(es, c, side, 0.0));
  long step = 0;
  auto integrate_to = [&](long n_end) {
    for (; step < n_end; ++step) {
      const Texture cur = texture_of(scaled_state(es, c, side, dt * static_cast<double>(step + 1)));
      ix += 0.5 * dt * (prev.x + cur.x);
      iy += 0.5 * dt * (prev.y + cur.y);
      prev = cur;
    }
  };

  LongTimeAverage r;
  long n_end = n0;
  integrate_to(n0 / 2);
  double half_x = ix, half_y = iy;
  for (int d = 0;; ++d) {
    integrate_to(n_end);
    const double t_end = dt * static_cast<double>(n_end);
    r.avg_x = ix / t_end;
    r.avg_y = iy / t_end;
    r.horizon = t_end;
    r.doublings = d;
    r.angle = std::atan2(r.avg_y, r.avg_x);
    r.half_horizon_angle = std::atan2(half_y, half_x);
    r.converged = angle_distance(r.angle, r.half_horizon_angle, 2 * pi) <= opt.tol;
    if (r.converged || !opt.adaptive || d >= opt.max_doublings) break;
    half_x = ix;
    half_y = iy;
    n_end *= 2;
  }
  if (std::abs(r.avg_x) < 1e-9 && std::abs(r.avg_y) < 1e-9)
    throw NumericalError(ErrorKind::DegenerateAverage, "both averaged texture components vanish");
  if (!r.converged && opt.require_convergence) {
    std::ostringstream os;
    os << "T vs T/2 angles differ by " << angle_distance(r.angle, r.half_horizon_angle, 2 * pi);
    throw NumericalError(ErrorKind::NotConverged, os.str());
  }
  return r;
}

LongTimeAverage long_time_phi(const ComplexField& h, const StateVec& psi0, const LongTimeOptions& opt) {
  const EigenSystem es = eigensystem(h);
  return long_time_phi(es, expansion(es, psi0), psi0.side, opt);
}

}  // namespace nhtopo
