#include "nhtopo/band_model.hpp"

#include <cmath>
#include <sstream>

#include "nhtopo/errors.hpp"

namespace nhtopo {

Mat2 ComplexField::matrix() const {
  Mat2 m;
  m << hz, hx - I * hy, hx + I * hy, -hz;
  return m;
}

ComplexField eval_field(const ModelParams& p, double k) {
  return {p.J0 + p.J1 * std::cos(k) + p.J2 * std::cos(2 * k),
          cplx(p.J1 * std::sin(k) + p.J2 * std::sin(2 * k), -p.delta), p.hz};
}

ComplexField field_derivative(const ModelParams& p, double k) {
  return {-p.J1 * std::sin(k) - 2 * p.J2 * std::sin(2 * k),
          p.J1 * std::cos(k) + 2 * p.J2 * std::cos(2 * k), 0.0};
}

namespace {

// Pick the better conditioned of two proportional candidates.
Vec2 larger(const Vec2& a, const Vec2& b) { return a.squaredNorm() >= b.squaredNorm() ? a : b; }

// Unit norm, dominant component real positive.
Vec2 fix_gauge(Vec2 v) {
  v /= v.norm();
  const int j = std::abs(v(1)) > std::abs(v(0)) ? 1 : 0;
  return v * (std::conj(v(j)) / std::abs(v(j)));
}

}  // namespace

EigenSystem eigensystem(const ComplexField& h, double ep_threshold) {
  const cplx e2 = h.energy_squared();
  if (!(std::abs(e2) >= ep_threshold)) {
    std::ostringstream os;
    os << "|E^2| = " << std::abs(e2) << " below " << ep_threshold;
    throw NumericalError(ErrorKind::ExceptionalPoint, os.str());
  }
  EigenSystem es;
  cplx e = std::sqrt(e2);
  if (e.real() < 0 || (e.real() == 0 && e.imag() < 0)) {
    e = -e;
    es.branch.negated = true;
  }
  es.E_plus = e;
  es.branch.axis_aligned = h.hx == 0.0 && h.hy == 0.0;

  const cplx a = h.hx + I * h.hy;
  const cplx b = h.hx - I * h.hy;
  for (Band band : {Band::plus, Band::minus}) {
    const cplx em = es.energy(band);
    Vec2 v = fix_gauge(larger(Vec2(b, em - h.hz), Vec2(em + h.hz, a)));
    Vec2 u = larger(Vec2(a, em - h.hz), Vec2(em + h.hz, b));
    u /= cplx(u.transpose() * v);
    es.right[index(band)] = v;
    es.left[index(band)] = u;
  }
  return es;
}

BlochAngles bloch_angles(const ComplexField& h, double threshold) {
  const cplx s = h.hx * h.hx + h.hy * h.hy;
  if (!(std::abs(s) >= threshold))
    throw NumericalError(ErrorKind::BranchPole, "hx^2 + hy^2 vanishes; azimuth undefined");
  const EigenSystem es = eigensystem(h, threshold);
  const cplx a = h.hx + I * h.hy;
  const cplx b = h.hx - I * h.hy;
  BlochAngles out;
  out.phi_yx = cplx(0.5 * std::arg(a * std::conj(b)), -0.5 * std::log(std::abs(a) / std::abs(b)));
  out.beta = std::acos(h.hz / es.E_plus);
  return out;
}

double re_phi_yx(const ComplexField& h) {
  const cplx a = h.hx + I * h.hy;
  const cplx b = h.hx - I * h.hy;
  if (std::abs(a) * std::abs(b) < kDefaultEpThreshold)
    throw NumericalError(ErrorKind::BranchPole, "hx^2 + hy^2 vanishes; azimuth undefined");
  return 0.5 * std::arg(a * std::conj(b));
}

Texture eigen_texture(const EigenSystem& es, Band band) { return texture_of(es.right[index(band)]); }

double eigenstate_texture(const EigenSystem& es, Band band, Axis axis) {
  return eigen_texture(es, band)[axis];
}

double eigen_azimuth(const EigenSystem& es, Band band) {
  const Texture t = eigen_texture(es, band);
  return std::atan2(t.y, t.x);
}

double half_azimuth_sum(double phi_pp, double phi_mm) { return 0.5 * (phi_pp + phi_mm); }

}  // namespace nhtopo
