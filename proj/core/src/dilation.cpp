#include "nhtopo/dilation.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "nhtopo/errors.hpp"

namespace nhtopo {

namespace {

// e^{i H t} from the biorthogonal decomposition.
Mat2 forward_propagator(const EigenSystem& es, double t) {
  Mat2 u = Mat2::Zero();
  for (Band b : {Band::plus, Band::minus})
    u += std::exp(I * es.energy(b) * t) * es.right[index(b)] * es.left[index(b)].transpose();
  return u;
}

double min_eig_gram(const EigenSystem& es, double t) {
  const Mat2 u = forward_propagator(es, t);
  Eigen::SelfAdjointEigenSolver<Mat2> s(hermitian_part(u.adjoint() * u), Eigen::EigenvaluesOnly);
  return s.eigenvalues().minCoeff();
}

Mat2 eta_only(const EigenSystem& es, double eta0, double t, double margin) {
  return metric_at(es, eta0, t, margin).eta;
}

std::array<double, 4> pauli_coefficients(const Mat2& a) {
  std::array<double, 4> c{};
  for (int alpha = 0; alpha < 4; ++alpha) c[static_cast<std::size_t>(alpha)] = 0.5 * (pauli(alpha) * a).trace().real();
  return c;
}

Mat4 sys(const Mat2& a) { return kron(a, Mat2::Identity()); }
Mat4 anc(const Mat2& a) { return kron(Mat2::Identity(), a); }

Mat4 zz_free(double J, double duration) {
  return involution_exp(0.5 * pi * J * duration, kron(pauli(3), pauli(3)));
}

}  // namespace

MetricState metric_at(const EigenSystem& es, double eta0, double t, double margin) {
  if (!(eta0 > 0)) throw std::invalid_argument("eta0 must be positive");
  const Mat2 u = forward_propagator(es, t);
  MetricState m;
  m.t = t;
  m.eta0 = eta0;
  m.M = hermitian_part((eta0 * eta0 + 1.0) * u.adjoint() * u);
  m.eta = hermitian_sqrt(m.M - Mat2::Identity(), &m.min_eig);
  if (!(m.min_eig > margin)) {
    std::ostringstream os;
    os << "min eig(M - I) = " << m.min_eig << " at t = " << t << " with eta0 = " << eta0;
    throw NumericalError(ErrorKind::PositivityLost, os.str());
  }
  return m;
}

std::vector<MetricState> metric_eta(const ComplexField& h, double eta0, const std::vector<double>& times,
                                    double margin) {
  const EigenSystem es = eigensystem(h);
  std::vector<MetricState> out;
  out.reserve(times.size());
  for (double t : times) out.push_back(metric_at(es, eta0, t, margin));
  return out;
}

double auto_eta0(const EigenSystem& es, double t_max, double start, double margin, int samples) {
  double g = 1.0;
  for (int i = 0; i < samples; ++i) {
    const double t = samples > 1 ? t_max * i / (samples - 1) : 0.0;
    g = std::min(g, min_eig_gram(es, t));
  }
  if (!(g > 0)) throw NumericalError(ErrorKind::PositivityLost, "propagator Gram matrix is singular");
  double eta0 = start;
  for (int j = 0; j < 60; ++j, eta0 *= 2)
    if ((eta0 * eta0 + 1.0) * g - 1.0 >= margin) return eta0;
  throw NumericalError(ErrorKind::PositivityLost, "no eta0 keeps M - I positive");
}

LambdaGamma lambda_gamma(const EigenSystem& es, double eta0, double t, double fd_step,
                         const ScheduleOptions& opt) {
  const Mat2 H = [&] {
    Mat2 h = Mat2::Zero();
    for (Band b : {Band::plus, Band::minus})
      h += es.energy(b) * es.right[index(b)] * es.left[index(b)].transpose();
    return h;
  }();
  const MetricState m = metric_at(es, eta0, t, opt.margin);
  const Mat2 d_eta =
      (eta_only(es, eta0, t + fd_step, opt.margin) - eta_only(es, eta0, t - fd_step, opt.margin)) /
      (2.0 * fd_step);
  const Mat2 m_inv = m.M.inverse();
  const Mat2& eta = m.eta;
  const Mat2 lambda = (H + (I * d_eta + eta * H) * eta) * m_inv;
  const Mat2 gamma = I * (H * eta - eta * H - I * d_eta) * m_inv;
  const double res = std::max(anti_hermitian_norm(lambda), anti_hermitian_norm(gamma));
  if (res > opt.hermitian_tol) {
    std::ostringstream os;
    os << "anti-Hermitian residue " << res << " at t = " << t;
    throw NumericalError(ErrorKind::NonHermitianResidual, os.str());
  }
  return {hermitian_part(lambda), hermitian_part(gamma)};
}

SliceCoefficients slice_coefficients(const EigenSystem& es, double eta0, double t, double fd_step,
                                     const ScheduleOptions& opt) {
  const LambdaGamma lg = lambda_gamma(es, eta0, t, fd_step, opt);
  return {t, pauli_coefficients(lg.Lambda), pauli_coefficients(lg.Gamma)};
}

DilatedSchedule dilated_schedule(const ComplexField& h, double eta0, double tau, int n_slices,
                                 const ScheduleOptions& opt) {
  if (!(tau > 0)) throw std::invalid_argument("tau must be positive");
  if (n_slices < 1) throw std::invalid_argument("need at least one slice");
  const EigenSystem es = eigensystem(h);
  DilatedSchedule s;
  s.tau = tau;
  s.eta0 = eta0;
  s.slices.reserve(static_cast<std::size_t>(n_slices));
  for (int m = 0; m < n_slices; ++m)
    s.slices.push_back(slice_coefficients(es, eta0, (m + 0.5) * tau, opt.fd_fraction * tau, opt));
  return s;
}

Mat4 dilated_hamiltonian(const SliceCoefficients& c) {
  Mat2 lambda = Mat2::Zero(), gamma = Mat2::Zero();
  for (int a = 0; a < 4; ++a) {
    lambda += c.lambda[static_cast<std::size_t>(a)] * pauli(a);
    gamma += c.gamma[static_cast<std::size_t>(a)] * pauli(a);
  }
  return dilated_hamiltonian(LambdaGamma{lambda, gamma});
}

Mat4 dilated_hamiltonian(const LambdaGamma& lg) {
  return kron(lg.Lambda, Mat2::Identity()) + kron(lg.Gamma, pauli(3));
}

Mat4 trotter_slice_unitary(const SliceCoefficients& c, double tau) {
  const auto& l = c.lambda;
  const auto& g = c.gamma;
  const double nl = std::hypot(l[1], l[2]);
  Mat4 f_xy = Mat4::Identity();
  if (nl > 0) f_xy = involution_exp(tau * nl, sys((l[1] * pauli(1) + l[2] * pauli(2)) / nl));
  const Mat4 f_z = involution_exp(tau * l[3], sys(pauli(3))) * involution_exp(tau * g[0], anc(pauli(3)));
  const Mat4 f_xz = involution_exp(tau * g[1], kron(pauli(1), pauli(3)));
  const Mat4 f_yz = involution_exp(tau * g[2], kron(pauli(2), pauli(3)));
  const Mat4 f_zz = involution_exp(tau * g[3], kron(pauli(3), pauli(3)));
  return std::exp(-I * tau * l[0]) * (f_xy * f_z * f_xz * f_yz * f_zz);
}

std::vector<DilatedState> trotter_evolve(const DilatedSchedule& s, const DilatedState& psi0) {
  if (s.slices.empty()) throw std::invalid_argument("empty schedule");
  std::vector<DilatedState> out;
  out.reserve(s.slices.size() + 1);
  out.push_back(psi0);
  for (const auto& c : s.slices) out.push_back(trotter_slice_unitary(c, s.tau) * out.back());
  return out;
}

DilatedState prepare_dilated_state(const Vec2& psi, double eta0) {
  Vec2 zero(1.0, 0.0);
  const Vec2 a = rotation(Axis::x, pi / 2) * rotation(Axis::y, 2.0 * std::atan(eta0)) * zero;
  DilatedState out;
  for (int s = 0; s < 2; ++s)
    for (int q = 0; q < 2; ++q) out(2 * s + q) = psi(s) * a(q);
  return out / out.norm();
}

DilatedState readout_rotation(const DilatedState& psi) { return anc(rotation(Axis::x, -pi / 2)) * psi; }

Vec2 ancilla_zero_component(const DilatedState& psi) { return Vec2(psi(0), psi(2)); }

Texture project_texture(const DilatedState& psi) {
  const Vec2 s = ancilla_zero_component(psi);
  if (s.squaredNorm() < 1e-12) throw NumericalError(ErrorKind::EmptyProjection, "ancilla |0> weight vanishes");
  return texture_of(s);
}

double project_readout(const DilatedState& psi, Axis axis) { return project_texture(psi)[axis]; }

Texture project_texture(const Density4& rho) {
  const Mat4 p0 = anc(Mat2(Eigen::Vector2cd(1.0, 0.0).asDiagonal()));
  const double w = (rho * p0).trace().real();
  if (w < 1e-12) throw NumericalError(ErrorKind::EmptyProjection, "ancilla |0> weight vanishes");
  Texture t;
  t.x = (rho * kron(pauli(1), Mat2::Identity()) * p0).trace().real() / w;
  t.y = (rho * kron(pauli(2), Mat2::Identity()) * p0).trace().real() / w;
  t.z = (rho * kron(pauli(3), Mat2::Identity()) * p0).trace().real() / w;
  return t;
}

double project_readout(const Density4& rho, Axis axis) { return project_texture(rho)[axis]; }

Density4 dephase(const Density4& rho) {
  return Density4(rho.diagonal().asDiagonal());
}

Density4 dephase_ancilla(const Density4& rho) {
  Density4 out = rho;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      if ((i & 1) != (j & 1)) out(i, j) = 0.0;
  return out;
}

PulseSlice compile_pulse(const SliceCoefficients& c, double tau, double J) {
  if (J == 0.0) throw std::invalid_argument("coupling J must be nonzero");
  PulseSlice p;
  p.B1 = tau / pi * std::hypot(c.lambda[1], c.lambda[2]);
  p.Phi1 = std::atan2(c.lambda[2], c.lambda[1]);
  p.B2 = c.lambda[3] / pi;
  p.B3 = c.gamma[0] / pi;
  p.tau1 = 2.0 * c.gamma[1] * tau / (pi * J);
  p.tau2 = 2.0 * c.gamma[2] * tau / (pi * J);
  p.tau3 = 2.0 * c.gamma[3] * tau / (pi * J);
  return p;
}

std::vector<PulseSlice> compile_pulses(const DilatedSchedule& s, double J) {
  std::vector<PulseSlice> out;
  out.reserve(s.slices.size());
  for (const auto& c : s.slices) out.push_back(compile_pulse(c, s.tau, J));
  return out;
}

namespace {

Mat4 rf_part(const PulseSlice& p, double tau) {
  const Mat2 axis = std::cos(p.Phi1) * pauli(1) + std::sin(p.Phi1) * pauli(2);
  const Mat4 u1 = sys(involution_exp(pi * p.B1, axis));
  const Mat4 u2 = sys(rotation(Axis::x, pi / 2) * involution_exp(pi * p.B2 * tau, pauli(2)) *
                      rotation(Axis::x, -pi / 2));
  const Mat4 u3 = anc(rotation(Axis::x, pi / 2) * involution_exp(pi * p.B3 * tau, pauli(2)) *
                      rotation(Axis::x, -pi / 2));
  return u1 * u2 * u3;
}

Mat4 sandwich(const Mat2& before, const Mat4& core, const Mat2& after) {
  return sys(before) * core * sys(after);
}

}  // namespace

Mat4 pulse_slice_unitary(const PulseSlice& p, double tau, double J) {
  const Mat4 u4 = sandwich(rotation(Axis::y, pi / 2), zz_free(J, p.tau1), rotation(Axis::y, -pi / 2));
  const Mat4 u5 = sandwich(rotation(Axis::x, -pi / 2), zz_free(J, p.tau2), rotation(Axis::x, pi / 2));
  const Mat4 u6 = zz_free(J, p.tau3);
  return rf_part(p, tau) * u4 * u5 * u6;
}

HardwarePulse hardware_form(const PulseSlice& p) {
  HardwarePulse h{p, {p.tau1 < 0, p.tau2 < 0, p.tau3 < 0}};
  h.pulse.tau1 = std::abs(p.tau1);
  h.pulse.tau2 = std::abs(p.tau2);
  h.pulse.tau3 = std::abs(p.tau3);
  return h;
}

Mat4 pulse_slice_unitary(const HardwarePulse& hw, double tau, double J) {
  const PulseSlice& p = hw.pulse;
  const double s1 = hw.inverted[0] ? -1.0 : 1.0;
  const double s2 = hw.inverted[1] ? -1.0 : 1.0;
  const Mat4 u4 =
      sandwich(rotation(Axis::y, s1 * pi / 2), zz_free(J, p.tau1), rotation(Axis::y, -s1 * pi / 2));
  const Mat4 u5 =
      sandwich(rotation(Axis::x, -s2 * pi / 2), zz_free(J, p.tau2), rotation(Axis::x, s2 * pi / 2));
  const Mat4 u6 = hw.inverted[2]
                      ? sandwich(rotation(Axis::x, pi), zz_free(J, p.tau3), rotation(Axis::x, -pi))
                      : zz_free(J, p.tau3);
  return rf_part(p, tau) * u4 * u5 * u6;
}

std::vector<DilatedState> simulate_pulses(const std::vector<PulseSlice>& pulses, double tau, double J,
                                          const DilatedState& psi0) {
  std::vector<DilatedState> out;
  out.reserve(pulses.size() + 1);
  out.push_back(psi0);
  for (const auto& p : pulses) out.push_back(pulse_slice_unitary(p, tau, J) * out.back());
  return out;
}

}  // namespace nhtopo
