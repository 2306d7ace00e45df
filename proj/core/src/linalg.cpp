#include "nhtopo/linalg.hpp"

#include <array>
#include <cmath>

namespace nhtopo {

const Mat2& pauli(int alpha) {
  static const std::array<Mat2, 4> table = [] {
    std::array<Mat2, 4> p;
    p[0] << 1, 0, 0, 1;
    p[1] << 0, 1, 1, 0;
    p[2] << 0, -I, I, 0;
    p[3] << 1, 0, 0, -1;
    return p;
  }();
  return table.at(static_cast<std::size_t>(alpha));
}

Mat4 kron(const Mat2& a, const Mat2& b) {
  Mat4 out;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) out.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
  return out;
}

Mat2 rotation(Axis axis, double theta) {
  int alpha = axis == Axis::x ? 1 : (axis == Axis::y ? 2 : 3);
  return involution_exp(theta / 2.0, pauli(alpha));
}

Texture texture_of(const Vec2& psi) {
  const double n = std::norm(psi(0)) + std::norm(psi(1));
  const cplx p = std::conj(psi(0)) * psi(1);
  return {2.0 * p.real() / n, 2.0 * p.imag() / n, (std::norm(psi(0)) - std::norm(psi(1))) / n};
}

Mat2 hermitian_part(const Mat2& a) { return 0.5 * (a + a.adjoint()); }

double anti_hermitian_norm(const Mat2& a) { return (0.5 * (a - a.adjoint())).norm(); }

Mat2 hermitian_sqrt(const Mat2& a, double* min_eig) {
  Eigen::SelfAdjointEigenSolver<Mat2> es(hermitian_part(a));
  const auto& w = es.eigenvalues();
  if (min_eig) *min_eig = w.minCoeff();
  Eigen::Vector2d r;
  for (int i = 0; i < 2; ++i) r(i) = std::sqrt(std::max(w(i), 0.0));
  const Mat2& v = es.eigenvectors();
  return v * r.cast<cplx>().asDiagonal() * v.adjoint();
}

double wrap_angle(double a) {
  double r = std::remainder(a, 2.0 * pi);
  if (r <= -pi) r += 2.0 * pi;
  return r;
}

double reduce_mod(double a, double period) {
  double r = std::remainder(a, period);
  if (r <= -period / 2) r += period;
  return r;
}

double angle_distance(double a, double b, double period) {
  return std::abs(reduce_mod(a - b, period));
}

}  // namespace nhtopo
