#pragma once

#include <Eigen/Dense>
#include <complex>
#include <numbers>

namespace nhtopo {

using cplx = std::complex<double>;
using Vec2 = Eigen::Matrix<cplx, 2, 1>;
using Mat2 = Eigen::Matrix<cplx, 2, 2>;
using Vec4 = Eigen::Matrix<cplx, 4, 1>;
using Mat4 = Eigen::Matrix<cplx, 4, 4>;

inline constexpr double pi = std::numbers::pi;
inline constexpr cplx I{0.0, 1.0};

enum class Axis { x, y, z };

// alpha = 0:I, 1:x, 2:y, 3:z
const Mat2& pauli(int alpha);

Mat4 kron(const Mat2& a, const Mat2& b);

// exp(-i theta sigma_axis / 2)
Mat2 rotation(Axis axis, double theta);

// exp(-i theta P) for an involution P (P^2 = 1)
template <class M>
M involution_exp(double theta, const M& P) {
  return std::cos(theta) * M::Identity() - I * std::sin(theta) * P;
}

struct Texture {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  double operator[](Axis a) const { return a == Axis::x ? x : (a == Axis::y ? y : z); }
};

// <psi|sigma|psi>/<psi|psi>
Texture texture_of(const Vec2& psi);

// Hermitian part (A + A^dagger)/2 and the size of what was discarded.
Mat2 hermitian_part(const Mat2& a);
double anti_hermitian_norm(const Mat2& a);

// Principal square root of a Hermitian matrix via its eigen-decomposition.
// min_eig receives the smallest eigenvalue of the argument.
Mat2 hermitian_sqrt(const Mat2& a, double* min_eig = nullptr);

double wrap_angle(double a);  // into (-pi, pi]

// Nearest representative of a modulo period, in (-period/2, period/2].
double reduce_mod(double a, double period);

// Distance between two angles modulo period.
double angle_distance(double a, double b, double period);

}  // namespace nhtopo
