#pragma once

#include <array>

#include "nhtopo/linalg.hpp"

namespace nhtopo {

// h(k) = (J0 + J1 cos k + J2 cos 2k, J1 sin k + J2 sin 2k - i delta, hz)
struct ModelParams {
  double J0 = 1.0;
  double J1 = 1.0;
  double J2 = 0.0;
  double delta = 0.0;
  double hz = 0.0;
};

struct ComplexField {
  cplx hx, hy, hz;

  Mat2 matrix() const;  // hx sx + hy sy + hz sz
  cplx energy_squared() const { return hx * hx + hy * hy + hz * hz; }
};

enum class Band { plus = 0, minus = 1 };

inline int index(Band b) { return static_cast<int>(b); }

inline constexpr double kDefaultEpThreshold = 1e-12;

struct BranchTag {
  bool negated = false;       // std::sqrt result was flipped onto the principal half-plane
  bool axis_aligned = false;  // hx = hy = 0, canonical basis vectors returned
};

// Biorthogonal eigensystem at one k.  left[m] is stored as a row covector u with
// u^T right[m] = 1, so <phi^L_m|psi> = left[m].transpose() * psi and the ket is conj(u).
struct EigenSystem {
  cplx E_plus;
  std::array<Vec2, 2> right;
  std::array<Vec2, 2> left;
  BranchTag branch;

  cplx energy(Band b) const { return b == Band::plus ? E_plus : -E_plus; }
  Vec2 left_ket(Band b) const { return left[index(b)].conjugate(); }
  cplx overlap(Band b, const Vec2& psi) const { return left[index(b)].transpose() * psi; }
};

struct BlochAngles {
  cplx beta;
  cplx phi_yx;
};

ComplexField eval_field(const ModelParams& p, double k);
ComplexField field_derivative(const ModelParams& p, double k);

EigenSystem eigensystem(const ComplexField& h, double ep_threshold = kDefaultEpThreshold);

BlochAngles bloch_angles(const ComplexField& h, double threshold = kDefaultEpThreshold);

// Re phi_yx alone; only needs hx^2 + hy^2 != 0.
double re_phi_yx(const ComplexField& h);

Texture eigen_texture(const EigenSystem& es, Band band);
double eigenstate_texture(const EigenSystem& es, Band band, Axis axis);

// phi^{mm} = atan2(<sy>_m, <sx>_m)
double eigen_azimuth(const EigenSystem& es, Band band);

// (phi^{++} + phi^{--})/2, meaningful modulo pi/2
double half_azimuth_sum(double phi_pp, double phi_mm);

}  // namespace nhtopo
