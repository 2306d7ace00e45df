#pragma once

#include <array>
#include <string>
#include <vector>

#include "nhtopo/band_model.hpp"

namespace nhtopo {

enum class Side { right, left };

struct StateVec {
  Vec2 amplitudes = Vec2::Zero();
  Side side = Side::right;
};

enum class SeriesSource { exact, dilated, noisy };

const char* to_string(SeriesSource s) noexcept;

struct TextureSeries {
  std::vector<double> times;
  std::vector<double> sx;
  std::vector<double> sy;
  std::vector<double> sz;  // empty when not recorded
  double k = 0.0;
  SeriesSource source = SeriesSource::exact;

  std::size_t size() const { return times.size(); }
  bool has_sz() const { return !sz.empty(); }
};

// Expansion coefficients of psi0 in the eigenbasis appropriate to its side:
// right states use <phi^L_m|psi0>, left states use <phi^R_m|psi0>.
std::array<cplx, 2> expansion(const EigenSystem& es, const StateVec& psi0);

// Right: sum_m c_m e^{-i E_m t} |phi^R_m>.  Left: sum_m c_m e^{-i E_m t} |phi^L_m>.
StateVec evolve_state(const EigenSystem& es, const StateVec& psi0, double t);
StateVec evolve_state(const ComplexField& h, const StateVec& psi0, double t);

// Schroedinger evolution under H^dagger, exp(-i H^dagger t) psi0.
Vec2 evolve_adjoint(const EigenSystem& es, const Vec2& psi0, double t);

// Evolved state for given coefficients, rescaled by a common positive factor so
// that no exponential overflows. Only directions and ratios are meaningful.
Vec2 scaled_state(const EigenSystem& es, const std::array<cplx, 2>& c, Side side, double t);

TextureSeries texture_series(const EigenSystem& es, const StateVec& psi0, const std::vector<double>& times,
                             bool record_sz = false);
TextureSeries texture_series(const ComplexField& h, const StateVec& psi0, const std::vector<double>& times,
                             bool record_sz = false);

// Right state with coefficients c_+ : c_- along the right eigenvectors.
StateVec right_state(const EigenSystem& es, cplx c_plus, cplx c_minus);
// Left state with coefficients c_+ : c_- along the left eigenkets.
StateVec left_state(const EigenSystem& es, cplx c_plus, cplx c_minus);

struct LongTimeOptions {
  double horizon_factor = 200.0;  // T0 = factor / gap
  double horizon = 0.0;           // explicit T0 when > 0
  int points_per_period = 40;
  double tol = 1e-3;
  bool adaptive = true;  // double T until T and T/2 agree
  int max_doublings = 12;
  bool require_convergence = false;
};

struct LongTimeAverage {
  double angle = 0.0;  // atan2(<sy>_T, <sx>_T)
  double half_horizon_angle = 0.0;
  double horizon = 0.0;
  bool converged = false;
  double avg_x = 0.0;
  double avg_y = 0.0;
  int doublings = 0;
};

// gap = max(|Re(E_+ - E_-)|, |Im(E_+ - E_-)|)
double band_gap(const EigenSystem& es);

LongTimeAverage long_time_phi(const EigenSystem& es, const std::array<cplx, 2>& c, Side side,
                              const LongTimeOptions& opt = {});
LongTimeAverage long_time_phi(const ComplexField& h, const StateVec& psi0, const LongTimeOptions& opt = {});

}  // namespace nhtopo
