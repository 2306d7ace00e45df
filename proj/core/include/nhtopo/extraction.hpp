#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "nhtopo/dynamics.hpp"

namespace nhtopo {

// psi(t) = v_plus e^{-i E t} + v_minus e^{-i E_minus t}, E_minus = -E unless the
// traceless constraint is relaxed.
struct FitModel {
  cplx E;
  cplx E_minus;
  Vec2 v_plus = Vec2::Zero();
  Vec2 v_minus = Vec2::Zero();
};

struct FitConfig {
  int restarts = 8;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;  // e.g. k index; keeps restarts schedule-independent
  int max_iterations = 200;
  double gradient_tol = 1e-10;
  bool traceless = true;
  double single_band_ratio = 1e-3;
  // Starting point from the band model, when known. Also used to pick between
  // the two mirror-image solutions that sx, sy alone cannot distinguish.
  std::optional<cplx> nominal_E;
  std::optional<std::array<Vec2, 2>> nominal_v;
};

struct FitResult {
  FitModel model;
  Texture tex_plus;
  Texture tex_minus;
  double phi_pp = 0.0;
  double phi_mm = 0.0;
  double residual_rms = 0.0;
  double cost = 0.0;
  bool converged = false;
  int restarts = 0;
  int iterations = 0;
  bool mirrored = false;
};

FitResult fit_series(const TextureSeries& series, const FitConfig& config = {});

// (phi^{++} + phi^{--})/2, defined modulo pi/2.
double re_phi_from_fit(const FitResult& fit);

TextureSeries forward_series(const FitModel& m, const std::vector<double>& times, bool record_sz = false);

// Canonical gauge: Re E >= 0, |v_plus| = 1, first nonzero component of v_plus real positive.
FitModel canonicalize(FitModel m, bool traceless = true);

// (E, v+, v-) -> (E*, sx conj v-, sx conj v+); identical sx, sy, opposite sz.
FitModel mirror(const FitModel& m, bool traceless = true);

// Angular frequency of the strongest periodogram peak of the mean-removed
// samples, scanned on a fine grid up to the Nyquist limit of the mean spacing.
double dominant_frequency(const std::vector<double>& times, const std::vector<std::vector<double>>& channels,
                          int grid = 4000);

struct LmOptions {
  int max_iterations = 200;
  double gradient_tol = 1e-10;
  double step_tol = 1e-13;
  double initial_damping = 1e-3;
};

struct LmResult {
  Eigen::VectorXd x;
  double cost = 0.0;  // 0.5 |r|^2
  double gradient_inf = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<double> cost_history;  // accepted costs, starting with the initial one
};

// r(x) and, when J is non-null, its Jacobian.
using ResidualFn = std::function<void(const Eigen::VectorXd& x, Eigen::VectorXd& r, Eigen::MatrixXd* J)>;

LmResult levenberg_marquardt(const ResidualFn& f, Eigen::VectorXd x0, const LmOptions& opt = {});

// Residual vector and analytic Jacobian of the texture model; exposed for testing.
void texture_residuals(const Eigen::VectorXd& x, const TextureSeries& s, bool traceless, Eigen::VectorXd& r,
                       Eigen::MatrixXd* J);

Eigen::VectorXd pack(const FitModel& m, bool traceless);
FitModel unpack(const Eigen::VectorXd& x, bool traceless);

}  // namespace nhtopo
