#pragma once

#include <vector>

#include "nhtopo/band_model.hpp"

namespace nhtopo {

// Uniform periodic grid k_j = -pi + 2 pi j / n, j = 0..n-1.
struct KGrid {
  int n = 721;

  explicit KGrid(int n_points = 721);
  double spacing() const { return 2.0 * pi / n; }
  double at(int j) const { return -pi + spacing() * j; }
  std::vector<double> points() const;
};

struct IntegerInvariant {
  long value = 0;
  double raw = 0.0;       // unrounded loop integral
  double residual = 0.0;  // |raw - value|
  bool quantized = false; // residual below the rounding tolerance
};

struct WindingReport {
  double w_plus = 0.0;
  double w_minus = 0.0;
  IntegerInvariant w_t;
  IntegerInvariant nu_E;
  int grid_n = 0;
};

struct UnwrapOptions {
  double max_jump = pi / 4;
  double round_tol = 1e-2;
};

double winding_w_mu(const ModelParams& p, Band band, const KGrid& grid,
                    double ep_threshold = kDefaultEpThreshold);

IntegerInvariant winding_w_t(const ModelParams& p, const KGrid& grid, const UnwrapOptions& opt = {});

// Angles known up to multiples of `period`, sampled once around the loop in
// increasing k. The loop is closed from the last sample back to the first.
// Returns total increment / pi.
IntegerInvariant winding_from_phi_series(const std::vector<double>& k, const std::vector<double>& phi,
                                         double period = pi / 2, const UnwrapOptions& opt = {});

IntegerInvariant winding_nu_E(const ModelParams& p, const KGrid& grid, const UnwrapOptions& opt = {},
                              double ep_threshold = kDefaultEpThreshold);

// nu_E from sampled complex energies E_+(k) (either branch; uses arg E^2).
IntegerInvariant winding_from_energy_series(const std::vector<cplx>& energies,
                                            const UnwrapOptions& opt = {});

// Loop integral of d Im(phi_yx); vanishes for any gapped closed loop.
double im_phi_loop_increment(const ModelParams& p, const KGrid& grid);

WindingReport windings(const ModelParams& p, const KGrid& grid, const UnwrapOptions& opt = {});

}  // namespace nhtopo
