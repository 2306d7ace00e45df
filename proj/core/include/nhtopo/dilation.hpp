#pragma once

#include <array>
#include <vector>

#include "nhtopo/band_model.hpp"

namespace nhtopo {

// Two-qubit amplitudes, basis index 2*s + a (system outer, ancilla inner).
using DilatedState = Vec4;
using Density4 = Mat4;

struct MetricState {
  double t = 0.0;
  Mat2 M;    // e^{-i H^dag t} M(0) e^{i H t}
  Mat2 eta;  // Hermitian sqrt(M - I)
  double eta0 = 0.0;
  double min_eig = 0.0;  // smallest eigenvalue of M - I
};

inline constexpr double kPositivityMargin = 1e-6;

MetricState metric_at(const EigenSystem& es, double eta0, double t, double margin = kPositivityMargin);
std::vector<MetricState> metric_eta(const ComplexField& h, double eta0, const std::vector<double>& times,
                                    double margin = kPositivityMargin);

// Smallest eta0 = start * 2^j with min eig(M(t) - I) >= margin on [0, t_max].
double auto_eta0(const EigenSystem& es, double t_max, double start = 0.5, double margin = 1e-3,
                 int samples = 1001);

struct SliceCoefficients {
  double t = 0.0;                     // evaluation time (slice midpoint)
  std::array<double, 4> lambda{};     // system part, alpha = 0:I, 1:x, 2:y, 3:z
  std::array<double, 4> gamma{};      // part multiplying ancilla sigma_z
};

struct DilatedSchedule {
  double tau = 0.0;
  double eta0 = 0.0;
  double k = 0.0;
  std::vector<SliceCoefficients> slices;

  double duration() const { return tau * static_cast<double>(slices.size()); }
};

struct ScheduleOptions {
  double fd_fraction = 0.1;  // d eta/dt step as a fraction of tau
  double hermitian_tol = 1e-6;
  double margin = kPositivityMargin;
};

struct LambdaGamma {
  Mat2 Lambda;
  Mat2 Gamma;
};

// Lambda(t), Gamma(t) with d eta/dt by centered difference of step fd_step,
// checked for anti-Hermitian residue and then Hermitized.
LambdaGamma lambda_gamma(const EigenSystem& es, double eta0, double t, double fd_step,
                         const ScheduleOptions& opt = {});

SliceCoefficients slice_coefficients(const EigenSystem& es, double eta0, double t, double fd_step,
                                     const ScheduleOptions& opt = {});

DilatedSchedule dilated_schedule(const ComplexField& h, double eta0, double tau, int n_slices,
                                 const ScheduleOptions& opt = {});

// sum_a lambda_a sigma_a (x) I + gamma_a sigma_a (x) sigma_z
Mat4 dilated_hamiltonian(const SliceCoefficients& c);
Mat4 dilated_hamiltonian(const LambdaGamma& lg);

Mat4 trotter_slice_unitary(const SliceCoefficients& c, double tau);

// States after each slice; element 0 is the input.
std::vector<DilatedState> trotter_evolve(const DilatedSchedule& s, const DilatedState& psi0);

// psi (x) R_x(pi/2) R_y(2 atan eta0) |0>, normalized.
DilatedState prepare_dilated_state(const Vec2& psi, double eta0);

// R_x(-pi/2) on the ancilla; maps the dilated state onto psi|0> + eta psi|1>.
DilatedState readout_rotation(const DilatedState& psi);

// Ancilla-|0> component of an already rotated state, system amplitudes only.
Vec2 ancilla_zero_component(const DilatedState& psi);

double project_readout(const DilatedState& psi, Axis axis);
Texture project_texture(const DilatedState& psi);
double project_readout(const Density4& rho, Axis axis);
Texture project_texture(const Density4& rho);

// Zero every off-diagonal element in the computational basis.
Density4 dephase(const Density4& rho);
// Zero only coherences between different ancilla states.
Density4 dephase_ancilla(const Density4& rho);

struct PulseSlice {
  double B1 = 0.0;
  double Phi1 = 0.0;
  double B2 = 0.0;
  double B3 = 0.0;
  double tau1 = 0.0;
  double tau2 = 0.0;
  double tau3 = 0.0;
};

inline constexpr double kDefaultCouplingHz = 215.0;

std::vector<PulseSlice> compile_pulses(const DilatedSchedule& s, double J);
PulseSlice compile_pulse(const SliceCoefficients& c, double tau, double J);

// Unitary of one compiled slice built from rotations and free J-coupling
// evolution. Excludes the global phase exp(-i tau lambda_0).
Mat4 pulse_slice_unitary(const PulseSlice& p, double tau, double J);

// Positive-duration form: negative tau_i become |tau_i| with inverted sandwiches.
struct HardwarePulse {
  PulseSlice pulse;
  std::array<bool, 3> inverted{};
};

HardwarePulse hardware_form(const PulseSlice& p);
Mat4 pulse_slice_unitary(const HardwarePulse& p, double tau, double J);

std::vector<DilatedState> simulate_pulses(const std::vector<PulseSlice>& pulses, double tau, double J,
                                          const DilatedState& psi0);

}  // namespace nhtopo
