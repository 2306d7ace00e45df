#include "nhtopo/topology.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "nhtopo/errors.hpp"

namespace nhtopo {

KGrid::KGrid(int n_points) : n(n_points) {
  if (n < 8) throw std::invalid_argument("KGrid needs at least 8 points");
}

std::vector<double> KGrid::points() const {
  std::vector<double> out(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) out[static_cast<std::size_t>(j)] = at(j);
  return out;
}

namespace {

IntegerInvariant make_invariant(double raw, double tol) {
  IntegerInvariant r;
  r.raw = raw;
  r.value = std::lround(raw);
  r.residual = std::abs(raw - static_cast<double>(r.value));
  r.quantized = r.residual < tol;
  return r;
}

// Sum of nearest-representative increments around the closed loop.
double loop_increment(const std::vector<double>& a, double period, double max_jump) {
  double total = 0.0;
  const std::size_t n = a.size();
  for (std::size_t j = 0; j < n; ++j) {
    const double d = reduce_mod(a[(j + 1) % n] - a[j], period);
    if (std::abs(d) > max_jump) {
      std::ostringstream os;
      os << "jump " << d << " at sample " << j << " exceeds " << max_jump;
      throw NumericalError(ErrorKind::UnwrapAmbiguous, os.str());
    }
    total += d;
  }
  return total;
}

double effective_jump(const UnwrapOptions& opt, double period) {
  return std::min(opt.max_jump, 0.45 * period);
}

}  // namespace

double winding_w_mu(const ModelParams& p, Band band, const KGrid& grid, double ep_threshold) {
  cplx e_prev{};
  cplx sum{};
  for (int j = 0; j < grid.n; ++j) {
    const double k = grid.at(j);
    const ComplexField h = eval_field(p, k);
    const ComplexField dh = field_derivative(p, k);
    const EigenSystem es = eigensystem(h, ep_threshold);
    cplx e = es.E_plus;
    if (j > 0) {
      const double same = std::abs(e - e_prev);
      const double flip = std::abs(-e - e_prev);
      if (flip < same) e = -e;
      if (std::min(same, flip) > 0.5 * std::max(same, flip)) {
        std::ostringstream os;
        os << "energy continuation ambiguous at k = " << k;
        throw NumericalError(ErrorKind::BandTrackingLost, os.str());
      }
    }
    e_prev = e;
    const cplx em = band == Band::plus ? e : -e;
    sum += (h.hx * dh.hy - h.hy * dh.hx) / (em * (em - h.hz));
  }
  return (sum * grid.spacing() / (2.0 * pi)).real();
}

IntegerInvariant winding_w_t(const ModelParams& p, const KGrid& grid, const UnwrapOptions& opt) {
  std::vector<double> phi(static_cast<std::size_t>(grid.n));
  for (int j = 0; j < grid.n; ++j) phi[static_cast<std::size_t>(j)] = re_phi_yx(eval_field(p, grid.at(j)));
  return make_invariant(loop_increment(phi, pi, effective_jump(opt, pi)) / pi, opt.round_tol);
}

IntegerInvariant winding_from_phi_series(const std::vector<double>& k, const std::vector<double>& phi,
                                         double period, const UnwrapOptions& opt) {
  if (k.size() != phi.size()) throw NumericalError(ErrorKind::LengthMismatch, "k and phi sizes differ");
  if (phi.size() < 2) throw std::invalid_argument("phi series needs at least two samples");
  for (std::size_t j = 1; j < k.size(); ++j)
    if (!(k[j] > k[j - 1])) throw std::invalid_argument("k must be strictly increasing");
  return make_invariant(loop_increment(phi, period, effective_jump(opt, period)) / pi, opt.round_tol);
}

IntegerInvariant winding_from_energy_series(const std::vector<cplx>& energies, const UnwrapOptions& opt) {
  std::vector<double> arg(energies.size());
  for (std::size_t j = 0; j < energies.size(); ++j) {
    const cplx e2 = energies[j] * energies[j];
    if (e2 == 0.0) throw NumericalError(ErrorKind::ExceptionalPoint, "E^2 vanishes on the loop");
    arg[j] = std::arg(e2);
  }
  return make_invariant(loop_increment(arg, 2 * pi, effective_jump(opt, 2 * pi)) / (2 * pi), opt.round_tol);
}

IntegerInvariant winding_nu_E(const ModelParams& p, const KGrid& grid, const UnwrapOptions& opt,
                              double ep_threshold) {
  std::vector<cplx> e(static_cast<std::size_t>(grid.n));
  for (int j = 0; j < grid.n; ++j) {
    const ComplexField h = eval_field(p, grid.at(j));
    e[static_cast<std::size_t>(j)] = eigensystem(h, ep_threshold).E_plus;
  }
  return winding_from_energy_series(e, opt);
}

double im_phi_loop_increment(const ModelParams& p, const KGrid& grid) {
  double sum = 0.0;
  for (int j = 0; j < grid.n; ++j) {
    const double k = grid.at(j);
    const ComplexField h = eval_field(p, k);
    const ComplexField dh = field_derivative(p, k);
    const cplx a = h.hx + I * h.hy;
    const cplx b = h.hx - I * h.hy;
    const cplx da = dh.hx + I * dh.hy;
    const cplx db = dh.hx - I * dh.hy;
    sum += -0.5 * (da / a - db / b).real();
  }
  return sum * grid.spacing();
}

WindingReport windings(const ModelParams& p, const KGrid& grid, const UnwrapOptions& opt) {
  WindingReport r;
  r.grid_n = grid.n;
  r.w_plus = winding_w_mu(p, Band::plus, grid);
  r.w_minus = winding_w_mu(p, Band::minus, grid);
  r.w_t = winding_w_t(p, grid, opt);
  r.nu_E = winding_nu_E(p, grid, opt);
  return r;
}

}  // namespace nhtopo
