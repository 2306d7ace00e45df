#include <doctest.h>

#include <random>

#include "nhtopo/band_model.hpp"
#include "nhtopo/errors.hpp"

using namespace nhtopo;

namespace {

ComplexField random_field(std::mt19937_64& rng, double scale = 2.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  for (;;) {
    ComplexField h{cplx(u(rng), u(rng)), cplx(u(rng), u(rng)), cplx(u(rng), u(rng))};
    if (std::abs(h.energy_squared()) >= 1e-3) return h;
  }
}

bool close(cplx a, cplx b, double tol) { return std::abs(a - b) <= tol; }

}  // namespace

TEST_CASE("field substitution") {
  const ModelParams exp1{1, 1, 0, 0.3, 0.5};
  ComplexField h = eval_field(exp1, 0.0);
  CHECK(close(h.hx, 2.0, 1e-15));
  CHECK(close(h.hy, cplx(0, -0.3), 1e-15));
  CHECK(close(h.hz, 0.5, 1e-15));

  h = eval_field(exp1, pi);
  CHECK(close(h.hx, 0.0, 1e-15));
  CHECK(close(h.hy, cplx(0, -0.3), 1e-15));

  h = eval_field(ModelParams{3, 1, 1, 0.3, 0.5}, 0.0);
  CHECK(close(h.hx, 5.0, 1e-15));
  CHECK(close(h.hy, cplx(0, -0.3), 1e-15));
}

TEST_CASE("field derivative matches centered differences") {
  const ModelParams p{0.7, 1.1, 0.4, 0.3, 0.2};
  for (double k : {-2.9, -1.0, 0.3, 2.2}) {
    const double d = 1e-6;
    const ComplexField a = eval_field(p, k + d), b = eval_field(p, k - d);
    const ComplexField dh = field_derivative(p, k);
    CHECK(close(dh.hx, (a.hx - b.hx) / (2 * d), 1e-8));
    CHECK(close(dh.hy, (a.hy - b.hy) / (2 * d), 1e-8));
  }
}

TEST_CASE("generated fields have the stated imaginary parts") {
  const ModelParams p{0.3, 1.2, 0.5, 0.37, -0.8};
  for (double k = -pi; k < pi; k += 0.1) {
    const ComplexField h = eval_field(p, k);
    CHECK(h.hx.imag() == 0.0);
    CHECK(h.hy.imag() == doctest::Approx(-0.37));
    CHECK(h.hz.imag() == 0.0);
  }
}

TEST_CASE("chiral symmetry when hz = 0") {
  const ModelParams p{0.8, 1, 0.3, 0.4, 0.0};
  const Mat2& sz = pauli(3);
  for (double k = -pi; k < pi; k += 0.37) {
    const Mat2 H = eval_field(p, k).matrix();
    CHECK((sz * H * sz + H).norm() == 0.0);
  }
}

TEST_CASE("sigma_x eigensystem") {
  const EigenSystem es = eigensystem({1.0, 0.0, 0.0});
  CHECK(close(es.E_plus, 1.0, 1e-15));
  const double r = 1 / std::sqrt(2.0);
  CHECK(close(es.right[0](0), r, 1e-15));
  CHECK(close(es.right[0](1), r, 1e-15));
  CHECK(close(es.right[1](0), r, 1e-15));
  CHECK(close(es.right[1](1), -r, 1e-15));
}

TEST_CASE("experimental field at k = 0 has E = sqrt(4.16)") {
  const EigenSystem es = eigensystem({2.0, cplx(0, -0.3), 0.5});
  CHECK(close(es.E_plus, std::sqrt(4.16), 1e-12));
  CHECK(es.E_plus.real() == doctest::Approx(2.039608).epsilon(1e-6));
}

TEST_CASE("exceptional point is rejected") {
  try {
    eigensystem({1.0, I, 0.0});
    FAIL("expected ExceptionalPoint");
  } catch (const NumericalError& e) {
    CHECK(e.kind() == ErrorKind::ExceptionalPoint);
  }
  CHECK_NOTHROW(eigensystem({1.0, I, 0.0}, 0.0));
}

TEST_CASE("principal branch") {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 2000; ++i) {
    const EigenSystem es = eigensystem(random_field(rng));
    CHECK((es.E_plus.real() > 0 || (es.E_plus.real() == 0 && es.E_plus.imag() > 0)));
  }
  // E^2 on the negative real axis: E = +i|E|
  const EigenSystem es = eigensystem({0.0, 0.0, I});
  CHECK(close(es.E_plus, I, 1e-15));
}

TEST_CASE("axis-aligned field returns the canonical basis") {
  EigenSystem es = eigensystem({0.0, 0.0, 0.7});
  CHECK(es.branch.axis_aligned);
  CHECK(close(es.E_plus, 0.7, 1e-15));
  CHECK(close(es.right[0](0), 1.0, 1e-15));
  CHECK(close(es.right[0](1), 0.0, 1e-15));
  CHECK(close(es.right[1](0), 0.0, 1e-15));
  CHECK(close(es.right[1](1), 1.0, 1e-15));

  es = eigensystem({0.0, 0.0, -0.7});
  CHECK(close(es.E_plus, 0.7, 1e-15));
  CHECK(close(es.right[0](1), 1.0, 1e-15));  // E_+ = -hz belongs to the lower component
  CHECK(close(es.right[1](0), 1.0, 1e-15));
}

TEST_CASE("biorthonormality, completeness and eigen-equations over random fields") {
  std::mt19937_64 rng(2024);
  double worst_bio = 0, worst_comp = 0, worst_right = 0, worst_left = 0;
  for (int i = 0; i < 10000; ++i) {
    const ComplexField h = random_field(rng);
    const EigenSystem es = eigensystem(h);
    const Mat2 H = h.matrix();
    Mat2 completeness = Mat2::Zero();
    for (Band m : {Band::plus, Band::minus}) {
      for (Band n : {Band::plus, Band::minus}) {
        const cplx o = es.overlap(m, es.right[index(n)]);
        worst_bio = std::max(worst_bio, std::abs(o - (m == n ? 1.0 : 0.0)));
      }
      completeness += es.right[index(m)] * es.left[index(m)].transpose();
      worst_right = std::max(worst_right, (H * es.right[index(m)] - es.energy(m) * es.right[index(m)]).norm());
      const Vec2 l = es.left_ket(m);
      worst_left = std::max(worst_left, (H.adjoint() * l - std::conj(es.energy(m)) * l).norm() / l.norm());
    }
    worst_comp = std::max(worst_comp, (completeness - Mat2::Identity()).norm());
  }
  CHECK(worst_bio <= 1e-10);
  CHECK(worst_comp <= 1e-10);
  CHECK(worst_right <= 1e-10);
  CHECK(worst_left <= 1e-10);
}

TEST_CASE("right vectors are stored with unit norm") {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 200; ++i) {
    const EigenSystem es = eigensystem(random_field(rng));
    CHECK(es.right[0].norm() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(es.right[1].norm() == doctest::Approx(1.0).epsilon(1e-14));
  }
}

TEST_CASE("Bloch angles") {
  BlochAngles a = bloch_angles({1.0, 0.0, 0.0});
  CHECK(std::abs(a.phi_yx) < 1e-15);
  CHECK(close(a.beta, pi / 2, 1e-15));

  a = bloch_angles({0.0, 1.0, 0.0});
  CHECK(a.phi_yx.real() == doctest::Approx(pi / 2));

  a = bloch_angles({2.0, cplx(0, -0.3), 0.5});
  CHECK(std::abs(a.phi_yx.real()) < 1e-15);
  CHECK(a.phi_yx.imag() == doctest::Approx(-std::atanh(0.15)).epsilon(1e-13));
  CHECK(a.phi_yx.imag() == doctest::Approx(-0.15114).epsilon(1e-4));

  try {
    bloch_angles({1.0, I, 0.3});
    FAIL("expected BranchPole");
  } catch (const NumericalError& e) {
    CHECK(e.kind() == ErrorKind::BranchPole);
  }
}

TEST_CASE("Bloch angles reproduce the field") {
  std::mt19937_64 rng(77);
  for (int i = 0; i < 2000; ++i) {
    const ComplexField h = random_field(rng);
    if (std::abs(h.hx * h.hx + h.hy * h.hy) < 1e-3) continue;
    const BlochAngles a = bloch_angles(h);
    const EigenSystem es = eigensystem(h);
    CHECK(close(std::cos(a.beta), h.hz / es.E_plus, 1e-10));
    const cplx s = std::sqrt(h.hx * h.hx + h.hy * h.hy);
    const cplx e = std::exp(I * a.phi_yx);
    // sqrt branch is free, so compare up to sign
    const double d = std::min(std::abs(e - (h.hx + I * h.hy) / s), std::abs(e + (h.hx + I * h.hy) / s));
    CHECK(d <= 1e-10);
  }
}

TEST_CASE("complex arctan agrees with the argument form where defined") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-2, 2);
  for (int i = 0; i < 1000; ++i) {
    const ComplexField h{u(rng), cplx(u(rng), u(rng) * 0.3), 0.2};
    const cplx r = h.hy / h.hx;
    if (std::abs(r - I) < 1e-2 || std::abs(r + I) < 1e-2) continue;
    const cplx at = std::atan(r);
    const BlochAngles a = bloch_angles(h);
    CHECK(angle_distance(at.real(), a.phi_yx.real(), pi) < 1e-10);
    CHECK(at.imag() == doctest::Approx(a.phi_yx.imag()).epsilon(1e-9));
  }
}

TEST_CASE("eigenstate textures") {
  const EigenSystem es = eigensystem({1.0, 0.0, 0.0});
  CHECK(eigenstate_texture(es, Band::plus, Axis::x) == doctest::Approx(1.0));
  CHECK(eigenstate_texture(es, Band::minus, Axis::x) == doctest::Approx(-1.0));
  CHECK(std::abs(eigenstate_texture(es, Band::plus, Axis::z)) < 1e-15);
}

TEST_CASE("textures are scale invariant") {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> g;
  for (int i = 0; i < 500; ++i) {
    EigenSystem es = eigensystem(random_field(rng));
    const Texture before = eigen_texture(es, Band::minus);
    const cplx c(g(rng), g(rng));
    es.right[1] *= c;
    const Texture after = eigen_texture(es, Band::minus);
    CHECK(before.x == doctest::Approx(after.x).epsilon(1e-12));
    CHECK(before.y == doctest::Approx(after.y).epsilon(1e-12));
    CHECK(before.z == doctest::Approx(after.z).epsilon(1e-12));
  }
}

TEST_CASE("textures against brute-force expectation values at the showcase k") {
  const ComplexField h = eval_field(ModelParams{1, 1, 0, 0.3, 0.5}, -0.448 * pi);
  const EigenSystem es = eigensystem(h);
  // independent eigenvectors from Eigen's general solver
  Eigen::ComplexEigenSolver<Mat2> solver(h.matrix());
  for (int j = 0; j < 2; ++j) {
    const cplx e = solver.eigenvalues()(j);
    const Band b = std::abs(e - es.E_plus) < std::abs(e + es.E_plus) ? Band::plus : Band::minus;
    const Vec2 v = solver.eigenvectors().col(j);
    const double n = v.squaredNorm();
    for (int alpha = 1; alpha <= 3; ++alpha) {
      const double expect = (v.adjoint() * pauli(alpha) * v)(0, 0).real() / n;
      CHECK(eigenstate_texture(es, b, static_cast<Axis>(alpha - 1)) == doctest::Approx(expect).epsilon(1e-12));
    }
  }
}

TEST_CASE("eigenstate azimuths follow the tangent formulas") {
  std::mt19937_64 rng(99);
  for (int i = 0; i < 2000; ++i) {
    const ComplexField h = random_field(rng);
    if (std::abs(h.hx * h.hx + h.hy * h.hy) < 1e-3) continue;
    const BlochAngles a = bloch_angles(h);
    const EigenSystem es = eigensystem(h);
    const cplx s = std::sin(a.beta / 2.0) * std::cos(std::conj(a.beta) / 2.0);
    const cplx em = std::exp(-I * a.phi_yx), ep = std::exp(I * std::conj(a.phi_yx));
    const cplx tan_pp = I * (em * std::conj(s) - ep * s) / (em * std::conj(s) + ep * s);
    const cplx tan_mm = I * (em * s - ep * std::conj(s)) / (em * s + ep * std::conj(s));
    CHECK(std::abs(tan_pp.imag()) < 1e-8 * (1 + std::abs(tan_pp)));
    CHECK(std::abs(tan_mm.imag()) < 1e-8 * (1 + std::abs(tan_mm)));
    CHECK(angle_distance(std::atan(tan_pp.real()), eigen_azimuth(es, Band::plus), pi) < 1e-7);
    CHECK(angle_distance(std::atan(tan_mm.real()), eigen_azimuth(es, Band::minus), pi) < 1e-7);
  }
}

TEST_CASE("half azimuth sum is congruent to Re phi_yx modulo pi/2") {
  std::mt19937_64 rng(4242);
  double worst = 0;
  int n = 0;
  while (n < 10000) {
    const ComplexField h = random_field(rng);
    if (std::abs(h.hx * h.hx + h.hy * h.hy) < 1e-3) continue;
    const EigenSystem es = eigensystem(h);
    const double s = half_azimuth_sum(eigen_azimuth(es, Band::plus), eigen_azimuth(es, Band::minus));
    worst = std::max(worst, angle_distance(s, re_phi_yx(h), pi / 2));
    ++n;
  }
  CHECK(worst <= 1e-9);
}
