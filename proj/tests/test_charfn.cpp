#include <doctest.h>

#include <cmath>
#include <numbers>

#include "gafs/charfn.hpp"
#include "gafs/models.hpp"

using namespace gafs;

namespace {

CharFn quadratic() {
  VectorXc c(3);
  c << -0.25, 0.0, 1.0;
  return CharFn::series(c);
}

struct HaarCase {
  MatrixXc ua;
  CharFn f;
};

HaarCase haar_case(Index n, Complex a, std::uint64_t s) {
  const MatrixXc u = sample_haar_unitary(n, Seed{300, s});
  const VectorXc v = sample_unit_vector(n, Seed{301, s});
  return {u * build_perturbation(PerturbationParams::from_strength(a, v)), CharFn::fn(a, spectral_data(u, v))};
}

}  // namespace

TEST_CASE("f_N at the origin") {
  const Complex a{0.7, 0.2};
  const SpectralData sd = sample_spectral_data(ModelSpec::haar(), 10, Seed{1, 0});
  const CharFn f = CharFn::fn(a, sd);
  const Eval e = f.eval(0.0);
  CHECK(e.value == a);
  const Complex s1 = (sd.weights.cast<Complex>().array() * sd.phases.conjugate().array()).sum();
  CHECK(std::abs(e.derivative + (std::sqrt(10.0) - a) * s1) <= 1e-13);
  CHECK(f.at_zero() == a);

  const CharFn g = CharFn::gn(a, sd);
  CHECK(std::abs(g.eval(0.0).value - a / std::sqrt(2.0)) <= 1e-15);
  // g_N = f_N / sqrt(2)
  const Complex z{0.3, -0.4};
  CHECK(std::abs(g.eval(z).value - f.eval(z).value / std::sqrt(2.0)) <= 1e-13);
}

TEST_CASE("n = 1 closed form") {
  const Complex a{0.4, 0.3};
  const double theta = 1.1;
  SpectralData sd;
  sd.n = 1;
  sd.phases = VectorXc::Constant(1, std::polar(1.0, theta));
  sd.weights = VectorXr::Ones(1);
  const CharFn f = CharFn::fn(a, sd);
  const Complex root = a * std::polar(1.0, theta);
  CHECK(std::abs(f.eval(root).value) <= 1e-15);
  const PointSet z = find_zeros(f, Disk{0.0, std::abs(a) + 0.1});
  REQUIRE(z.size() == 1);
  CHECK(std::abs(z.points[0] - root) <= 1e-10);
}

TEST_CASE("pole proximity") {
  SpectralData sd;
  sd.n = 2;
  sd.phases = VectorXc(2);
  sd.phases << Complex{1.0, 0.0}, Complex{-1.0, 0.0};
  sd.weights = VectorXr::Constant(2, 0.5);
  const CharFn f = CharFn::fn(1.0, sd);
  CHECK_THROWS_AS(f.eval(Complex{1.0, 0.0}), PoleProximityError);
  CHECK_THROWS_AS(f.eval(Complex{0.0, 1.0}), PoleProximityError);
  CHECK_NOTHROW(f.eval(Complex{0.5, 0.0}));
}

TEST_CASE("quadratic zero counting and location") {
  const CharFn f = quadratic();
  CHECK(count_zeros(f, Disk{0.0, 0.6}) == 2);
  CHECK(count_zeros(f, Disk{0.0, 0.4}) == 0);
  PointSet z = find_zeros(f, Disk{0.0, 0.6});
  REQUIRE(z.size() == 2);
  std::sort(z.points.begin(), z.points.end(), [](Complex x, Complex y) { return x.real() < y.real(); });
  CHECK(std::abs(z.points[0] + 0.5) <= 1e-10);
  CHECK(std::abs(z.points[1] - 0.5) <= 1e-10);
  CHECK(z.provenance == Provenance::Rootfinder);
}

TEST_CASE("series oracle for f_N") {
  const Index n = 24;
  const Complex a{1.0, 0.0};
  const SpectralData sd = sample_spectral_data(ModelSpec::haar(), n, Seed{2, 0});
  const CharFn f = CharFn::fn(a, sd);
  VectorXc s(201);
  s[0] = 0.0;
  for (int k = 1; k <= 200; ++k) s[k] = sd.adjoint_moment(k);
  for (Complex z : {Complex{0.5, 0.0}, Complex{0.0, -0.5}, Complex{0.2, 0.3}, Complex{-0.35, 0.35}}) {
    Complex sum{0.0, 0.0};
    for (int k = 200; k >= 1; --k) sum = (sum + s[k]) * z;
    const Complex direct = a - (std::sqrt(static_cast<double>(n)) - a) * sum;
    CHECK(std::abs(f.eval(z).value - direct) <= 1e-9);
  }
}

TEST_CASE("zeros of f_N are the eigenvalues of UA") {
  for (std::uint64_t s = 0; s < 20; ++s) {
    const HaarCase c = haar_case(16, 1.0, s);
    const PointSet ev = spectrum(c.ua);
    for (Complex lambda : ev.points) CHECK(std::abs(c.f.eval(lambda).value) <= 1e-7 * c.f.scale(lambda));
  }
}

TEST_CASE("count in D(0, 0.9) matches the eigensolver over 1000 samples") {
  const Disk disk{0.0, 0.9};
  int mismatches = 0;
  for (std::uint64_t s = 0; s < 1000; ++s) {
    const HaarCase c = haar_case(16, 1.0, s);
    if (count_zeros_robust(c.f, disk) != static_cast<Index>(spectrum(c.ua).count_in(disk))) ++mismatches;
  }
  CHECK(mismatches == 0);
}

TEST_CASE("located zeros match the eigensolver at n = 32") {
  const Disk disk{0.0, 0.8};
  for (std::uint64_t s = 0; s < 20; ++s) {
    const HaarCase c = haar_case(32, 1.0, s);
    const PointSet zeros = find_zeros_robust(c.f, disk);
    const PointSet ev = spectrum(c.ua).restricted_to(disk);
    REQUIRE(zeros.size() == ev.size());
    if (ev.size() > 0) CHECK(hausdorff_distance(zeros, ev) <= 1e-8);
  }
}

TEST_CASE("count equals the number of located zeros and is additive over an annulus") {
  for (std::uint64_t s = 0; s < 20; ++s) {
    const HaarCase c = haar_case(20, Complex{0.8, 0.4}, s);
    const Index inner = count_zeros_robust(c.f, Disk{0.0, 0.4});
    const Index outer = count_zeros_robust(c.f, Disk{0.0, 0.85});
    const PointSet z = find_zeros_robust(c.f, Disk{0.0, 0.85});
    CHECK(static_cast<Index>(z.size()) == outer);
    Index annulus = 0;
    for (Complex w : z.points) annulus += std::abs(w) >= 0.4 ? 1 : 0;
    CHECK(inner + annulus == outer);
  }
}

TEST_CASE("supnorm against the area integral") {
  VectorXc one(1);
  one << 1.0;
  // K a single point: both sides are 1.
  const SupnormCheck c0 = supnorm_integral_check(CharFn::series(one), Disk{0.0, 0.0}, 0.3, 2);
  CHECK(c0.holds);
  CHECK(std::abs(c0.lhs - c0.rhs) <= kSupnormTolerance);
  // f = 1 on a disk: rhs = ((r + delta) / delta)^2.
  const SupnormCheck c1 = supnorm_integral_check(CharFn::series(one), Disk{0.0, 0.5}, 0.2, 2);
  CHECK(c1.holds);
  CHECK(c1.rhs == doctest::Approx(std::pow(0.7 / 0.2, 2)).epsilon(1e-9));

  // f = z, K = D(0, 0.5), delta = 0.1: lhs 0.25, rhs = 0.6^4 / (2 * 0.01).
  VectorXc z(2);
  z << 0.0, 1.0;
  const SupnormCheck cz = supnorm_integral_check(CharFn::series(z), Disk{0.0, 0.5}, 0.1, 2);
  CHECK(cz.holds);
  CHECK(cz.lhs == doctest::Approx(0.25).epsilon(1e-9));
  CHECK(cz.rhs == doctest::Approx(std::pow(0.6, 4) / 0.02).epsilon(1e-9));

  CHECK_THROWS_AS(supnorm_integral_check(CharFn::series(one), Disk{0.0, 0.5}, 0.0, 2), InvalidParameter);
  CHECK_THROWS_AS(supnorm_integral_check(CharFn::series(one), Disk{0.0, 0.5}, 0.1, 0), InvalidParameter);
}

TEST_CASE("supnorm inequality for random degree-10 polynomials") {
  RandomStream r(Seed{400, 0});
  for (int i = 0; i < 100; ++i) {
    VectorXc c(11);
    for (Index k = 0; k < 11; ++k) c[k] = r.complex_normal();
    CHECK(supnorm_integral_check(CharFn::series(c), Disk{0.0, 0.5}, 0.2, 2).holds);
  }
}
