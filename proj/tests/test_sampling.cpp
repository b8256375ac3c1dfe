#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "gafs/sampling.hpp"
#include "gafs/stats.hpp"
#include "testing.hpp"

using namespace gafs;

TEST_CASE("seed streams are reproducible and independent") {
  RandomStream a(Seed{7, 3}), b(Seed{7, 3}), c(Seed{7, 4}), d(Seed{7, 3}.child(1));
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next_u64();
    CHECK(x == b.next_u64());
    CHECK(x != c.next_u64());
    CHECK(x != d.next_u64());
  }
  CHECK(Seed{7, 3}.child(1) == Seed{7, 3}.child(1));
  CHECK_FALSE(Seed{7, 3}.child(1) == Seed{7, 3}.child(2));
}

TEST_CASE("uniform stays in the open interval") {
  RandomStream r(Seed{1, 0});
  for (int i = 0; i < 100000; ++i) {
    const double u = r.uniform();
    REQUIRE(u > 0.0);
    REQUIRE(u < 1.0);
  }
}

TEST_CASE("complex normal has E|c|^2 = 1") {
  RandomStream r(Seed{2, 0});
  const int m = 1000000;
  double abs2 = 0.0, tail = 0.0;
  Complex mean{0.0, 0.0};
  for (int i = 0; i < m; ++i) {
    const Complex c = r.complex_normal();
    abs2 += std::norm(c);
    mean += c;
    tail += std::norm(c) > 1.0 ? 1.0 : 0.0;
  }
  CHECK(std::abs(abs2 / m - 1.0) <= 0.005);
  CHECK(std::abs(mean.real() / m) <= 0.005);
  CHECK(std::abs(mean.imag() / m) <= 0.005);
  CHECK(std::abs(tail / m - std::exp(-1.0)) <= 0.003);
}

TEST_CASE("haar sampler") {
  CHECK_THROWS_AS(sample_haar_unitary(0, Seed{1, 0}), InvalidDimension);
  for (Index n : {1, 8, 64}) {
    const MatrixXc u = sample_haar_unitary(n, Seed{3, static_cast<std::uint64_t>(n)});
    CHECK(unitarity_residual(u) <= 1e-12 * static_cast<double>(n));
  }
  CHECK(sample_haar_unitary(5, Seed{4, 1}) == sample_haar_unitary(5, Seed{4, 1}));
}

TEST_CASE("haar trace moments at n = 8") {
  const MCEstimate l3 = trace_moment(8, 3, 100000, Seed{5, 0});
  CHECK(std::abs(l3.value.real() - 3.0) <= 3.0 * l3.std_err);
  const MCEstimate l12 = trace_moment(8, 12, 100000, Seed{6, 0});
  CHECK(std::abs(l12.value.real() - 8.0) <= 3.0 * l12.std_err);
}

TEST_CASE("left invariance of the haar law") {
  // W: 3x3 discrete Fourier matrix.
  const Index n = 3;
  MatrixXc w(n, n);
  for (Index j = 0; j < n; ++j)
    for (Index k = 0; k < n; ++k)
      w(j, k) = std::polar(1.0 / std::sqrt(3.0), 2.0 * std::numbers::pi * static_cast<double>(j * k) / 3.0);
  const int m = 100000;
  std::vector<double> x(m), y(m);
  for (int i = 0; i < m; ++i) {
    x[static_cast<std::size_t>(i)] = sample_haar_unitary(n, Seed{8, static_cast<std::uint64_t>(i)})(0, 0).real();
    y[static_cast<std::size_t>(i)] = (w * sample_haar_unitary(n, Seed{9, static_cast<std::uint64_t>(i)}))(0, 0).real();
  }
  CHECK(testing::ks_two_sample_p(x, y) > 0.001);
}

TEST_CASE("circular law moments") {
  CHECK_THROWS_AS(CircularLaw::wrapped_cauchy(0.0, 0.0).validate(), InvalidParameter);
  CHECK_THROWS_AS(CircularLaw::wrapped_normal(0.0, -1.0).validate(), InvalidParameter);

  // Closed forms.
  CHECK(std::abs(CircularLaw::wrapped_normal(0.0, 2.0).moment(1)) == doctest::Approx(std::exp(-1.0)));
  CHECK(std::abs(CircularLaw::uniform().moment(5)) == 0.0);
  const Complex wc = CircularLaw::wrapped_cauchy(0.5, 1.0).moment(2);
  CHECK(wc.real() == doctest::Approx(std::exp(-2.0) * std::cos(1.0)));
  CHECK(wc.imag() == doctest::Approx(std::exp(-2.0) * std::sin(1.0)));

  const int m = 1000000;
  auto mc = [&](const CircularLaw& law, int k, std::uint64_t root) {
    const VectorXc z = sample_circular(law, m, Seed{root, 0});
    return z.array().pow(static_cast<double>(k)).mean();
  };
  CHECK(std::abs(std::abs(mc(CircularLaw::wrapped_normal(0.0, 2.0), 1, 10)) - std::exp(-1.0)) <= 0.003);
  CHECK(std::abs(mc(CircularLaw::uniform(), 5, 11)) <= 0.003);
  CHECK(std::abs(mc(CircularLaw::wrapped_cauchy(0.5, 1.0), 2, 12) - wc) <= 0.003);
}

TEST_CASE("circular law empirical moments k = 1..10 within 4 standard errors") {
  const std::vector<CircularLaw> laws = {CircularLaw::uniform(), CircularLaw::wrapped_normal(0.3, 0.5),
                                         CircularLaw::wrapped_cauchy(-1.0, 0.2)};
  std::uint64_t root = 20;
  for (const auto& law : laws) {
    const VectorXc z = sample_circular(law, 200000, Seed{root++, 0});
    for (int k = 1; k <= 10; ++k) {
      std::vector<Complex> xs(static_cast<std::size_t>(z.size()));
      for (Index i = 0; i < z.size(); ++i) xs[static_cast<std::size_t>(i)] = std::pow(z[i], k);
      const MCEstimate e = estimate_of(xs);
      CHECK(std::abs(e.value - law.moment(k)) <= 4.0 * e.std_err);
    }
  }
}

TEST_CASE("unit vectors") {
  CHECK_THROWS_AS(sample_unit_vector(0, Seed{1, 0}), InvalidDimension);
  const VectorXc one = sample_unit_vector(1, Seed{1, 0});
  CHECK(std::abs(std::abs(one[0]) - 1.0) <= 1e-14);

  const int m = 100000;
  double v1 = 0.0, v12 = 0.0;
  for (int i = 0; i < m; ++i) {
    const VectorXc v = sample_unit_vector(4, Seed{30, static_cast<std::uint64_t>(i)});
    CHECK(std::abs(v.norm() - 1.0) <= 1e-14);
    v1 += std::norm(v[0]);
    v12 += std::norm(v[0]) * std::norm(v[1]);
  }
  CHECK(std::abs(v1 / m - 0.25) <= 0.005);
  CHECK(std::abs(v12 / m - 0.05) <= 0.002);
}

TEST_CASE("flat dirichlet sums to one") {
  RandomStream r(Seed{40, 0});
  const VectorXr w = sample_flat_dirichlet(6, r);
  CHECK(w.minCoeff() > 0.0);
  CHECK(std::abs(w.sum() - 1.0) <= 1e-14);
}
