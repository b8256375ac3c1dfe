#include <doctest.h>

#include <cmath>

#include "gafs/gaf.hpp"
#include "gafs/stats.hpp"

using namespace gafs;

TEST_CASE("truncated GAF basics") {
  CHECK_THROWS_AS(sample_gaf(0.0, 8, Seed{1, 0}), InvalidParameter);
  const Complex a{0.6, -0.2};
  TruncatedGAF phi = sample_gaf(a, 10, Seed{1, 0});
  CHECK(phi.polynomial().eval(0.0).value == a);

  // Extending keeps the prefix, across a block boundary too.
  const VectorXc prefix = phi.coeffs;
  phi.extend_to(3 * kGafBlock + 5);
  CHECK(phi.coeffs.head(10) == prefix);
  const TruncatedGAF direct = sample_gaf(a, 3 * kGafBlock + 5, Seed{1, 0});
  CHECK(direct.coeffs == phi.coeffs);
}

TEST_CASE("GAF coefficients are standard complex Gaussians") {
  const int m = 100000;
  const Index order = 4;
  Eigen::VectorXd abs2 = Eigen::VectorXd::Zero(order);
  Complex cross{0.0, 0.0};
  for (int i = 0; i < m; ++i) {
    const TruncatedGAF phi = sample_gaf(1.0, order, Seed{2, static_cast<std::uint64_t>(i)});
    abs2 += phi.coeffs.cwiseAbs2();
    cross += phi.coeffs[0] * std::conj(phi.coeffs[2]);
  }
  for (Index k = 0; k < order; ++k) CHECK(std::abs(abs2[k] / m - 1.0) <= 0.02);
  CHECK(std::abs(cross / static_cast<double>(m)) <= 0.02);
}

TEST_CASE("tail bound closed form") {
  for (double q : {0.1, 0.5, 0.9})
    for (Index m : {1, 5, 40}) {
      double direct = 0.0;
      for (Index k = m + 1; k < 5000; ++k) direct += static_cast<double>(k) * std::pow(q, static_cast<double>(k));
      CHECK(truncation_tail_bound(q, m) == doctest::Approx(direct).epsilon(1e-12));
    }
  CHECK(rouche_constant(0.2) == doctest::Approx(truncation_tail_bound(0.2, 1)).epsilon(1e-14));
}

TEST_CASE("linear truncation") {
  // phi = a - c1 z with a = 1, c1 = 2: single zero at 1/2.
  TruncatedGAF phi{1.0, VectorXc::Constant(1, 2.0), Seed{3, 0}};
  GafZeroOptions fixed;
  fixed.allow_extension = false;
  fixed.max_order = 1;
  TruncationCertificate cert;
  CHECK(gaf_zero_count(phi, 0.3, &cert, fixed) == 0);
  CHECK(cert.valid);
  CHECK(cert.margin <= 0.4 + 1e-12);
  CHECK(cert.margin > cert.tailbound);
  const PointSet z = find_zeros(phi.polynomial(), Disk{0.0, 0.8});
  REQUIRE(z.size() == 1);
  CHECK(std::abs(z.points[0] - 0.5) <= 1e-10);
  // Near the zero no order-1 certificate exists and extension is disabled.
  CHECK_THROWS_AS(gaf_zero_count(phi, 0.6, nullptr, fixed), TruncationError);
}

TEST_CASE("certificate json") {
  TruncatedGAF phi = sample_gaf(1.0, 64, Seed{4, 0});
  const TruncationCertificate c = certify(phi, 0.5);
  const std::string j = to_json(c);
  for (const char* key : {"\"q\"", "\"M\"", "\"margin\"", "\"tailbound\"", "\"valid\""})
    CHECK(j.find(key) != std::string::npos);
}

TEST_CASE("certified counts are stable under doubling the order") {
  for (std::uint64_t s = 0; s < 200; ++s) {
    TruncatedGAF phi = sample_gaf(1.0, 64, Seed{5, s});
    TruncationCertificate cert;
    const Index c1 = gaf_zero_count(phi, 0.5, &cert);
    REQUIRE(cert.valid);
    TruncatedGAF twice = sample_gaf(1.0, 2 * phi.order(), Seed{5, s});
    CHECK(gaf_zero_count(twice, 0.5) == c1);
  }
}

TEST_CASE("zero counts grow with the radius and vanish for large a") {
  const int m = 1000;
  std::vector<double> mean(4, 0.0);
  const double qs[4] = {0.2, 0.4, 0.6, 0.8};
  int none_big_a = 0;
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < 4; ++j) {
      TruncatedGAF phi = sample_gaf(1.0, 64, Seed{6, static_cast<std::uint64_t>(i)});
      mean[static_cast<std::size_t>(j)] += static_cast<double>(gaf_zero_count(phi, qs[j]));
    }
    TruncatedGAF big = sample_gaf(10.0, 64, Seed{7, static_cast<std::uint64_t>(i)});
    none_big_a += gaf_zero_count(big, 0.5) == 0 ? 1 : 0;
  }
  for (int j = 0; j + 1 < 4; ++j) CHECK(mean[static_cast<std::size_t>(j)] <= mean[static_cast<std::size_t>(j + 1)]);
  CHECK(static_cast<double>(none_big_a) / m >= 0.99);
}

TEST_CASE("P(no zero) agrees with a high-order rerun") {
  const Complex ap = 1.0 / std::sqrt(2.0);
  const int m = 5000;
  std::vector<Complex> low(m), high(m);
  for (int i = 0; i < m; ++i) {
    TruncatedGAF a = sample_gaf(ap, 64, Seed{8, static_cast<std::uint64_t>(i)});
    low[static_cast<std::size_t>(i)] = gaf_zero_count(a, 0.5) == 0 ? 1.0 : 0.0;
    TruncatedGAF b = sample_gaf(ap, 512, Seed{9, static_cast<std::uint64_t>(i)});
    GafZeroOptions fixed;
    fixed.allow_extension = false;
    fixed.max_order = 512;
    high[static_cast<std::size_t>(i)] = gaf_zero_count(b, 0.5, nullptr, fixed) == 0 ? 1.0 : 0.0;
  }
  const MCEstimate el = estimate_of(low), eh = estimate_of(high);
  CHECK(el.value.real() > 0.0);
  CHECK(std::abs(el.value.real() - eh.value.real()) <= 3.0 * std::hypot(el.std_err, eh.std_err));
}

TEST_CASE("lemma event probabilities") {
  const EventProbabilities p = lemma_event_probabilities(1.0, 0.2, 2.0);
  CHECK(p.r == doctest::Approx((1.0 - 0.04 * 1.8 / 0.64) / 0.2));
  CHECK(p.p_e > 0.0);
  CHECK(p.p_e < 1.0);
  CHECK(p.log_p_b < 0.0);
  CHECK(std::isfinite(p.log_p_b));
  // log pB is dominated by the |c_2| >= s / q^2 factor.
  CHECK(p.log_p_b <= -2.0 * 2.0 / (0.2 * 0.2 * 0.2 * 0.2) + 1e-9);

  CHECK_THROWS_AS(lemma_event_probabilities(rouche_constant(0.2), 0.2, 1.0), DomainError);
  CHECK_THROWS_AS(lemma_event_probabilities(1.0, 1.2, 2.0), DomainError);
  CHECK_THROWS_AS(lemma_event_probabilities(1.0, 0.2, 0.5), DomainError);

  double prev = 0.0;
  for (double ap : {0.2, 0.5, 1.0, 2.0}) {
    const EventProbabilities e = lemma_event_probabilities(ap, 0.2, 2.0 * ap + 0.1);
    CHECK(e.p_e > prev);
    CHECK(std::isfinite(e.log_p_b));
    CHECK(e.log_p_b < 0.0);
    prev = e.p_e;
  }
}

TEST_CASE("pE against direct simulation of the event") {
  const EventProbabilities p = lemma_event_probabilities(1.0, 0.2, 2.0);
  const Index m = 1000000;
  const EventCounts ev = simulate_lemma_events(1.0, 0.2, 2.0, m, Seed{10, 0});
  const double freq = static_cast<double>(ev.hits_e) / static_cast<double>(m);
  const double se = std::sqrt(p.p_e * (1.0 - p.p_e) / static_cast<double>(m));
  CHECK(std::abs(freq - p.p_e) <= 3.0 * se);
}

TEST_CASE("pB given the rare |c_2| factor") {
  // pB is below 1e-7 wherever the preconditions hold, so the |c_2| >= s/q^2
  // factor e^{-s^2/q^4} is divided out and the rest of B is simulated.
  const double ap = 1.0, q = 0.2, s = 2.0;
  const EventProbabilities p = lemma_event_probabilities(ap, q, s);
  const double y = s / (q * q);
  const double rest = std::exp(p.log_p_b + y * y);
  const double x = (s - ap) / q;
  const int m = 200000;
  int hits = 0;
  for (int i = 0; i < m; ++i) {
    RandomStream r(Seed{11, static_cast<std::uint64_t>(i)});
    bool in = std::abs(r.complex_normal()) < x;
    for (int k = 3; k <= 50; ++k) in = (std::abs(r.complex_normal()) <= k) && in;
    hits += in ? 1 : 0;
  }
  const double freq = static_cast<double>(hits) / m;
  const double se = std::sqrt(rest * (1.0 - rest) / m);
  CHECK(std::abs(freq - rest) <= 3.0 * se + 1e-12);
}
