#include "gafs/gaf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

namespace gafs {

void TruncatedGAF::extend_to(Index m) {
  const Index old = order();
  if (m <= old) return;
  coeffs.conservativeResize(m);
  // Blocks are regenerated from their own stream; the prefix is kept as is.
  for (Index block = old / kGafBlock; block * kGafBlock < m; ++block) {
    RandomStream rng(seed.child(static_cast<std::uint64_t>(block) + 1));
    for (Index i = 0; i < kGafBlock; ++i) {
      const Index k = block * kGafBlock + i;
      const Complex c = rng.complex_normal();
      if (k >= old && k < m) coeffs[k] = c;
    }
  }
}

CharFn TruncatedGAF::polynomial() const {
  VectorXc p(order() + 1);
  p[0] = a;
  p.tail(order()) = -coeffs;
  return CharFn::series(std::move(p));
}

TruncatedGAF sample_gaf(Complex a, Index m, Seed seed) {
  if (a == Complex{0.0, 0.0}) throw InvalidParameter("GAF constant a must be nonzero");
  if (m < 1) throw InvalidDimension("GAF truncation order must be >= 1");
  TruncatedGAF phi{a, VectorXc(0), seed};
  phi.extend_to(m);
  return phi;
}

std::string to_json(const TruncationCertificate& c) {
  nlohmann::json j = {{"q", c.q}, {"M", c.order}, {"margin", c.margin}, {"tailbound", c.tailbound}, {"valid", c.valid}};
  return j.dump();
}

double truncation_tail_bound(double q, Index m) {
  const double md = static_cast<double>(m);
  return std::pow(q, md + 1.0) * ((md + 1.0) - md * q) / ((1.0 - q) * (1.0 - q));
}

TruncationCertificate certify(const TruncatedGAF& phi, double q) {
  if (!(q > 0.0 && q < 1.0)) throw InvalidParameter("working radius q must lie in (0, 1)");
  TruncationCertificate cert;
  cert.q = q;
  cert.order = phi.order();
  cert.tailbound = truncation_tail_bound(q, phi.order());

  // |d/dtheta phi_M(q e^{i theta})| <= lip.
  double lip = 0.0;
  double qk = q;
  for (Index k = 1; k <= phi.order(); ++k, qk *= q) lip += static_cast<double>(k) * std::abs(phi.coeffs[k - 1]) * qk;

  // Arcs (centre, half-width) with bound |phi_M(centre)| - lip * half-width;
  // arcs whose bound does not clear the tail are bisected.
  const CharFn p = phi.polynomial();
  constexpr int kArcs = 256;
  constexpr double kMinHalfWidth = 1e-12;
  const double h0 = std::numbers::pi / kArcs;
  std::vector<std::pair<double, double>> stack;
  cert.margin = std::numeric_limits<double>::infinity();
  for (int j = 0; j < kArcs; ++j) stack.emplace_back((2 * j + 1) * h0, h0);
  while (!stack.empty()) {
    const auto [c, h] = stack.back();
    stack.pop_back();
    const double v = std::abs(p.eval(std::polar(q, c)).value);
    const double b = v - lip * h;
    if (v <= cert.tailbound) {
      cert.margin = b;  // no refinement can clear the tail
      break;
    }
    if (b > cert.tailbound || h < kMinHalfWidth) {
      cert.margin = std::min(cert.margin, b);
      continue;
    }
    stack.emplace_back(c - h / 2, h / 2);
    stack.emplace_back(c + h / 2, h / 2);
  }
  cert.valid = cert.tailbound < cert.margin;
  return cert;
}

namespace {

template <class Work>
auto with_certificate(TruncatedGAF& phi, double q, const GafZeroOptions& opts, Work work) {
  TruncationCertificate cert = certify(phi, q);
  while (!cert.valid) {
    if (!opts.allow_extension || phi.order() * 2 > opts.max_order)
      throw TruncationError("truncation certificate invalid at M = " + std::to_string(phi.order()) +
                            ": q = " + std::to_string(q) + ", margin = " + std::to_string(cert.margin) +
                            ", tailbound = " + std::to_string(cert.tailbound));
    phi.extend_to(phi.order() * 2);
    cert = certify(phi, q);
  }
  return std::make_pair(work(phi.polynomial()), cert);
}

}  // namespace

GafZeros gaf_zeros(TruncatedGAF& phi, double q, const GafZeroOptions& opts) {
  auto [zeros, cert] = with_certificate(phi, q, opts, [&](const CharFn& p) { return find_zeros(p, Disk{{0.0, 0.0}, q}); });
  zeros.provenance = Provenance::GAF;
  return {std::move(zeros), cert};
}

Index gaf_zero_count(TruncatedGAF& phi, double q, TruncationCertificate* cert, const GafZeroOptions& opts) {
  auto [count, c] =
      with_certificate(phi, q, opts, [&](const CharFn& p) { return count_zeros_robust(p, Disk{{0.0, 0.0}, q}); });
  if (cert) *cert = c;
  return count;
}

double rouche_constant(double q) { return q * q * (2.0 - q) / ((1.0 - q) * (1.0 - q)); }

namespace {

// sum_{k>=k0} log(1 - e^{-k^2}), stopping once the factor is within 1e-16 of one.
double log_tail_product(int k0) {
  double s = 0.0;
  for (int k = k0;; ++k) {
    const double e = std::exp(-static_cast<double>(k) * k);
    if (e < 1e-16) break;
    s += std::log1p(-e);
  }
  return s;
}

}  // namespace

EventProbabilities lemma_event_probabilities(Complex a_prime, double q, double s) {
  if (!(q > 0.0 && q < 1.0)) throw DomainError("q must lie in (0, 1)");
  const double ap = std::abs(a_prime);
  const double c = rouche_constant(q);
  if (!(ap > c))
    throw DomainError("|a'| > q^2(2-q)/(1-q)^2 fails: |a'| = " + std::to_string(ap) + ", bound = " + std::to_string(c));
  if (!(s > ap))
    throw DomainError("s > |a'| fails: s = " + std::to_string(s) + ", |a'| = " + std::to_string(ap));

  EventProbabilities p;
  p.r = (ap - c) / q;
  p.log_p_e = std::log(-std::expm1(-p.r * p.r)) + log_tail_product(2);
  const double x = (s - ap) / q;
  p.log_p_b = -s * s / (q * q * q * q) + std::log(-std::expm1(-x * x)) + log_tail_product(3);
  p.p_e = std::exp(p.log_p_e);
  p.p_b = std::exp(p.log_p_b);
  return p;
}

EventCounts simulate_lemma_events(Complex a_prime, double q, double s, Index samples, Seed seed, int k_max) {
  const double ap = std::abs(a_prime);
  const double r = (ap - rouche_constant(q)) / q;
  const double r1 = (s - ap) / q;
  const double r2 = s / (q * q);
  EventCounts out;
  out.samples = samples;
  for (Index i = 0; i < samples; ++i) {
    RandomStream rng(Seed{seed.root, static_cast<std::uint64_t>(i)});
    const double m1 = std::abs(rng.complex_normal());
    const double m2 = std::abs(rng.complex_normal());
    bool tail = true;
    for (int k = 3; k <= k_max; ++k) tail = (std::abs(rng.complex_normal()) <= k) && tail;
    if (tail && m1 < r && m2 <= 2.0) ++out.hits_e;
    if (tail && m1 < r1 && m2 >= r2) ++out.hits_b;
  }
  return out;
}

}  // namespace gafs
