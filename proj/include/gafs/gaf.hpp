#pragma once

#include <string>

#include "gafs/charfn.hpp"
#include "gafs/sampling.hpp"
#include "gafs/types.hpp"

namespace gafs {

/// phi(z) = a - sum_{k=1}^{M} c_k z^k with c_k i.i.d. standard complex
/// Gaussian. Coefficients are drawn in fixed blocks keyed by the seed, so
/// extending M never changes the existing prefix.
struct TruncatedGAF {
  Complex a{1.0, 0.0};
  VectorXc coeffs;  // coeffs[k-1] = c_k
  Seed seed;

  Index order() const { return coeffs.size(); }
  void extend_to(Index m);
  CharFn polynomial() const;
};

inline constexpr Index kGafBlock = 64;
inline constexpr Index kGafMaxOrder = 4096;

TruncatedGAF sample_gaf(Complex a, Index m, Seed seed);

struct TruncationCertificate {
  double q = 0.0;
  Index order = 0;
  double margin = 0.0;     // lower bound on min |phi_M| over |z| = q
  double tailbound = 0.0;  // sum_{k>M} k q^k
  bool valid = false;
};

std::string to_json(const TruncationCertificate& c);

/// sum_{k>M} k q^k in closed form.
double truncation_tail_bound(double q, Index m);

TruncationCertificate certify(const TruncatedGAF& phi, double q);

struct GafZeroOptions {
  bool allow_extension = true;
  Index max_order = kGafMaxOrder;
};

struct GafZeros {
  PointSet zeros;
  TruncationCertificate certificate;
};

/// Zeros in D(0, q). Doubles the order (extending phi in place) until the
/// certificate holds.
GafZeros gaf_zeros(TruncatedGAF& phi, double q, const GafZeroOptions& opts = {});

/// Same certification, but only the number of zeros in D(0, q).
Index gaf_zero_count(TruncatedGAF& phi, double q, TruncationCertificate* cert = nullptr,
                     const GafZeroOptions& opts = {});

/// q^2 (2 - q) / (1 - q)^2 = sum_{k>=2} k q^k.
double rouche_constant(double q);

struct EventProbabilities {
  double r = 0.0;
  double p_e = 0.0;
  double log_p_e = 0.0;
  double p_b = 0.0;  // may underflow to 0; use log_p_b
  double log_p_b = 0.0;
};

/// Closed-form probabilities of the two coefficient events that force zero
/// and at least two zeros of phi_{a'} in D(0, q):
///   E = {|c_1| < r} and {|c_k| <= k, k >= 2},  r = (|a'| - rouche_constant(q)) / q
///   B = {|c_1| < (s - |a'|)/q} and {|c_2| >= s/q^2} and {|c_k| <= k, k >= 3}
/// Products are truncated once a factor is within 1e-16 of one.
EventProbabilities lemma_event_probabilities(Complex a_prime, double q, double s);

struct EventCounts {
  Index samples = 0;
  Index hits_e = 0;
  Index hits_b = 0;
};

/// Direct Monte Carlo of E and B with coefficients up to k_max.
EventCounts simulate_lemma_events(Complex a_prime, double q, double s, Index samples, Seed seed, int k_max = 50);

}  // namespace gafs
