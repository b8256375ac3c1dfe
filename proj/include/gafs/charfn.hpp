#pragma once

#include "gafs/models.hpp"
#include "gafs/types.hpp"

namespace gafs {

// Numerical margins, all in one place.
inline constexpr double kPoleMargin = 1e-12;          // min |1 - z conj(phase)|
inline constexpr double kUnitDiskMargin = 1e-9;       // |z| < 1 - margin
inline constexpr double kContourJitter = 1e-4;        // relative radius jitter
inline constexpr double kRoundingResidual = 0.25;     // argument principle
inline constexpr double kNewtonResidual = 1e-10;      // |f| <= this * scale(z)
inline constexpr Index kMinContourNodes = 64;
inline constexpr Index kMaxContourNodes = 8192;

struct Eval {
  Complex value;
  Complex derivative;
};

/// Scalar characteristic function whose zeros are the eigenvalues.
///   FN:     f(z) = a  - (sqrt(n)   - a)  S(z)
///   GN:     g(z) = a' - (sqrt(n/2) - a') S(z),  a' = a / sqrt(2)
///   Series: p(z) = sum_k coeffs[k] z^k
/// with S(z) = sum_j w_j u_j / (1 - u_j), u_j = z conj(phase_j), evaluated in
/// closed form. FN and GN differ by the constant factor sqrt(2).
class CharFn {
 public:
  enum class Kind { FN, GN, Series };

  static CharFn fn(Complex a, SpectralData data);
  static CharFn gn(Complex a, SpectralData data);
  static CharFn series(VectorXc coeffs);

  Kind kind() const { return kind_; }
  /// f(0): a for FN, a' for GN, coeffs[0] for Series.
  Complex at_zero() const { return c0_; }
  const SpectralData& data() const { return data_; }
  const VectorXc& coeffs() const { return coeffs_; }

  Eval eval(Complex z) const;
  /// Sum of the magnitudes of the terms of f(z); residuals are relative to it.
  double scale(Complex z) const;
  bool has_poles() const { return kind_ != Kind::Series; }

 private:
  Kind kind_ = Kind::Series;
  Complex c0_{0.0, 0.0};
  Complex c1_{0.0, 0.0};
  SpectralData data_;
  VectorXc coeffs_;
};

/// sqrt(n) * S(z), the common random part of f_N and g_N.
Complex scaled_resolvent_sum(const SpectralData& data, Complex z);

/// Winding number of f around the circle bounding `disk`, with the radius
/// also jittered by +-kContourJitter; all three counts must agree.
Index count_zeros(const CharFn& f, const Disk& disk);

/// Zeros inside `disk` by recursive sector subdivision and Newton.
PointSet find_zeros(const CharFn& f, const Disk& disk);

/// Number of zeros in the open disk. When the contour passes too close to a
/// zero, locates the zeros in a slightly larger disk and counts those inside.
Index count_zeros_robust(const CharFn& f, const Disk& disk);

/// find_zeros, falling back to a slightly larger disk (restricted afterwards)
/// when a zero sits in the jitter band of the boundary.
PointSet find_zeros_robust(const CharFn& f, const Disk& disk);

struct SupnormCheck {
  double lhs = 0.0;  // sup_K |f|^p
  double rhs = 0.0;  // (pi delta^2)^{-1} integral over the delta-neighbourhood of K
  bool holds = false;
};

inline constexpr double kSupnormTolerance = 1e-6;

/// Compares ||f||_K^p with the normalised area integral of |f|^p over the
/// delta-neighbourhood of K.
SupnormCheck supnorm_integral_check(const CharFn& f, const Disk& k, double delta, int p);

}  // namespace gafs
