#pragma once

#include <optional>
#include <string>

#include "gafs/sampling.hpp"
#include "gafs/types.hpp"

namespace gafs {

enum class BaseKind { Haar, VDVStar };

const char* to_string(BaseKind k);

/// Law of the unperturbed unitary: Haar, or M = V D V* with V Haar and D
/// diagonal with i.i.d. entries drawn from `law`.
struct ModelSpec {
  BaseKind kind = BaseKind::Haar;
  CircularLaw law;

  static ModelSpec haar() { return {}; }
  static ModelSpec vdv(const CircularLaw& law) { return {BaseKind::VDVStar, law}; }

  /// a' / a for the limiting function: 1 for Haar, 1/sqrt(2) for V D V*.
  double limit_factor() const;
  /// Scale turning v*(U*)^k v into a coefficient with unit second moment:
  /// sqrt(n) for Haar, sqrt(n/2) for V D V*.
  double coefficient_scale(Index n) const;
};

struct BaseModel {
  ModelSpec spec;
  MatrixXc matrix;
};

BaseModel sample_base_model(const ModelSpec& spec, Index n, Seed seed);

/// Rank-one contraction A = I - (1 - s) v v*. In the a-form s = a n^{-1/2}
/// with a != 0; in the t-form s = t with |t| <= 1.
struct PerturbationParams {
  Index n = 0;
  Complex contraction{1.0, 0.0};
  VectorXc v;

  static PerturbationParams from_strength(Complex a, const VectorXc& v);
  static PerturbationParams from_time(double t, const VectorXc& v);

  Complex strength() const { return contraction * std::sqrt(static_cast<double>(n)); }
};

MatrixXc build_perturbation(const PerturbationParams& params);

struct SpectrumOptions {
  Index max_n = 1024;
  std::string diagnostic;  // e.g. the seed, echoed on failure
};

PointSet spectrum(const MatrixXc& m, const SpectrumOptions& opts = {});

/// Spectral measure of v with respect to a unitary: phases e^{i theta_k} and
/// weights w_k = |<v, r_k>|^2. This is all f_N and g_N depend on.
struct SpectralData {
  Index n = 0;  // dimension of the underlying matrix
  VectorXc phases;
  VectorXr weights;
  bool degenerate = false;  // phase clusters were merged

  /// v*(U*)^k v = sum_j w_j conj(phase_j)^k.
  Complex adjoint_moment(int k) const;
  void validate() const;
};

/// Phases closer than this are merged; their summed weight is basis-independent.
inline constexpr double kPhaseClusterTolerance = 1e-8;

SpectralData spectral_data(const MatrixXc& unitary, const VectorXc& v);
inline SpectralData spectral_data(const BaseModel& base, const VectorXc& v) {
  return spectral_data(base.matrix, v);
}

/// Samples the spectral data without forming a matrix. Haar: CUE phases and
/// flat Dirichlet weights via Verblunsky coefficients. V D V*: i.i.d. phases
/// and flat Dirichlet weights. Same law as spectral_data(sample_base_model()).
SpectralData sample_spectral_data(const ModelSpec& spec, Index n, Seed seed);

}  // namespace gafs
