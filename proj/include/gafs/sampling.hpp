#pragma once

#include <cstdint>
#include <random>

#include "gafs/types.hpp"

namespace gafs {

/// Identifies one reproducible random stream. `stream` is normally the Monte
/// Carlo sample index, so samples do not depend on evaluation order.
struct Seed {
  std::uint64_t root = 0;
  std::uint64_t stream = 0;

  /// Independent sub-stream for a different purpose within the same sample.
  Seed child(std::uint64_t tag) const;

  friend bool operator==(const Seed&, const Seed&) = default;
};

std::uint64_t splitmix64(std::uint64_t x);

/// Deterministic generator keyed by a Seed. The engine is mt19937_64, whose
/// output sequence is fixed by the standard; all transforms to floating point
/// are implemented here so results are bit-identical across standard libraries.
class RandomStream {
 public:
  explicit RandomStream(Seed seed);

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform on the open interval (0, 1).
  double uniform();
  double normal();
  /// Standard complex Gaussian: independent parts of variance 1/2 each, so
  /// E|c|^2 = 1 and |c|^2 ~ Exp(1). Note this is NOT unit variance per part.
  Complex complex_normal();
  double exponential() { return -std::log(uniform()); }

 private:
  std::mt19937_64 engine_;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

struct CircularLaw {
  enum class Kind { UniformCircle, WrappedNormal, WrappedCauchy };

  Kind kind = Kind::UniformCircle;
  double location = 0.0;  // mu or x0, radians
  double spread = 0.0;    // sigma^2 or gamma

  static CircularLaw uniform() { return {}; }
  static CircularLaw wrapped_normal(double mu, double sigma2);
  static CircularLaw wrapped_cauchy(double x0, double gamma);

  void validate() const;
  /// Closed-form E[Z^k].
  Complex moment(int k) const;
  /// b = sup_{k>=1} |E[Z^k]|.
  double sup_moment() const;

  friend bool operator==(const CircularLaw&, const CircularLaw&) = default;
};

const char* to_string(CircularLaw::Kind k);

Complex sample_complex_gaussian(Seed seed);

/// Haar unitary by QR of a complex Ginibre matrix with the diagonal of R
/// rephased to the positive reals (without the rephasing the law is not Haar).
MatrixXc sample_haar_unitary(Index n, RandomStream& rng);
MatrixXc sample_haar_unitary(Index n, Seed seed);

VectorXc sample_circular(const CircularLaw& law, Index n, RandomStream& rng);
VectorXc sample_circular(const CircularLaw& law, Index n, Seed seed);

/// Uniform on the complex unit sphere (normalised complex Gaussian vector).
VectorXc sample_unit_vector(Index n, RandomStream& rng);
VectorXc sample_unit_vector(Index n, Seed seed);

/// Flat Dirichlet(1,...,1) vector: the law of |<e1, column_k(V)>|^2 for Haar V.
VectorXr sample_flat_dirichlet(Index n, RandomStream& rng);

/// max |U*U - I| entrywise.
double unitarity_residual(const MatrixXc& u);

}  // namespace gafs
