#include "gafs/sampling.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace gafs {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

Seed Seed::child(std::uint64_t tag) const {
  return Seed{splitmix64(root ^ splitmix64(tag + 0x5851F42D4C957F2Dull)), stream};
}

RandomStream::RandomStream(Seed seed)
    : engine_(splitmix64(splitmix64(seed.root) ^ (seed.stream * 0xD1B54A32D192ED03ull + 1))) {}

double RandomStream::uniform() {
  // 53 random bits, shifted by half an ulp so 0 is never returned.
  return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

double RandomStream::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_normal_;
  }
  const double r = std::sqrt(-2.0 * std::log(uniform()));
  const double theta = 2.0 * std::numbers::pi * uniform();
  spare_normal_ = r * std::sin(theta);
  has_spare_ = true;
  return r * std::cos(theta);
}

Complex RandomStream::complex_normal() {
  // Box-Muller in polar form: |c|^2 = -log u is exactly Exp(1).
  const double r = std::sqrt(-std::log(uniform()));
  const double theta = 2.0 * std::numbers::pi * uniform();
  return std::polar(r, theta);
}

CircularLaw CircularLaw::wrapped_normal(double mu, double sigma2) {
  CircularLaw law{Kind::WrappedNormal, mu, sigma2};
  law.validate();
  return law;
}

CircularLaw CircularLaw::wrapped_cauchy(double x0, double gamma) {
  CircularLaw law{Kind::WrappedCauchy, x0, gamma};
  law.validate();
  return law;
}

void CircularLaw::validate() const {
  switch (kind) {
    case Kind::UniformCircle:
      return;
    case Kind::WrappedNormal:
      if (!(spread >= 0.0) || !std::isfinite(spread) || !std::isfinite(location))
        throw InvalidParameter("wrapped normal requires sigma2 >= 0, got " + std::to_string(spread));
      return;
    case Kind::WrappedCauchy:
      if (!(spread > 0.0) || !std::isfinite(spread) || !std::isfinite(location))
        throw InvalidParameter("wrapped Cauchy requires gamma > 0, got " + std::to_string(spread));
      return;
  }
}

Complex CircularLaw::moment(int k) const {
  const double kd = k;
  switch (kind) {
    case Kind::UniformCircle:
      return k == 0 ? Complex{1.0, 0.0} : Complex{0.0, 0.0};
    case Kind::WrappedNormal:
      return std::polar(std::exp(-kd * kd * spread / 2.0), kd * location);
    case Kind::WrappedCauchy:
      return std::polar(std::exp(-spread * std::abs(kd)), kd * location);
  }
  return {};
}

double CircularLaw::sup_moment() const {
  switch (kind) {
    case Kind::UniformCircle:
      return 0.0;
    case Kind::WrappedNormal:
      return std::exp(-spread / 2.0);
    case Kind::WrappedCauchy:
      return std::exp(-spread);
  }
  return 1.0;
}

const char* to_string(CircularLaw::Kind k) {
  switch (k) {
    case CircularLaw::Kind::UniformCircle:
      return "uniform";
    case CircularLaw::Kind::WrappedNormal:
      return "wrapped-normal";
    case CircularLaw::Kind::WrappedCauchy:
      return "wrapped-cauchy";
  }
  return "?";
}

Complex sample_complex_gaussian(Seed seed) {
  RandomStream rng(seed);
  return rng.complex_normal();
}

MatrixXc sample_haar_unitary(Index n, RandomStream& rng) {
  if (n < 1) throw InvalidDimension("Haar unitary needs n >= 1");
  MatrixXc g(n, n);
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < n; ++i) g(i, j) = rng.complex_normal();
  Eigen::HouseholderQR<MatrixXc> qr(g);
  MatrixXc q = qr.householderQ();
  const auto& r = qr.matrixQR();
  for (Index j = 0; j < n; ++j) {
    const Complex d = r(j, j);
    const double m = std::abs(d);
    q.col(j) *= (m > 0.0) ? d / m : Complex{1.0, 0.0};
  }
  return q;
}

MatrixXc sample_haar_unitary(Index n, Seed seed) {
  RandomStream rng(seed);
  return sample_haar_unitary(n, rng);
}

VectorXc sample_circular(const CircularLaw& law, Index n, RandomStream& rng) {
  law.validate();
  if (n < 0) throw InvalidDimension("negative sample count");
  VectorXc z(n);
  for (Index i = 0; i < n; ++i) {
    double x = 0.0;
    switch (law.kind) {
      case CircularLaw::Kind::UniformCircle:
        x = 2.0 * std::numbers::pi * rng.uniform();
        break;
      case CircularLaw::Kind::WrappedNormal:
        x = law.location + std::sqrt(law.spread) * rng.normal();
        break;
      case CircularLaw::Kind::WrappedCauchy:
        x = law.location + law.spread * std::tan(std::numbers::pi * (rng.uniform() - 0.5));
        break;
    }
    z[i] = std::polar(1.0, x);
  }
  return z;
}

VectorXc sample_circular(const CircularLaw& law, Index n, Seed seed) {
  RandomStream rng(seed);
  return sample_circular(law, n, rng);
}

VectorXc sample_unit_vector(Index n, RandomStream& rng) {
  if (n < 1) throw InvalidDimension("unit vector needs n >= 1");
  VectorXc v(n);
  for (Index i = 0; i < n; ++i) v[i] = rng.complex_normal();
  return v / v.norm();
}

VectorXc sample_unit_vector(Index n, Seed seed) {
  RandomStream rng(seed);
  return sample_unit_vector(n, rng);
}

VectorXr sample_flat_dirichlet(Index n, RandomStream& rng) {
  if (n < 1) throw InvalidDimension("Dirichlet vector needs n >= 1");
  VectorXr w(n);
  for (Index i = 0; i < n; ++i) w[i] = rng.exponential();
  return w / w.sum();
}

double unitarity_residual(const MatrixXc& u) {
  const MatrixXc e = u.adjoint() * u - MatrixXc::Identity(u.rows(), u.cols());
  return e.cwiseAbs().maxCoeff();
}

}  // namespace gafs
