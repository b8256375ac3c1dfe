#include "gafs/models.hpp"

#include <algorithm>
#include <limits>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "gafs/opuc.hpp"

namespace gafs {

const char* to_string(BaseKind k) { return k == BaseKind::Haar ? "haar" : "vdv"; }

double ModelSpec::limit_factor() const { return kind == BaseKind::Haar ? 1.0 : std::sqrt(0.5); }

double ModelSpec::coefficient_scale(Index n) const {
  const double nd = static_cast<double>(n);
  return kind == BaseKind::Haar ? std::sqrt(nd) : std::sqrt(nd / 2.0);
}

BaseModel sample_base_model(const ModelSpec& spec, Index n, Seed seed) {
  RandomStream rng(seed);
  BaseModel base{spec, sample_haar_unitary(n, rng)};
  if (spec.kind == BaseKind::VDVStar) {
    const VectorXc d = sample_circular(spec.law, n, rng);
    base.matrix = base.matrix * d.asDiagonal() * base.matrix.adjoint();
  }
  return base;
}

PerturbationParams PerturbationParams::from_strength(Complex a, const VectorXc& v) {
  if (a == Complex{0.0, 0.0}) throw InvalidParameter("perturbation strength a must be nonzero");
  if (v.size() < 1) throw InvalidDimension("perturbation vector is empty");
  PerturbationParams p;
  p.n = v.size();
  p.contraction = a / std::sqrt(static_cast<double>(p.n));
  p.v = v;
  return p;
}

PerturbationParams PerturbationParams::from_time(double t, const VectorXc& v) {
  if (!(std::abs(t) <= 1.0)) throw InvalidParameter("time t must lie in [-1, 1]");
  if (v.size() < 1) throw InvalidDimension("perturbation vector is empty");
  PerturbationParams p;
  p.n = v.size();
  p.contraction = t;
  p.v = v;
  return p;
}

MatrixXc build_perturbation(const PerturbationParams& params) {
  if (params.v.size() != params.n || params.n < 1) throw InvalidDimension("perturbation vector size mismatch");
  if (std::abs(params.v.norm() - 1.0) > 1e-12) throw InvalidParameter("perturbation vector must be a unit vector");
  MatrixXc a = MatrixXc::Identity(params.n, params.n);
  a.noalias() -= (1.0 - params.contraction) * params.v * params.v.adjoint();
  return a;
}

PointSet spectrum(const MatrixXc& m, const SpectrumOptions& opts) {
  if (m.rows() != m.cols() || m.rows() < 1) throw InvalidDimension("spectrum needs a nonempty square matrix");
  if (m.rows() > opts.max_n)
    throw InvalidDimension("matrix dimension " + std::to_string(m.rows()) + " exceeds configured maximum " +
                           std::to_string(opts.max_n));
  Eigen::ComplexEigenSolver<MatrixXc> solver(m, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success)
    throw ConvergenceError("eigensolver did not converge" +
                           (opts.diagnostic.empty() ? std::string{} : " (" + opts.diagnostic + ")"));
  PointSet out;
  out.provenance = Provenance::Eigensolver;
  const auto& ev = solver.eigenvalues();
  out.points.assign(ev.data(), ev.data() + ev.size());
  return out;
}

Complex SpectralData::adjoint_moment(int k) const {
  Complex s{0.0, 0.0};
  for (Index j = 0; j < phases.size(); ++j) s += weights[j] * std::pow(std::conj(phases[j]), k);
  return s;
}

void SpectralData::validate() const {
  if (phases.size() != weights.size() || phases.size() < 1) throw InvalidDimension("spectral data size mismatch");
  if (std::abs(weights.sum() - 1.0) > 1e-10) throw InvalidParameter("spectral weights must sum to one");
  for (Index j = 0; j < phases.size(); ++j) {
    if (std::abs(std::abs(phases[j]) - 1.0) > 1e-10) throw InvalidParameter("spectral phases must be unimodular");
    if (weights[j] < 0.0) throw InvalidParameter("spectral weights must be nonnegative");
  }
}

namespace {

// Sorts by angle and merges runs of phases closer than the tolerance,
// including across the branch cut at -pi.
SpectralData merge_clusters(Index n, const VectorXc& phases, const VectorXr& weights) {
  const Index m = phases.size();
  std::vector<Index> order(static_cast<std::size_t>(m));
  std::iota(order.begin(), order.end(), Index{0});
  std::sort(order.begin(), order.end(),
            [&](Index i, Index j) { return std::arg(phases[i]) < std::arg(phases[j]); });

  std::vector<Complex> ph;
  std::vector<double> w;
  for (Index idx : order) {
    if (!ph.empty() && std::abs(phases[idx] - ph.back()) < kPhaseClusterTolerance) {
      w.back() += weights[idx];
    } else {
      ph.push_back(phases[idx]);
      w.push_back(weights[idx]);
    }
  }
  if (ph.size() > 1 && std::abs(ph.front() - ph.back()) < kPhaseClusterTolerance) {
    w.front() += w.back();
    ph.pop_back();
    w.pop_back();
  }

  SpectralData sd;
  sd.n = n;
  sd.degenerate = static_cast<Index>(ph.size()) != m;
  if (!sd.degenerate) {
    sd.phases = phases;
    sd.weights = weights;
    return sd;
  }
  sd.phases = Eigen::Map<const VectorXc>(ph.data(), static_cast<Index>(ph.size()));
  sd.weights = Eigen::Map<const VectorXr>(w.data(), static_cast<Index>(w.size()));
  return sd;
}

}  // namespace

SpectralData spectral_data(const MatrixXc& unitary, const VectorXc& v) {
  const Index n = unitary.rows();
  if (unitary.cols() != n || v.size() != n || n < 1) throw InvalidDimension("spectral_data size mismatch");
  if (unitarity_residual(unitary) > 1e-10 * static_cast<double>(n))
    throw InvalidParameter("spectral_data needs a unitary base matrix");

  // For a normal matrix the Schur form is diagonal and the Schur vectors are
  // an orthonormal eigenbasis, so the weights sum to |v|^2 to rounding.
  Eigen::ComplexSchur<MatrixXc> schur(unitary);
  if (schur.info() != Eigen::Success) throw ConvergenceError("Schur decomposition did not converge");
  const MatrixXc& t = schur.matrixT();
  VectorXc phases(n);
  for (Index k = 0; k < n; ++k) phases[k] = t(k, k) / std::abs(t(k, k));
  const VectorXr weights = (schur.matrixU().adjoint() * v).cwiseAbs2();
  return merge_clusters(n, phases, weights / weights.sum());
}

SpectralData sample_spectral_data(const ModelSpec& spec, Index n, Seed seed) {
  if (n < 1) throw InvalidDimension("spectral data needs n >= 1");
  RandomStream rng(seed);
  VectorXc phases;
  VectorXr weights;
  if (spec.kind == BaseKind::Haar) {
    auto mu = opuc::measure_from_verblunsky(opuc::sample_cue_verblunsky(n, rng));
    phases = std::move(mu.atoms);
    weights = std::move(mu.weights);
    weights /= weights.sum();
  } else {
    phases = sample_circular(spec.law, n, rng);
    weights = sample_flat_dirichlet(n, rng);
  }
  return merge_clusters(n, phases, weights);
}

}  // namespace gafs

namespace gafs {

const char* to_string(Provenance p) {
  switch (p) {
    case Provenance::Eigensolver:
      return "eigensolver";
    case Provenance::Rootfinder:
      return "rootfinder";
    case Provenance::GAF:
      return "gaf";
  }
  return "?";
}

std::size_t PointSet::count_in(const Disk& d) const {
  return static_cast<std::size_t>(std::count_if(points.begin(), points.end(), [&](Complex z) { return d.contains(z); }));
}

PointSet PointSet::restricted_to(const Disk& d) const {
  PointSet out;
  out.provenance = provenance;
  for (Complex z : points)
    if (d.contains(z)) out.points.push_back(z);
  return out;
}

double hausdorff_distance(const PointSet& a, const PointSet& b) {
  if (a.points.empty() && b.points.empty()) return 0.0;
  if (a.points.empty() || b.points.empty()) return std::numeric_limits<double>::infinity();
  auto directed = [](const PointSet& x, const PointSet& y) {
    double worst = 0.0;
    for (Complex p : x.points) {
      double best = std::numeric_limits<double>::infinity();
      for (Complex q : y.points) best = std::min(best, std::abs(p - q));
      worst = std::max(worst, best);
    }
    return worst;
  };
  return std::max(directed(a, b), directed(b, a));
}

}  // namespace gafs
