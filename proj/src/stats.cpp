#include "gafs/stats.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "gafs/charfn.hpp"

namespace gafs {

MCEstimate MCAccumulator::estimate() const {
  MCEstimate e;
  e.samples = count_;
  if (count_ == 0) return e;
  const double n = static_cast<double>(count_);
  e.value = sum_ / n;
  if (count_ > 1) {
    const double var = std::max(0.0, (sum_sq_ - n * std::norm(e.value)) / (n - 1.0));
    e.std_err = std::sqrt(var / n);
  }
  return e;
}

MCEstimate estimate_of(const std::vector<Complex>& xs) {
  MCAccumulator acc;
  for (Complex x : xs) acc.add(x);
  return acc.estimate();
}

int default_workers() { return std::max(1u, std::thread::hardware_concurrency()); }

void Confinement::add(const PointSet& spectrum) {
  ++matrices;
  for (Complex z : spectrum.points) {
    ++eigenvalues;
    const double m = std::abs(z);
    max_modulus = std::max(max_modulus, m);
    if (!(m < 1.0)) ++violations;
  }
}

void Confinement::merge(const Confinement& o) {
  matrices += o.matrices;
  eigenvalues += o.eigenvalues;
  violations += o.violations;
  max_modulus = std::max(max_modulus, o.max_modulus);
}

MatrixXc coefficient_samples(const ModelSpec& model, Index n, int k_max, Index samples, Seed seed, int workers) {
  if (k_max < 1 || k_max > kMaxCoefficientOrder)
    throw InvalidParameter("k_max must lie in [1, " + std::to_string(kMaxCoefficientOrder) + "]");
  if (samples < 1) throw InvalidParameter("samples must be positive");
  MatrixXc out(samples, k_max);
  const double scale = model.coefficient_scale(n);
  parallel_for(samples, workers, [&](Index i) {
    const SpectralData sd = sample_spectral_data(model, n, sample_seed(seed, i));
    VectorXc power = sd.phases.conjugate();
    const VectorXc step = power;
    for (int k = 1; k <= k_max; ++k) {
      out(i, k - 1) = scale * (sd.weights.cast<Complex>().array() * power.array()).sum();
      power = power.cwiseProduct(step);
    }
  });
  return out;
}

// ---------------------------------------------------------------------------

int MomentSpec::degree() const {
  int d = 0;
  for (auto [k, p] : powers) d += p;
  for (auto [k, q] : conj_powers) d += q;
  return d;
}

int MomentSpec::max_index() const {
  int m = 0;
  for (auto [k, p] : powers) m = std::max(m, k);
  for (auto [k, q] : conj_powers) m = std::max(m, k);
  return m;
}

void MomentSpec::validate() const {
  for (const auto* part : {&powers, &conj_powers}) {
    for (std::size_t i = 0; i < part->size(); ++i) {
      const auto [k, p] = (*part)[i];
      if (k < 1 || p < 1) throw InvalidParameter("moment factors need index >= 1 and power >= 1");
      if (i > 0 && !((*part)[i - 1].first < k)) throw InvalidParameter("moment indices must be strictly increasing");
    }
  }
  if (degree() < 1) throw InvalidParameter("empty moment");
  if (degree() > kMaxMomentDegree)
    throw InvalidParameter("moment degree " + std::to_string(degree()) + " exceeds " +
                           std::to_string(kMaxMomentDegree) +
                           "; the Monte Carlo variance of higher moments is too large at these sample sizes");
  if (max_index() > kMaxCoefficientOrder) throw InvalidParameter("moment index exceeds coefficient cap");
}

double MomentSpec::limit() const {
  if (powers != conj_powers) return 0.0;
  double v = 1.0;
  for (auto [k, p] : powers) v *= std::tgamma(p + 1.0);
  return v;
}

Complex MomentSpec::evaluate(const Eigen::Ref<const VectorXc>& coeffs) const {
  Complex v{1.0, 0.0};
  for (auto [k, p] : powers) v *= std::pow(coeffs[k - 1], p);
  for (auto [k, q] : conj_powers) v *= std::pow(std::conj(coeffs[k - 1]), q);
  return v;
}

std::string MomentSpec::label() const {
  std::ostringstream os;
  auto part = [&](const std::vector<std::pair<int, int>>& xs) {
    for (std::size_t i = 0; i < xs.size(); ++i) os << (i ? "*" : "") << xs[i].first << '^' << xs[i].second;
  };
  part(powers);
  os << ';';
  part(conj_powers);
  return os.str();
}

MomentSpec MomentSpec::parse(const std::string& text) {
  MomentSpec spec;
  const auto semi = text.find(';');
  if (semi == std::string::npos) throw InvalidParameter("moment spec needs ';' between the two parts: " + text);
  auto part = [&](const std::string& s, std::vector<std::pair<int, int>>& out) {
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, '*')) {
      if (item.empty()) continue;
      const auto caret = item.find('^');
      try {
        const int k = std::stoi(item.substr(0, caret));
        const int p = caret == std::string::npos ? 1 : std::stoi(item.substr(caret + 1));
        out.emplace_back(k, p);
      } catch (const std::logic_error&) {
        throw InvalidParameter("bad moment factor '" + item + "'");
      }
    }
  };
  part(text.substr(0, semi), spec.powers);
  part(text.substr(semi + 1), spec.conj_powers);
  spec.validate();
  return spec;
}

MCEstimate joint_moment(const ModelSpec& model, Index n, const MomentSpec& spec, Index samples, Seed seed,
                        int workers) {
  spec.validate();
  const MatrixXc c = coefficient_samples(model, n, spec.max_index(), samples, seed, workers);
  MCAccumulator acc;
  for (Index i = 0; i < samples; ++i) acc.add(spec.evaluate(c.row(i).transpose()));
  return acc.estimate();
}

// ---------------------------------------------------------------------------

double tightness_bound(Complex z) {
  const double r2 = std::norm(z);
  return 2.0 * r2 / (1.0 - r2);
}

TightnessProfile tightness_profile(const ModelSpec& model, Index n, const std::vector<Complex>& z_grid,
                                   Index samples, Seed seed, int workers) {
  for (Complex z : z_grid)
    if (!(std::abs(z) <= 0.95)) throw InvalidParameter("tightness grid points need |z| <= 0.95");
  const std::size_t m = z_grid.size();
  std::vector<std::vector<Complex>> vals(m, std::vector<Complex>(static_cast<std::size_t>(samples)));
  parallel_for(samples, workers, [&](Index i) {
    const SpectralData sd = sample_spectral_data(model, n, sample_seed(seed, i));
    for (std::size_t j = 0; j < m; ++j)
      vals[j][static_cast<std::size_t>(i)] = std::norm(scaled_resolvent_sum(sd, z_grid[j]));
  });
  TightnessProfile out;
  for (std::size_t j = 0; j < m; ++j) {
    TightnessPoint p{z_grid[j], estimate_of(vals[j]), tightness_bound(z_grid[j])};
    const double r = std::abs(p.z);
    if (r > 0.0) {
      const double envelope = (r / (1.0 - r)) * (r / (1.0 - r));
      out.fitted_c = std::max(out.fitted_c, (p.second_moment.value.real() - p.bound) / envelope);
    }
    out.points.push_back(p);
  }
  return out;
}

std::vector<MCEstimate> trace_moments(Index n, const std::vector<int>& ls, Index samples, Seed seed, int workers,
                                      Confinement* confinement) {
  for (int l : ls)
    if (l < 1) throw InvalidParameter("trace moment order must be >= 1");
  if (samples < 1) throw InvalidParameter("samples must be positive");
  std::vector<std::vector<Complex>> vals(ls.size(), std::vector<Complex>(static_cast<std::size_t>(samples)));
  std::vector<Confinement> tallies(static_cast<std::size_t>(samples));
  parallel_for(samples, workers, [&](Index i) {
    RandomStream rng(sample_seed(seed, i));
    const MatrixXc u = sample_haar_unitary(n, rng);
    const PointSet ev = spectrum(u);
    for (std::size_t j = 0; j < ls.size(); ++j) {
      Complex tr{0.0, 0.0};
      for (Complex z : ev.points) tr += std::pow(z, ls[j]);
      vals[j][static_cast<std::size_t>(i)] = std::norm(tr);
    }
    if (confinement) {
      const VectorXc v = sample_unit_vector(n, rng);
      const MatrixXc a = build_perturbation(PerturbationParams::from_strength(1.0, v));
      tallies[static_cast<std::size_t>(i)].add(spectrum(u * a));
    }
  });
  if (confinement)
    for (const auto& t : tallies) confinement->merge(t);
  std::vector<MCEstimate> out;
  for (const auto& v : vals) out.push_back(estimate_of(v));
  return out;
}

MCEstimate trace_moment(Index n, int l, Index samples, Seed seed, int workers) {
  return trace_moments(n, {l}, samples, seed, workers).front();
}

std::vector<std::vector<MCEstimate>> weight_pair_moments(Index n, Index samples, Seed seed, int workers,
                                                         Confinement* confinement) {
  if (samples < 1) throw InvalidParameter("samples must be positive");
  const std::size_t nn = static_cast<std::size_t>(n);
  std::vector<VectorXr> weights(static_cast<std::size_t>(samples));
  std::vector<Confinement> tallies(static_cast<std::size_t>(samples));
  parallel_for(samples, workers, [&](Index i) {
    RandomStream rng(sample_seed(seed, i));
    const MatrixXc u = sample_haar_unitary(n, rng);
    const VectorXc v = sample_unit_vector(n, rng);
    const SpectralData sd = spectral_data(u, v);
    if (sd.degenerate) throw NumericalError("degenerate Haar spectrum in sample " + std::to_string(i));
    weights[static_cast<std::size_t>(i)] = sd.weights;
    if (confinement) {
      const MatrixXc a = build_perturbation(PerturbationParams::from_strength(1.0, v));
      tallies[static_cast<std::size_t>(i)].add(spectrum(u * a));
    }
  });
  if (confinement)
    for (const auto& t : tallies) confinement->merge(t);
  std::vector<std::vector<MCEstimate>> out(nn, std::vector<MCEstimate>(nn));
  for (std::size_t a = 0; a < nn; ++a)
    for (std::size_t b = 0; b < nn; ++b) {
      MCAccumulator acc;
      for (const auto& w : weights) acc.add(w[static_cast<Index>(a)] * w[static_cast<Index>(b)]);
      out[a][b] = acc.estimate();
    }
  return out;
}

// ---------------------------------------------------------------------------

Histogram make_histogram(const std::vector<Index>& counts) {
  Histogram h;
  for (Index c : counts) {
    if (c < 0) throw InvalidParameter("negative count in histogram");
    if (static_cast<std::size_t>(c) >= h.size()) h.resize(static_cast<std::size_t>(c) + 1, 0);
    ++h[static_cast<std::size_t>(c)];
  }
  return h;
}

CountComparison compare_counts(const Histogram& a, const Histogram& b, double threshold) {
  std::uint64_t na = 0, nb = 0;
  for (auto x : a) na += x;
  for (auto x : b) nb += x;
  if (na == 0 || nb == 0) throw InvalidParameter("cannot compare an empty histogram");
  const std::size_t m = std::max(a.size(), b.size());
  double tv = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    const double pa = k < a.size() ? static_cast<double>(a[k]) / static_cast<double>(na) : 0.0;
    const double pb = k < b.size() ? static_cast<double>(b[k]) / static_cast<double>(nb) : 0.0;
    tv += std::abs(pa - pb);
  }
  tv *= 0.5;
  return {tv, tv <= threshold};
}

// ---------------------------------------------------------------------------

CircularLaw LawSchedule::at(Index n) const {
  double spread = value;
  if (growth == Growth::Log) spread = std::log(static_cast<double>(n));
  if (growth == Growth::Power) spread = std::pow(static_cast<double>(n), value);
  switch (kind) {
    case CircularLaw::Kind::UniformCircle:
      return CircularLaw::uniform();
    case CircularLaw::Kind::WrappedNormal:
      return CircularLaw::wrapped_normal(location, spread);
    case CircularLaw::Kind::WrappedCauchy:
      return CircularLaw::wrapped_cauchy(location, spread);
  }
  return {};
}

const char* to_string(LawSchedule::Growth g) {
  switch (g) {
    case LawSchedule::Growth::Constant:
      return "const";
    case LawSchedule::Growth::Log:
      return "log";
    case LawSchedule::Growth::Power:
      return "power";
  }
  return "?";
}

void check_decay_gate(const LawSchedule& s) {
  if (s.kind == CircularLaw::Kind::UniformCircle) return;
  switch (s.growth) {
    case LawSchedule::Growth::Constant:
      throw InvalidParameter(std::string("decay gate: a constant spread for ") + to_string(s.kind) +
                             " keeps sup_k |E Z^k| bounded away from zero; use a log or power schedule");
    case LawSchedule::Growth::Power:
      if (!(s.value > 0.0)) throw InvalidParameter("decay gate: power schedule needs exponent m > 0");
      return;
    case LawSchedule::Growth::Log:
      return;
  }
}

}  // namespace gafs
