#include "gafs/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "gafs/charfn.hpp"

namespace gafs {

std::vector<Index> min_cost_assignment(const Eigen::MatrixXd& cost) {
  // Hungarian algorithm with potentials, O(n^3).
  const Index n = cost.rows();
  if (cost.cols() != n) throw InvalidDimension("assignment needs a square cost matrix");
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1);
  std::vector<Index> p(n + 1, 0), way(n + 1, 0);
  std::vector<char> used(n + 1);
  for (Index i = 1; i <= n; ++i) {
    p[0] = i;
    Index j0 = 0;
    std::fill(minv.begin(), minv.end(), inf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const Index i0 = p[j0];
      double delta = inf;
      Index j1 = 0;
      for (Index j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (Index j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const Index j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0);
  }
  std::vector<Index> assignment(n);
  for (Index j = 1; j <= n; ++j) assignment[p[j] - 1] = j - 1;
  return assignment;
}

namespace {

VectorXc slice(const MatrixXc& base, const VectorXc& v, double t) {
  const MatrixXc a = build_perturbation(PerturbationParams::from_time(t, v));
  const PointSet s = spectrum(base * a);
  return Eigen::Map<const VectorXc>(s.points.data(), static_cast<Index>(s.points.size()));
}

// Returns the matched `next` reordered to follow `prev`, or false when a pair
// swap changes the total cost by less than kAmbiguityCost.
bool match(const VectorXc& prev, const VectorXc& next, VectorXc& out) {
  const Index n = prev.size();
  Eigen::MatrixXd cost(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) cost(i, j) = std::norm(prev[i] - next[j]);
  const std::vector<Index> s = min_cost_assignment(cost);
  for (Index i = 0; i < n; ++i)
    for (Index k = i + 1; k < n; ++k) {
      const double swap = cost(i, s[k]) + cost(k, s[i]) - cost(i, s[i]) - cost(k, s[k]);
      if (swap < kAmbiguityCost) return false;
    }
  out.resize(n);
  for (Index i = 0; i < n; ++i) out[i] = next[s[i]];
  return true;
}

}  // namespace

TrajectoryBundle trajectories(const MatrixXc& base, const VectorXc& v, const std::vector<double>& t_grid) {
  if (t_grid.empty()) throw InvalidParameter("empty t grid");
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    if (!(std::abs(t_grid[i]) <= 1.0)) throw InvalidParameter("t grid values must lie in [-1, 1]");
    if (i > 0 && !(t_grid[i] > t_grid[i - 1])) throw InvalidParameter("t grid must be strictly increasing");
  }
  const Index n = base.rows();
  std::vector<double> ts{t_grid.front()};
  std::vector<VectorXc> cols{slice(base, v, t_grid.front())};

  // Walks one coarse interval, bisecting it where the matching is ambiguous.
  auto advance = [&](auto&& self, double t0, double t1, int depth) -> void {
    const VectorXc raw = slice(base, v, t1);
    VectorXc matched;
    if (match(cols.back(), raw, matched)) {
      ts.push_back(t1);
      cols.push_back(std::move(matched));
      return;
    }
    if (depth >= kMaxTrajectoryRefinements)
      throw ConvergenceError("ambiguous eigenvalue matching between t = " + std::to_string(t0) +
                             " and t = " + std::to_string(t1) + " after " +
                             std::to_string(kMaxTrajectoryRefinements) + " refinements");
    const double tm = 0.5 * (t0 + t1);
    self(self, t0, tm, depth + 1);
    self(self, tm, t1, depth + 1);
  };
  for (std::size_t i = 1; i < t_grid.size(); ++i) advance(advance, t_grid[i - 1], t_grid[i], 0);

  TrajectoryBundle out;
  out.t_grid = ts;
  out.paths.resize(n, static_cast<Index>(cols.size()));
  for (std::size_t i = 0; i < cols.size(); ++i) out.paths.col(static_cast<Index>(i)) = cols[i];
  return out;
}

// ---------------------------------------------------------------------------

CharFn model_charfn(const ModelSpec& model, Complex a, SpectralData data) {
  return model.kind == BaseKind::Haar ? CharFn::fn(a, std::move(data)) : CharFn::gn(a, std::move(data));
}

SeparationProbe default_probe(Index n, double alpha) {
  SeparationProbe p;
  p.rho_out = 0.5;
  p.rho_in = std::sqrt(std::pow(static_cast<double>(n), -alpha) * p.rho_out);
  return p;
}

SeparationResult separation_sweep(const ModelSpec& model, Index n, double alpha, double epsilon, Index samples,
                                  Seed seed, int workers) {
  return separation_sweep(model, n, alpha, epsilon, samples, seed, workers, default_probe(n, alpha));
}

SeparationResult separation_sweep(const ModelSpec& model, Index n, double alpha, double epsilon, Index samples,
                                  Seed seed, int workers, const SeparationProbe& probe) {
  if (n < 16) throw InvalidParameter("separation sweep needs n >= 16");
  if (!(alpha > 0.0)) throw InvalidParameter("alpha must be positive");
  if (!(epsilon > 0.0 && epsilon < alpha)) throw InvalidParameter("epsilon must lie in (0, alpha)");
  if (!(probe.rho_in > 0.0 && probe.rho_in < probe.rho_out && probe.rho_out < 1.0))
    throw InvalidParameter("probe radii need 0 < rho_in < rho_out < 1");

  const double nd = static_cast<double>(n);
  SeparationResult out;
  out.probe = probe;
  out.t_early = std::pow(nd, -0.5 - alpha);
  out.t_late = std::pow(nd, -0.5 + alpha);
  out.circle_radius = 1.0 - std::pow(nd, -alpha + epsilon);
  if (!(out.t_late <= 1.0)) throw InvalidParameter("alpha too large: n^{-1/2+alpha} exceeds 1");

  out.rows.resize(static_cast<std::size_t>(2 * samples));
  parallel_for(samples, workers, [&](Index i) {
    const SpectralData sd = sample_spectral_data(model, n, sample_seed(seed, i));
    const Complex origin{0.0, 0.0};

    const CharFn early = model_charfn(model, out.t_early * std::sqrt(nd), sd);
    SeparationRow r1{i, n, out.t_early, alpha};
    r1.inner_count = count_zeros_robust(early, Disk{origin, probe.rho_in});
    const Index within = count_zeros_robust(early, Disk{origin, probe.rho_out});
    r1.annulus_count = within - r1.inner_count;
    r1.outer_count = n - within;
    r1.pass = r1.inner_count == 1 && r1.outer_count == n - 1;

    SeparationRow r2{i, n, out.t_late, alpha};
    if (out.circle_radius > 0.0) {
      const CharFn late = model_charfn(model, out.t_late * std::sqrt(nd), sd);
      r2.inner_count = count_zeros_robust(late, Disk{origin, out.circle_radius});
    }
    r2.outer_count = n - r2.inner_count;
    r2.pass = r2.inner_count == 0;

    out.rows[static_cast<std::size_t>(2 * i)] = r1;
    out.rows[static_cast<std::size_t>(2 * i + 1)] = r2;
  });
  Index sep = 0, near = 0;
  for (std::size_t k = 0; k < out.rows.size(); k += 2) {
    sep += out.rows[k].pass;
    near += out.rows[k + 1].pass;
  }
  out.separated_fraction = static_cast<double>(sep) / static_cast<double>(samples);
  out.near_circle_fraction = static_cast<double>(near) / static_cast<double>(samples);
  return out;
}

CriticalTimeResult critical_time_test(const ModelSpec& model, Index n, Complex a, double q, Index samples, Seed seed,
                                      int workers) {
  if (samples < 1) throw InvalidParameter("samples must be positive");
  CriticalTimeResult out;
  out.a_prime = a * model.limit_factor();
  out.q = q;
  out.s = 2.0 * std::abs(out.a_prime);
  out.bounds = lemma_event_probabilities(out.a_prime, q, out.s);

  out.counts.resize(static_cast<std::size_t>(samples));
  parallel_for(samples, workers, [&](Index i) {
    const CharFn f = model_charfn(model, a, sample_spectral_data(model, n, sample_seed(seed, i)));
    out.counts[static_cast<std::size_t>(i)] = count_zeros_robust(f, Disk{{0.0, 0.0}, q});
  });
  Index zero = 0, two = 0;
  for (Index c : out.counts) {
    zero += c == 0;
    two += c >= 2;
  }
  const double m = static_cast<double>(samples);
  out.p0_hat = zero / m;
  out.p2_hat = two / m;
  out.p0_std_err = std::sqrt(out.p0_hat * (1.0 - out.p0_hat) / m);
  out.p2_std_err = std::sqrt(out.p2_hat * (1.0 - out.p2_hat) / m);
  out.pass_zero = out.p0_hat >= 0.5 * out.bounds.p_e;
  out.pass_two = out.p2_hat > 0.0 && std::log(out.p2_hat) >= std::log(0.5) + out.bounds.log_p_b;
  return out;
}

}  // namespace gafs
