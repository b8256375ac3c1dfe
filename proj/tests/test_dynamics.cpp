#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "gafs/dynamics.hpp"

using namespace gafs;

namespace {

double slice_jump(const TrajectoryBundle& b) {
  double worst = 0.0;
  for (Index i = 1; i < b.paths.cols(); ++i) worst = std::max(worst, (b.paths.col(i) - b.paths.col(i - 1)).cwiseAbs().maxCoeff());
  return worst;
}

std::vector<double> grid(double lo, double hi, int points) {
  std::vector<double> g(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) g[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (points - 1);
  return g;
}

}  // namespace

TEST_CASE("assignment") {
  Eigen::MatrixXd c(3, 3);
  c << 4, 1, 3,
       2, 0, 5,
       3, 2, 2;
  const auto a = min_cost_assignment(c);
  double total = 0.0;
  for (Index i = 0; i < 3; ++i) total += c(i, a[static_cast<std::size_t>(i)]);
  CHECK(total == 5.0);
  std::vector<Index> sorted(a.begin(), a.end());
  std::sort(sorted.begin(), sorted.end());
  CHECK(sorted == std::vector<Index>{0, 1, 2});
}

TEST_CASE("trajectory slices") {
  const Index n = 24;
  const MatrixXc u = sample_haar_unitary(n, Seed{1, 0});
  const VectorXc v = sample_unit_vector(n, Seed{2, 0});
  const TrajectoryBundle b = trajectories(u, v, {-1.0, -0.5, 0.0, 0.5, 1.0});
  REQUIRE(b.paths.rows() == n);
  for (std::size_t i = 0; i < b.t_grid.size(); ++i) {
    const Eigen::VectorXd mod = b.paths.col(static_cast<Index>(i)).cwiseAbs();
    const double t = b.t_grid[i];
    if (std::abs(t) == 1.0) CHECK((mod.array() - 1.0).abs().maxCoeff() <= 1e-10);
    else CHECK(mod.maxCoeff() < 1.0);
    if (t == 0.0) CHECK((mod.array() <= 1e-10).count() == 1);
  }
}

TEST_CASE("closed disk at n = 64") {
  const Index n = 64;
  const MatrixXc u = sample_haar_unitary(n, Seed{3, 0});
  const VectorXc v = sample_unit_vector(n, Seed{4, 0});
  const TrajectoryBundle b = trajectories(u, v, grid(-1.0, 1.0, 41));
  CHECK(b.paths.cwiseAbs().maxCoeff() <= 1.0 + 1e-10);
}

TEST_CASE("paths are continuous: halving the step shrinks the jumps") {
  const Index n = 32;
  const MatrixXc u = sample_haar_unitary(n, Seed{5, 0});
  const VectorXc v = sample_unit_vector(n, Seed{6, 0});
  const double coarse = slice_jump(trajectories(u, v, grid(0.2, 0.8, 61)));
  const double fine = slice_jump(trajectories(u, v, grid(0.2, 0.8, 121)));
  CHECK(fine < 0.75 * coarse);
}

TEST_CASE("separation sweep") {
  const Index n = 32;
  const SeparationResult r = separation_sweep(ModelSpec::haar(), n, 0.5, 0.1, 20, Seed{7, 0});
  CHECK(r.t_late == doctest::Approx(1.0));
  CHECK(r.t_early == doctest::Approx(1.0 / n));
  // At t = 1 the matrix is unitary.
  CHECK(r.near_circle_fraction == 1.0);
  REQUIRE(r.rows.size() == 40);
  for (const auto& row : r.rows) CHECK(row.inner_count + row.annulus_count + row.outer_count == n);

  const SeparationProbe p = default_probe(256, 0.3);
  CHECK(p.rho_out == 0.5);
  CHECK(p.rho_in == doctest::Approx(std::sqrt(0.5 * std::pow(256.0, -0.3))));
}

TEST_CASE("an eigenvalue leaves the origin as t grows") {
  // |lambda_min(G(t))| grows with t on average.
  const Index n = 16;
  const std::vector<double> ts = {0.0, 0.05, 0.1, 0.2, 0.4};
  std::vector<double> mean(ts.size(), 0.0);
  const int m = 1000;
  for (int i = 0; i < m; ++i) {
    const MatrixXc u = sample_haar_unitary(n, Seed{8, static_cast<std::uint64_t>(i)});
    const VectorXc v = sample_unit_vector(n, Seed{9, static_cast<std::uint64_t>(i)});
    const TrajectoryBundle b = trajectories(u, v, ts);
    for (std::size_t k = 0; k < ts.size(); ++k) mean[k] += b.paths.col(static_cast<Index>(k)).cwiseAbs().minCoeff() / m;
  }
  for (std::size_t k = 1; k < ts.size(); ++k) CHECK(mean[k] > mean[k - 1]);
}

TEST_CASE("critical time") {
  const CriticalTimeResult r = critical_time_test(ModelSpec::haar(), 32, 1.0, 0.01, 200, Seed{10, 0});
  CHECK(r.p0_hat >= 0.99);
  CHECK(r.pass_zero);
  CHECK(r.counts.size() == 200);
  CHECK(r.s == doctest::Approx(2.0));
  CHECK_THROWS_AS(critical_time_test(ModelSpec::haar(), 32, 1.0, 0.9, 10, Seed{10, 0}), DomainError);
}
