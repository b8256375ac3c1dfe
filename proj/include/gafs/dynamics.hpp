#pragma once

#include <vector>

#include "gafs/gaf.hpp"
#include "gafs/models.hpp"
#include "gafs/stats.hpp"

namespace gafs {

/// Eigenvalues of G(t) = B A(t), A(t) = I - (1 - t) v v*, followed in t.
struct TrajectoryBundle {
  std::vector<double> t_grid;  // may contain points inserted by refinement
  MatrixXc paths;              // paths(j, i) = lambda_j(t_grid[i])
};

inline constexpr double kAmbiguityCost = 1e-9;
inline constexpr int kMaxTrajectoryRefinements = 3;

/// Minimum-cost perfect matching; returns assignment[row] = column.
std::vector<Index> min_cost_assignment(const Eigen::MatrixXd& cost);

TrajectoryBundle trajectories(const MatrixXc& base, const VectorXc& v, const std::vector<double>& t_grid);

struct SeparationProbe {
  double rho_in = 0.0;
  double rho_out = 0.5;
};

/// rho_out = 1/2 and rho_in the geometric mean of the typical outlier modulus
/// n^{-alpha} and rho_out.
SeparationProbe default_probe(Index n, double alpha);

struct SeparationRow {
  Index sample = 0;
  Index n = 0;
  double t = 0.0;
  double alpha = 0.0;
  Index inner_count = 0;
  Index annulus_count = 0;
  Index outer_count = 0;
  bool pass = false;
};

struct SeparationResult {
  SeparationProbe probe;
  double t_early = 0.0;  // n^{-1/2-alpha}
  double t_late = 0.0;   // n^{-1/2+alpha}
  double circle_radius = 0.0;  // 1 - n^{-alpha+epsilon}
  std::vector<SeparationRow> rows;  // two per sample: early, then late
  double separated_fraction = 0.0;
  double near_circle_fraction = 0.0;
};

/// At t = n^{-1/2-alpha}: exactly one eigenvalue in D(0, rho_in) and n-1
/// outside D(0, rho_out). At t = n^{-1/2+alpha}: none in D(0, 1 - n^{-alpha+eps}).
SeparationResult separation_sweep(const ModelSpec& model, Index n, double alpha, double epsilon, Index samples,
                                  Seed seed, int workers, const SeparationProbe& probe);
SeparationResult separation_sweep(const ModelSpec& model, Index n, double alpha, double epsilon, Index samples,
                                  Seed seed, int workers = 1);

struct CriticalTimeResult {
  Complex a_prime;
  double q = 0.0;
  double s = 0.0;
  EventProbabilities bounds;
  std::vector<Index> counts;  // eigenvalues in D(0, q), per sample
  double p0_hat = 0.0;
  double p2_hat = 0.0;
  double p0_std_err = 0.0;
  double p2_std_err = 0.0;
  bool pass_zero = false;  // p0_hat >= bounds.p_e / 2
  bool pass_two = false;   // p2_hat >= bounds.p_b / 2, compared in log space
};

/// Spectrum of G(a n^{-1/2}) in D(0, q) against the limiting event bounds,
/// with a' = limit_factor * a and s = 2|a'|.
CriticalTimeResult critical_time_test(const ModelSpec& model, Index n, Complex a, double q, Index samples,
                                      Seed seed, int workers = 1);

/// Characteristic function of the perturbed model at contraction t sqrt(n) = a:
/// f_N for Haar, g_N for V D V*.
CharFn model_charfn(const ModelSpec& model, Complex a, SpectralData data);

}  // namespace gafs
