#pragma once

#include <algorithm>
#include <cstdint>
#include <exception>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "gafs/models.hpp"
#include "gafs/sampling.hpp"
#include "gafs/types.hpp"

namespace gafs {

struct MCEstimate {
  Complex value{0.0, 0.0};
  double std_err = 0.0;  // sample std / sqrt(samples), std of the complex value
  Index samples = 0;
};

/// Running (sum, sum of |x|^2, count). Merging is associative up to
/// floating-point reassociation; callers that need bit-identical output
/// reduce in sample-index order.
class MCAccumulator {
 public:
  void add(Complex x) {
    sum_ += x;
    sum_sq_ += std::norm(x);
    ++count_;
  }
  void merge(const MCAccumulator& o) {
    sum_ += o.sum_;
    sum_sq_ += o.sum_sq_;
    count_ += o.count_;
  }
  Index count() const { return count_; }
  MCEstimate estimate() const;

 private:
  Complex sum_{0.0, 0.0};
  double sum_sq_ = 0.0;
  Index count_ = 0;
};

MCEstimate estimate_of(const std::vector<Complex>& xs);

/// Number of hardware threads, at least 1.
int default_workers();

/// Calls body(i) for i in [0, count) on `workers` threads with a static
/// interleaved schedule. If any call throws, the exception of the smallest
/// failing index is rethrown.
template <class Body>
void parallel_for(Index count, int workers, Body&& body) {
  workers = std::max(1, std::min<int>(workers, static_cast<int>(std::max<Index>(count, 1))));
  if (workers == 1) {
    for (Index i = 0; i < count; ++i) body(i);
    return;
  }
  std::vector<std::pair<Index, std::exception_ptr>> failures(static_cast<std::size_t>(workers), {count, nullptr});
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (Index i = w; i < count; i += workers) {
        try {
          body(i);
        } catch (...) {
          failures[static_cast<std::size_t>(w)] = {i, std::current_exception()};
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  std::pair<Index, std::exception_ptr> first{count, nullptr};
  for (const auto& f : failures)
    if (f.second && f.first < first.first) first = f;
  if (first.second) std::rethrow_exception(first.second);
}

/// Per-sample seed: stream = sample index.
inline Seed sample_seed(Seed base, Index i) { return Seed{base.root ^ base.stream, static_cast<std::uint64_t>(i)}; }

/// Tally for the open-disk confinement check on UA / MA spectra.
struct Confinement {
  Index matrices = 0;
  Index eigenvalues = 0;
  Index violations = 0;
  double max_modulus = 0.0;

  void add(const PointSet& spectrum);
  void merge(const Confinement& o);
};

/// Rows are samples of coefficient_scale(n) * v*(U*)^k v for k = 1..k_max,
/// computed from sampled spectral data.
MatrixXc coefficient_samples(const ModelSpec& model, Index n, int k_max, Index samples, Seed seed,
                             int workers = 1);

/// E[prod S_{n_i}^{p_i} prod conj(S_{m_j})^{q_j}].
struct MomentSpec {
  std::vector<std::pair<int, int>> powers;       // (n_i, p_i)
  std::vector<std::pair<int, int>> conj_powers;  // (m_j, q_j)

  int degree() const;
  int max_index() const;
  void validate() const;
  /// 1{l=r} prod 1{p=q, n=n'} p_i!.
  double limit() const;
  Complex evaluate(const Eigen::Ref<const VectorXc>& coeffs) const;
  std::string label() const;
  /// "1^2;1^2" style: holomorphic part ';' conjugated part, factors n^p
  /// separated by '*', e.g. "1*2;3" for E[S_1 S_2 conj(S_3)].
  static MomentSpec parse(const std::string& text);
};

inline constexpr int kMaxMomentDegree = 8;
inline constexpr int kMaxCoefficientOrder = 32;

MCEstimate joint_moment(const ModelSpec& model, Index n, const MomentSpec& spec, Index samples, Seed seed,
                        int workers = 1);

/// 2|z|^2 / (1 - |z|^2).
double tightness_bound(Complex z);

struct TightnessPoint {
  Complex z;
  MCEstimate second_moment;  // of |sqrt(n) sum_j w_j u_j / (1 - u_j)|^2
  double bound = 0.0;
};

struct TightnessProfile {
  std::vector<TightnessPoint> points;
  /// Smallest C with estimate <= bound + C (|z|/(1-|z|))^2 at every point.
  double fitted_c = 0.0;
};

TightnessProfile tightness_profile(const ModelSpec& model, Index n, const std::vector<Complex>& z_grid,
                                   Index samples, Seed seed, int workers = 1);

/// E|tr U^l|^2 for each l, from dense Haar samples. When `confinement` is
/// given, the spectrum of UA (a = 1, v uniform) of each sample is tallied.
std::vector<MCEstimate> trace_moments(Index n, const std::vector<int>& ls, Index samples, Seed seed,
                                      int workers = 1, Confinement* confinement = nullptr);
MCEstimate trace_moment(Index n, int l, Index samples, Seed seed, int workers = 1);

/// E[w_i w_j] for all i, j from dense Haar samples and uniform v.
std::vector<std::vector<MCEstimate>> weight_pair_moments(Index n, Index samples, Seed seed, int workers = 1,
                                                         Confinement* confinement = nullptr);

using Histogram = std::vector<std::uint64_t>;

Histogram make_histogram(const std::vector<Index>& counts);

inline constexpr double kTotalVariationThreshold = 0.05;

struct CountComparison {
  double tv_distance = 0.0;
  bool pass = false;
};

CountComparison compare_counts(const Histogram& a, const Histogram& b,
                               double threshold = kTotalVariationThreshold);

/// Spread of a wrapped law as a function of n, for the decay gate.
struct LawSchedule {
  enum class Growth { Constant, Log, Power };

  CircularLaw::Kind kind = CircularLaw::Kind::UniformCircle;
  double location = 0.0;
  Growth growth = Growth::Constant;
  double value = 0.0;  // constant spread, or the exponent m for Power

  CircularLaw at(Index n) const;
};

const char* to_string(LawSchedule::Growth g);

/// Rejects schedules whose b_n = sup_k |E Z^k| does not tend to zero.
void check_decay_gate(const LawSchedule& s);

}  // namespace gafs
