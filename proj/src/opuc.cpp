#include "gafs/opuc.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

namespace gafs::opuc {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// f(z) = z Phi_{n-1}(z) / Phi_{n-1}^*(z) is a Blaschke product of degree n.
// On the circle each Szego step maps w = e^{i(theta + psi_k)} to
// w conj(D) / D with D = 1 - alpha_k w, and Re D > 0, so the unwrapped phase
//   psi_{k+1} = theta + psi_k - 2 arg(1 - alpha_k w)
// is continuous in theta with no branch ambiguity. Psi = theta + psi_{n-1}
// increases by exactly 2 pi n; atoms solve Psi = -arg(alpha_{n-1}) mod 2 pi.
struct PhaseSample {
  double psi;
  double dpsi;  // strictly positive
};

// Evaluates the phase at several angles in lockstep; the recursion for one
// angle is a serial dependency chain, independent angles interleave.
//
// With P_k = prod_{j<k} (1 - alpha_j w_j), psi_k = k theta - 2 arg P_k, where
// each factor has positive real part. arg P_k is unwrapped by counting the
// crossings of the negative real axis, which for a factor rotating by less than
// pi/2 is a sign test. e^{i psi_k} is carried separately as a unit number.
constexpr std::size_t kPhaseBatch = 8;

void unwrapped_phase(const VectorXc& alpha, const double* theta, PhaseSample* out, std::size_t count) {
  const Index n = alpha.size();
  for (std::size_t b0 = 0; b0 < count; b0 += kPhaseBatch) {
    const std::size_t m = std::min(kPhaseBatch, count - b0);
    double t[kPhaseBatch], zr[kPhaseBatch], zi[kPhaseBatch], er[kPhaseBatch], ei[kPhaseBatch];
    double pr[kPhaseBatch], pi[kPhaseBatch], dpsi[kPhaseBatch];
    long turns[kPhaseBatch];
    for (std::size_t j = 0; j < m; ++j) {
      t[j] = theta[b0 + j];
      zr[j] = std::cos(t[j]);
      zi[j] = std::sin(t[j]);
      er[j] = 1.0;
      ei[j] = 0.0;
      pr[j] = 1.0;
      pi[j] = 0.0;
      dpsi[j] = 0.0;
      turns[j] = 0;
    }
    for (Index k = 0; k + 1 < n; ++k) {
      const double ar = alpha[k].real(), ai = alpha[k].imag();
      const double a2 = 1.0 - (ar * ar + ai * ai);
      const bool renormalise = (k & 15) == 15;
      for (std::size_t j = 0; j < m; ++j) {
        const double wr = zr[j] * er[j] - zi[j] * ei[j], wi = zr[j] * ei[j] + zi[j] * er[j];
        const double dr = 1.0 - (ar * wr - ai * wi), di = -(ar * wi + ai * wr);
        const double inv = 1.0 / (dr * dr + di * di);
        dpsi[j] = (1.0 + dpsi[j]) * a2 * inv;
        // e <- w conj(d)^2 / |d|^2
        const double cr = (dr * dr - di * di) * inv, ci = -2.0 * dr * di * inv;
        er[j] = wr * cr - wi * ci;
        ei[j] = wr * ci + wi * cr;
        // P <- P d
        const double qr = pr[j] * dr - pi[j] * di, qi = pr[j] * di + pi[j] * dr;
        turns[j] += (di > 0.0 && pi[j] >= 0.0 && qi < 0.0) - (di < 0.0 && pi[j] < 0.0 && qi >= 0.0);
        pr[j] = qr;
        pi[j] = qi;
        if (renormalise) {
          const double s = 1.0 / std::sqrt(pr[j] * pr[j] + pi[j] * pi[j]);
          pr[j] *= s;
          pi[j] *= s;
          const double u = 0.5 * (3.0 - (er[j] * er[j] + ei[j] * ei[j]));
          er[j] *= u;
          ei[j] *= u;
        }
      }
    }
    for (std::size_t j = 0; j < m; ++j) {
      const double arg_p = kTwoPi * static_cast<double>(turns[j]) + std::atan2(pi[j], pr[j]);
      out[b0 + j] = {static_cast<double>(n) * t[j] - 2.0 * arg_p, 1.0 + dpsi[j]};
    }
  }
}

double christoffel_weight(const VectorXc& alpha, Complex z) {
  Complex phi{1.0, 0.0};
  Complex phi_star{1.0, 0.0};
  double norm2 = 1.0;
  double sum = 1.0;
  for (Index k = 0; k + 1 < alpha.size(); ++k) {
    const Complex a = alpha[k];
    const Complex next = z * phi - std::conj(a) * phi_star;
    phi_star = phi_star - a * z * phi;
    phi = next;
    norm2 *= 1.0 - std::norm(a);
    sum += std::norm(phi) / norm2;
  }
  return 1.0 / sum;
}

}  // namespace

VectorXc sample_cue_verblunsky(Index n, RandomStream& rng) {
  if (n < 1) throw InvalidDimension("Verblunsky sampler needs n >= 1");
  VectorXc alpha(n);
  for (Index k = 0; k + 1 < n; ++k) {
    const double shape = static_cast<double>(n - k - 1);
    const double r2 = 1.0 - std::pow(rng.uniform(), 1.0 / shape);
    alpha[k] = std::polar(std::sqrt(r2), kTwoPi * rng.uniform());
  }
  alpha[n - 1] = std::polar(1.0, kTwoPi * rng.uniform());
  return alpha;
}

DiscreteMeasure measure_from_verblunsky(const VectorXc& alpha) {
  const Index n = alpha.size();
  if (n < 1) throw InvalidDimension("empty Verblunsky sequence");
  if (std::abs(std::abs(alpha[n - 1]) - 1.0) > 1e-12)
    throw InvalidParameter("last Verblunsky coefficient must be unimodular");
  for (Index k = 0; k + 1 < n; ++k)
    if (!(std::abs(alpha[k]) < 1.0)) throw InvalidParameter("Verblunsky coefficients must lie in the open disk");

  const std::size_t grid = 2 * static_cast<std::size_t>(n) + 16;
  std::vector<double> thetas(grid + 1);
  std::vector<PhaseSample> samples(grid + 1);
  std::vector<double> psis(grid + 1);
  for (std::size_t j = 0; j <= grid; ++j) thetas[j] = kTwoPi * static_cast<double>(j) / static_cast<double>(grid);
  unwrapped_phase(alpha, thetas.data(), samples.data(), grid + 1);
  for (std::size_t j = 0; j <= grid; ++j) psis[j] = samples[j].psi;
  const double psi0 = psis.front();
  const double total = psis.back() - psi0;
  if (std::abs(total - kTwoPi * static_cast<double>(n)) > 1e-6)
    throw ConvergenceError("paraorthogonal phase winding did not resolve to 2*pi*n (got " +
                           std::to_string(total / kTwoPi) + ")");

  // Targets -arg(alpha_{n-1}) + 2 pi m in (psi0, psi0 + 2 pi n], one root each.
  const double offset = -std::arg(alpha[n - 1]);
  const double m0 = std::floor((psi0 - offset) / kTwoPi) + 1.0;
  const auto roots = static_cast<std::size_t>(n);
  std::vector<double> target(roots), lo(roots), hi(roots), x(roots), flo(roots), fhi(roots), dlo(roots), dhi(roots);
  for (std::size_t m = 0; m < roots; ++m) {
    target[m] = offset + kTwoPi * (m0 + static_cast<double>(m));
    const auto it = std::lower_bound(psis.begin(), psis.end(), target[m]);
    const std::size_t h = std::clamp<std::size_t>(static_cast<std::size_t>(it - psis.begin()), 1, grid);
    lo[m] = thetas[h - 1];
    hi[m] = thetas[h];
    flo[m] = psis[h - 1] - target[m];
    fhi[m] = psis[h] - target[m];
    dlo[m] = samples[h - 1].dpsi;
    dhi[m] = samples[h].dpsi;
    // Newton from the nearer bracket end, else the secant point.
    const bool from_lo = -flo[m] < fhi[m];
    const double x0 = from_lo ? lo[m] : hi[m];
    const double guess = x0 - (from_lo ? flo[m] / samples[h - 1].dpsi : fhi[m] / samples[h].dpsi);
    x[m] = guess > lo[m] && guess < hi[m] ? guess : lo[m] - flo[m] * (hi[m] - lo[m]) / (fhi[m] - flo[m]);
  }

  // Safeguarded Newton on the monotone phase, all roots in lockstep.
  std::vector<std::size_t> active(roots);
  for (std::size_t m = 0; m < roots; ++m) active[m] = m;
  std::vector<double> at;
  std::vector<PhaseSample> val;
  for (int iter = 0; iter < 200 && !active.empty(); ++iter) {
    at.resize(active.size());
    val.resize(active.size());
    for (std::size_t i = 0; i < active.size(); ++i) at[i] = x[active[i]];
    unwrapped_phase(alpha, at.data(), val.data(), at.size());
    std::size_t kept = 0;
    for (std::size_t i = 0; i < active.size(); ++i) {
      const std::size_t m = active[i];
      const double h = val[i].psi - target[m];
      if (h < 0.0) {
        lo[m] = x[m];
        flo[m] = h;
        dlo[m] = val[i].dpsi;
      } else {
        hi[m] = x[m];
        fhi[m] = h;
        dhi[m] = val[i].dpsi;
      }
      double next = x[m] - h / val[i].dpsi;
      const bool newton = next > lo[m] && next < hi[m];
      if (!newton) {
        // Newton from the other bracket end, else bisection.
        const bool at_lo = h < 0.0;
        next = at_lo ? hi[m] - fhi[m] / dhi[m] : lo[m] - flo[m] / dlo[m];
        if (!(next > lo[m] && next < hi[m])) next = 0.5 * (lo[m] + hi[m]);
      }
      const double step = std::abs(next - x[m]);
      x[m] = next;
      // Stop once a Newton step is this small; the quadratic tail is far smaller.
      if (!((newton && step < 1e-10) || hi[m] - lo[m] < 1e-14)) active[kept++] = m;
    }
    active.resize(kept);


  }

  DiscreteMeasure mu;
  mu.atoms.resize(n);
  mu.weights.resize(n);
  for (std::size_t m = 0; m < roots; ++m) {
    const auto i = static_cast<Index>(m);
    mu.atoms[i] = std::polar(1.0, x[m]);
    mu.weights[i] = christoffel_weight(alpha, mu.atoms[i]);
  }
  return mu;
}

VectorXc verblunsky_from_measure(const DiscreteMeasure& mu) {
  const Index n = mu.atoms.size();
  VectorXc phi = VectorXc::Ones(n);
  VectorXc phi_star = VectorXc::Ones(n);
  VectorXc alpha(n);
  for (Index k = 0; k < n; ++k) {
    double norm2 = 0.0;
    Complex proj{0.0, 0.0};
    for (Index j = 0; j < n; ++j) {
      norm2 += mu.weights[j] * std::norm(phi[j]);
      proj += mu.weights[j] * mu.atoms[j] * phi[j];
    }
    alpha[k] = std::conj(proj / norm2);
    const VectorXc zphi = mu.atoms.cwiseProduct(phi);
    const VectorXc next = zphi - std::conj(alpha[k]) * phi_star;
    phi_star = phi_star - alpha[k] * zphi;
    phi = next;
  }
  return alpha;
}

}  // namespace gafs::opuc
