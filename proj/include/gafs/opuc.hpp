#pragma once

// Orthogonal polynomials on the unit circle. Used to sample the spectral
// measure of a Haar unitary directly from its Verblunsky coefficients, which
// costs O(n^2) per sample instead of a dense O(n^3) eigendecomposition.
//
// Convention: monic Szego recursion
//   Phi_{k+1}(z)  = z Phi_k(z) - conj(alpha_k) Phi_k^*(z)
//   Phi_{k+1}^*(z) = Phi_k^*(z) - alpha_k z Phi_k(z)
// so that conj(alpha_0) = integral of z dmu.

#include "gafs/sampling.hpp"
#include "gafs/types.hpp"

namespace gafs::opuc {

struct DiscreteMeasure {
  VectorXc atoms;   // unimodular
  VectorXr weights; // positive, summing to one
};

/// Killip-Nenciu: for Haar U and a fixed unit vector, the Verblunsky
/// coefficients of the spectral measure are independent, |alpha_k|^2 ~
/// Beta(1, n-k-1) with uniform phase for k < n-1, and alpha_{n-1} is uniform
/// on the circle.
VectorXc sample_cue_verblunsky(Index n, RandomStream& rng);

/// Support and masses of the measure whose Verblunsky coefficients are
/// `alpha` (the last one unimodular). The atoms are the zeros of the
/// paraorthogonal polynomial Phi_n, the masses the Christoffel numbers.
DiscreteMeasure measure_from_verblunsky(const VectorXc& alpha);

/// Inverse map by the Szego recursion evaluated on the atoms.
VectorXc verblunsky_from_measure(const DiscreteMeasure& mu);

}  // namespace gafs::opuc
