#pragma once

// Random generators and independent reference computations used by the unit
// and acceptance suites. Nothing here calls the SVD-based routines under test.

#include <array>
#include <cstdint>
#include <random>
#include <vector>

#include "qtomo/operator_core.hpp"

namespace qtomo::testing {

using Rng = std::mt19937_64;

ComplexMatrix random_complex(Rng& rng, Eigen::Index rows, Eigen::Index cols);
/// rows x cols matrix of exact rank `rank` (product of two Gaussian factors).
ComplexMatrix random_complex_of_rank(Rng& rng, Eigen::Index rows, Eigen::Index cols,
                                     Eigen::Index rank);
ComplexMatrix random_hermitian(Rng& rng, Eigen::Index dim);
/// G G^dagger / Tr, with G Gaussian.
DensityMatrix random_density_matrix(Rng& rng, std::size_t dim);
/// N random positive operators S^{-1/2} A_k S^{-1/2}, S = sum A_k.
Povm random_povm(Rng& rng, std::size_t dim, std::size_t n);
/// Entries in [0.05, 1), normalized to sum 1.
ProbabilityVector random_positive_probs(Rng& rng, std::size_t n);

/// Weighted minimum-norm right inverse of a full-row-rank frame map through
/// the normal equations: W^{-1} L^dagger (L W^{-1} L^dagger)^{-1}.
/// With unit weights this is the Moore-Penrose inverse.
ComplexMatrix normal_equation_ginverse(const ComplexMatrix& frame, const RealVector& weights);

/// Frobenius norms of A X A - A, X A X - X, (A X)^dagger - A X, (X A)^dagger - X A.
std::array<double, 4> penrose_residuals(const ComplexMatrix& a, const ComplexMatrix& x);

/// Orthonormal basis of the null space of `a`, via full-pivoting LU kernel
/// followed by Householder QR.
ComplexMatrix null_space_basis(const ComplexMatrix& a);

/// Exact Born probabilities of the reference state for the six-outcome
/// Pauli POVM as integer counts over 630 shots.
std::vector<std::uint64_t> reference_exact_counts();

}  // namespace qtomo::testing
