#pragma once

// Frame map of a POVM, its generalized inverses and the dual operator sets
// used as reconstruction kernels.
//
// Operators are vectorized row-major: entry (m, n) of a d x d matrix lands in
// row m*d + n. The frame map has column i equal to vec(P_i); a g-inverse
// Gamma is N x d^2 and its rows define duals through (D_i)_{mn} = conj(Gamma_{i,mn}).

#include <optional>
#include <string>
#include <vector>

#include "qtomo/operator_core.hpp"

namespace qtomo {

ComplexVector vectorize(const ComplexMatrix& op);
ComplexMatrix devectorize(const ComplexVector& v, std::size_t dim);

struct FrameMap {
  std::size_t dim = 0;
  std::size_t n_outcomes = 0;
  ComplexMatrix matrix;  // d^2 x N
  std::size_t rank = 0;
  bool info_complete = false;
};

FrameMap build_frame_map(const Povm& povm);

/// Relative cutoff used when no explicit tolerance is given:
/// max(rows, cols) * machine epsilon.
double default_pinv_tolerance(const ComplexMatrix& m);

/// Moore-Penrose pseudoinverse by SVD. Singular values at or below
/// rel_tol * sigma_max are treated as zero.
ComplexMatrix moore_penrose(const ComplexMatrix& m, std::optional<double> rel_tol = std::nullopt);

/// Number of singular values above rel_tol * sigma_max.
std::size_t numerical_rank(const ComplexMatrix& m, std::optional<double> rel_tol = std::nullopt);

struct GInverse {
  ComplexMatrix matrix;            // N x d^2
  std::optional<RealVector> weight;  // diagonal metric of the minimum-norm condition
};

enum class DualKind { kCanonical, kOptimal, kFrequentist };

std::string to_string(DualKind kind);
DualKind dual_kind_from_string(const std::string& s);

struct DualSet {
  std::size_t dim = 0;
  std::size_t n_outcomes = 0;
  std::vector<ComplexMatrix> operators;
  DualKind provenance = DualKind::kCanonical;
  // Weight vector for optimal / frequentist provenance.
  std::optional<RealVector> weight;
};

/// Builds D_i from the rows of a g-inverse.
DualSet duals_from_ginverse(const GInverse& g, std::size_t dim, DualKind provenance);

struct ProjectorM {
  ComplexMatrix matrix;  // N x N, Gamma_mp Lambda
};

struct CanonicalDuals {
  DualSet duals;
  GInverse ginverse;
  ProjectorM projector;
};

CanonicalDuals canonical_duals(const FrameMap& frame);

struct WeightedDuals {
  DualSet duals;
  GInverse ginverse;
};

/// Minimum-norm g-inverse for the diagonal metric `weights`:
///   Gamma = Gamma_mp - [(I-M) W (I-M)]^+ W M Gamma_mp.
/// Weights must be nonnegative and not all zero. Zero weights are allowed;
/// the pseudoinverse cutoff `rel_tol` then decides the effective rank.
GInverse weighted_min_norm_ginverse(const CanonicalDuals& canonical, const RealVector& weights,
                                    std::optional<double> rel_tol = std::nullopt);

/// Duals minimizing sum_i |f_i[X]|^2 pi_i for every X.
WeightedDuals optimal_duals(const FrameMap& frame, const ProbabilityVector& prior_probs);
WeightedDuals optimal_duals(const CanonicalDuals& canonical, const ProbabilityVector& prior_probs);

/// Same construction with observed frequencies as the metric.
WeightedDuals frequentist_duals(const FrameMap& frame, const ProbabilityVector& freqs);
WeightedDuals frequentist_duals(const CanonicalDuals& canonical, const ProbabilityVector& freqs);

/// f_i[X] = Tr[D_i^dagger X]. Throws ValidationError when sum_i f_i P_i
/// misses X by more than 1e-10 (X outside the span of the POVM).
ComplexVector expansion_coefficients(const DualSet& duals, const Povm& povm, const ComplexMatrix& x);

/// Coefficients without the span check.
ComplexVector dual_coefficients(const DualSet& duals, const ComplexMatrix& x);

/// sum_i |f_i[X]|^2 w_i.
double statistical_error(const DualSet& duals, const ComplexMatrix& x, const RealVector& weights);

}  // namespace qtomo
