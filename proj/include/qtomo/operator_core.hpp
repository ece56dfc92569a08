#pragma once

// Dense complex operators on a d-dimensional Hilbert space: states, POVMs,
// Born-rule probabilities and the Hilbert-Schmidt distance.

#include <Eigen/Dense>
#include <array>
#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "qtomo/errors.hpp"

namespace qtomo {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

namespace tol {
inline constexpr double kHermitian = 1e-12;
inline constexpr double kTrace = 1e-12;
inline constexpr double kEigenFloor = -1e-10;
inline constexpr double kCompleteness = 1e-10;
inline constexpr double kProbabilityFloor = -1e-12;
inline constexpr double kProbabilitySum = 1e-10;
inline constexpr double kDistanceHermitian = 1e-10;
}  // namespace tol

/// Largest |A(i,j) - conj(A(j,i))| over all entries; +inf for non-square input.
double hermiticity_defect(const ComplexMatrix& a);

bool is_hermitian(const ComplexMatrix& a, double tolerance);

/// Smallest eigenvalue of the Hermitian part of `a`.
double min_eigenvalue(const ComplexMatrix& a);

/// Hermitian d x d operator with unit trace. Positivity is tracked by a flag,
/// not enforced, because linear estimates can leave the physical cone.
class DensityMatrix {
 public:
  /// Throws ValidationError when `m` is not square, not Hermitian within
  /// 1e-12, or not unit trace within 1e-12.
  explicit DensityMatrix(ComplexMatrix m);

  static DensityMatrix maximally_mixed(std::size_t dim);

  std::size_t dim() const { return static_cast<std::size_t>(matrix_.rows()); }
  const ComplexMatrix& matrix() const { return matrix_; }
  /// All eigenvalues >= -1e-10.
  bool physical() const { return physical_; }

 private:
  ComplexMatrix matrix_;
  bool physical_ = true;
};

enum class PovmViolationKind { kNonHermitian, kNegativeEigenvalue, kIncomplete };

struct PovmViolation {
  PovmViolationKind kind;
  // Offending element; unset (-1) for the completeness check.
  int element = -1;
  // Hermiticity defect, most negative eigenvalue, or identity residual norm.
  double magnitude = 0.0;

  std::string describe() const;
};

class PovmValidationError : public ValidationError {
 public:
  explicit PovmValidationError(std::vector<PovmViolation> violations);
  const std::vector<PovmViolation>& violations() const { return violations_; }

 private:
  std::vector<PovmViolation> violations_;
};

class Povm {
 public:
  std::size_t dim() const { return dim_; }
  std::size_t size() const { return elements_.size(); }
  const ComplexMatrix& operator[](std::size_t i) const { return elements_[i]; }
  const std::vector<ComplexMatrix>& elements() const { return elements_; }

 private:
  friend Povm validate_povm(std::vector<ComplexMatrix> elements);
  Povm(std::size_t dim, std::vector<ComplexMatrix> elements)
      : dim_(dim), elements_(std::move(elements)) {}

  std::size_t dim_;
  std::vector<ComplexMatrix> elements_;
};

/// Checks every element for Hermiticity and positivity and the set for
/// resolution of the identity. Shape problems throw DimensionError; the
/// operator conditions are collected and thrown together as a
/// PovmValidationError.
Povm validate_povm(std::vector<ComplexMatrix> elements);

/// Outcome distribution: entries >= 0, sum 1 within 1e-10.
class ProbabilityVector {
 public:
  /// Entries in [-1e-12, 0) are clamped to zero and the vector renormalized;
  /// anything more negative, or a sum off by more than 1e-10, throws.
  explicit ProbabilityVector(std::vector<double> values);

  static ProbabilityVector uniform(std::size_t n);

  std::size_t size() const { return probs_.size(); }
  double operator[](std::size_t i) const { return probs_[i]; }
  std::span<const double> values() const { return probs_; }
  RealVector as_eigen() const;

 private:
  std::vector<double> probs_;
};

/// p(i|rho) = Re Tr[rho P_i].
ProbabilityVector born_probabilities(const DensityMatrix& state, const Povm& povm);

/// Tr[rho P_i] for an arbitrary Hermitian operator, without validation or
/// clamping. Used where iterates may leave the physical set.
RealVector raw_born_values(const ComplexMatrix& op, const Povm& povm);

Complex expectation(const DensityMatrix& state, const ComplexMatrix& observable);

/// sqrt(Tr[(a-b)^2]) for Hermitian a, b.
double hs_distance(const ComplexMatrix& a, const ComplexMatrix& b);

namespace pauli {
ComplexMatrix identity();
ComplexMatrix x();
ComplexMatrix y();
ComplexMatrix z();
}  // namespace pauli

std::array<double, 3> bloch_from_state(const DensityMatrix& state);

/// (I + s . sigma) / 2; Hermitian and unit trace for any real s.
DensityMatrix state_from_bloch(const std::array<double, 3>& s);

/// Six-outcome qubit POVM P_{+-k} = (I +- sigma_k) / 6, ordered
/// (+x, -x, +y, -y, +z, -z).
Povm pauli6_povm();

/// The qubit test state with Bloch vector (2/7, -2/3, 3/5).
DensityMatrix reference_qubit_state();

}  // namespace qtomo
