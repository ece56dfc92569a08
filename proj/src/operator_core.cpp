#include "qtomo/operator_core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace qtomo {

double hermiticity_defect(const ComplexMatrix& a) {
  if (a.rows() != a.cols()) return std::numeric_limits<double>::infinity();
  if (a.size() == 0) return 0.0;
  return (a - a.adjoint()).cwiseAbs().maxCoeff();
}

bool is_hermitian(const ComplexMatrix& a, double tolerance) {
  return hermiticity_defect(a) <= tolerance;
}

double min_eigenvalue(const ComplexMatrix& a) {
  const ComplexMatrix herm = 0.5 * (a + a.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(herm, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

// ---------------------------------------------------------------------------
// DensityMatrix

DensityMatrix::DensityMatrix(ComplexMatrix m) : matrix_(std::move(m)) {
  if (matrix_.rows() == 0 || matrix_.rows() != matrix_.cols()) {
    throw DimensionError("density matrix must be square and non-empty, got " +
                         std::to_string(matrix_.rows()) + "x" +
                         std::to_string(matrix_.cols()));
  }
  const double defect = hermiticity_defect(matrix_);
  if (defect > tol::kHermitian) {
    throw ValidationError("density matrix is not Hermitian (max deviation " +
                          std::to_string(defect) + ")");
  }
  const Complex tr = matrix_.trace();
  if (std::abs(tr - Complex(1.0, 0.0)) > tol::kTrace) {
    std::ostringstream os;
    os.precision(17);
    os << "density matrix trace must be 1, got " << tr.real();
    throw ValidationError(os.str());
  }
  physical_ = min_eigenvalue(matrix_) >= tol::kEigenFloor;
}

DensityMatrix DensityMatrix::maximally_mixed(std::size_t dim) {
  const auto d = static_cast<Eigen::Index>(dim);
  return DensityMatrix(ComplexMatrix::Identity(d, d) / static_cast<double>(dim));
}

// ---------------------------------------------------------------------------
// POVM validation

std::string PovmViolation::describe() const {
  std::ostringstream os;
  switch (kind) {
    case PovmViolationKind::kNonHermitian:
      os << "element " << element << " is not Hermitian (deviation " << magnitude << ")";
      break;
    case PovmViolationKind::kNegativeEigenvalue:
      os << "element " << element << " is not positive (eigenvalue " << magnitude << ")";
      break;
    case PovmViolationKind::kIncomplete:
      os << "elements do not sum to the identity (residual norm " << magnitude << ")";
      break;
  }
  return os.str();
}

namespace {

std::string join_violations(const std::vector<PovmViolation>& vs) {
  std::string out = "invalid POVM: ";
  for (std::size_t i = 0; i < vs.size(); ++i) {
    if (i) out += "; ";
    out += vs[i].describe();
  }
  return out;
}

}  // namespace

PovmValidationError::PovmValidationError(std::vector<PovmViolation> violations)
    : ValidationError(join_violations(violations)), violations_(std::move(violations)) {}

Povm validate_povm(std::vector<ComplexMatrix> elements) {
  if (elements.empty()) throw DimensionError("POVM must contain at least one element");
  const Eigen::Index d = elements.front().rows();
  if (d == 0) throw DimensionError("POVM elements must be non-empty");
  for (std::size_t i = 0; i < elements.size(); ++i) {
    if (elements[i].rows() != d || elements[i].cols() != d) {
      throw DimensionError("POVM element " + std::to_string(i) + " is " +
                           std::to_string(elements[i].rows()) + "x" +
                           std::to_string(elements[i].cols()) + ", expected " +
                           std::to_string(d) + "x" + std::to_string(d));
    }
  }

  std::vector<PovmViolation> violations;
  ComplexMatrix sum = ComplexMatrix::Zero(d, d);
  for (std::size_t i = 0; i < elements.size(); ++i) {
    const int idx = static_cast<int>(i);
    const double defect = hermiticity_defect(elements[i]);
    if (defect > tol::kHermitian) {
      violations.push_back({PovmViolationKind::kNonHermitian, idx, defect});
    }
    const double lo = min_eigenvalue(elements[i]);
    if (lo < tol::kEigenFloor) {
      violations.push_back({PovmViolationKind::kNegativeEigenvalue, idx, lo});
    }
    sum += elements[i];
  }
  const ComplexMatrix residual = sum - ComplexMatrix::Identity(d, d);
  if (residual.cwiseAbs().maxCoeff() > tol::kCompleteness) {
    violations.push_back({PovmViolationKind::kIncomplete, -1, residual.norm()});
  }
  if (!violations.empty()) throw PovmValidationError(std::move(violations));
  return Povm(static_cast<std::size_t>(d), std::move(elements));
}

// ---------------------------------------------------------------------------
// ProbabilityVector

ProbabilityVector::ProbabilityVector(std::vector<double> values) : probs_(std::move(values)) {
  if (probs_.empty()) throw ValidationError("probability vector must be non-empty");
  for (std::size_t i = 0; i < probs_.size(); ++i) {
    if (!std::isfinite(probs_[i])) {
      throw ValidationError("probability " + std::to_string(i) + " is not finite");
    }
    if (probs_[i] < tol::kProbabilityFloor) {
      std::ostringstream os;
      os << "probability " << i << " is negative (" << probs_[i] << ")";
      throw ValidationError(os.str());
    }
  }
  const double raw_sum = std::accumulate(probs_.begin(), probs_.end(), 0.0);
  if (std::abs(raw_sum - 1.0) > tol::kProbabilitySum) {
    std::ostringstream os;
    os.precision(17);
    os << "probabilities must sum to 1, got " << raw_sum;
    throw ValidationError(os.str());
  }
  bool clamped = false;
  for (double& p : probs_) {
    if (p < 0.0) {
      p = 0.0;
      clamped = true;
    }
  }
  if (clamped) {
    const double s = std::accumulate(probs_.begin(), probs_.end(), 0.0);
    for (double& p : probs_) p /= s;
  }
}

ProbabilityVector ProbabilityVector::uniform(std::size_t n) {
  return ProbabilityVector(std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

RealVector ProbabilityVector::as_eigen() const {
  return Eigen::Map<const RealVector>(probs_.data(), static_cast<Eigen::Index>(probs_.size()));
}

// ---------------------------------------------------------------------------
// Born rule, expectations, distances

namespace {

// Tr[A B] without forming the product.
Complex trace_of_product(const ComplexMatrix& a, const ComplexMatrix& b) {
  return (a.array() * b.transpose().array()).sum();
}

}  // namespace

RealVector raw_born_values(const ComplexMatrix& op, const Povm& povm) {
  if (static_cast<std::size_t>(op.rows()) != povm.dim() || op.rows() != op.cols()) {
    throw DimensionError("operator dimension " + std::to_string(op.rows()) +
                         " does not match POVM dimension " + std::to_string(povm.dim()));
  }
  RealVector out(static_cast<Eigen::Index>(povm.size()));
  for (std::size_t i = 0; i < povm.size(); ++i) {
    out(static_cast<Eigen::Index>(i)) = trace_of_product(op, povm[i]).real();
  }
  return out;
}

ProbabilityVector born_probabilities(const DensityMatrix& state, const Povm& povm) {
  if (state.dim() != povm.dim()) {
    throw DimensionError("state dimension " + std::to_string(state.dim()) +
                         " does not match POVM dimension " + std::to_string(povm.dim()));
  }
  std::vector<double> probs(povm.size());
  for (std::size_t i = 0; i < povm.size(); ++i) {
    const Complex t = trace_of_product(state.matrix(), povm[i]);
    if (std::abs(t.imag()) > tol::kHermitian) {
      throw std::logic_error("Born probability " + std::to_string(i) +
                             " has imaginary residue " + std::to_string(t.imag()));
    }
    probs[i] = t.real();
  }
  return ProbabilityVector(std::move(probs));
}

Complex expectation(const DensityMatrix& state, const ComplexMatrix& observable) {
  if (observable.rows() != observable.cols() ||
      static_cast<std::size_t>(observable.rows()) != state.dim()) {
    throw DimensionError("observable must be " + std::to_string(state.dim()) + "x" +
                         std::to_string(state.dim()));
  }
  return trace_of_product(observable, state.matrix());
}

double hs_distance(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols() || a.rows() != a.cols()) {
    throw DimensionError("hs_distance needs square operators of equal dimension");
  }
  if (!is_hermitian(a, tol::kDistanceHermitian) || !is_hermitian(b, tol::kDistanceHermitian)) {
    throw ValidationError("hs_distance needs Hermitian operators");
  }
  // Tr[D^2] = sum |D_ij|^2 for Hermitian D.
  return (a - b).norm();
}

namespace pauli {

ComplexMatrix identity() { return ComplexMatrix::Identity(2, 2); }

ComplexMatrix x() {
  ComplexMatrix m(2, 2);
  m << 0.0, 1.0, 1.0, 0.0;
  return m;
}

ComplexMatrix y() {
  const Complex i(0.0, 1.0);
  ComplexMatrix m(2, 2);
  m << 0.0, -i, i, 0.0;
  return m;
}

ComplexMatrix z() {
  ComplexMatrix m(2, 2);
  m << 1.0, 0.0, 0.0, -1.0;
  return m;
}

}  // namespace pauli

std::array<double, 3> bloch_from_state(const DensityMatrix& state) {
  if (state.dim() != 2) {
    throw DimensionError("Bloch vector needs a qubit state, got dimension " +
                         std::to_string(state.dim()));
  }
  return {expectation(state, pauli::x()).real(), expectation(state, pauli::y()).real(),
          expectation(state, pauli::z()).real()};
}

DensityMatrix state_from_bloch(const std::array<double, 3>& s) {
  const ComplexMatrix m =
      0.5 * (pauli::identity() + s[0] * pauli::x() + s[1] * pauli::y() + s[2] * pauli::z());
  return DensityMatrix(m);
}

Povm pauli6_povm() {
  std::vector<ComplexMatrix> elements;
  for (const ComplexMatrix& sigma : {pauli::x(), pauli::y(), pauli::z()}) {
    elements.push_back((pauli::identity() + sigma) / 6.0);
    elements.push_back((pauli::identity() - sigma) / 6.0);
  }
  return validate_povm(std::move(elements));
}

DensityMatrix reference_qubit_state() {
  ComplexMatrix m(2, 2);
  m << Complex(4.0 / 5.0, 0.0), Complex(1.0 / 7.0, 1.0 / 3.0),
      Complex(1.0 / 7.0, -1.0 / 3.0), Complex(1.0 / 5.0, 0.0);
  return DensityMatrix(m);
}

}  // namespace qtomo
