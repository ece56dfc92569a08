#include "unit/test_support.hpp"

#include <cmath>

namespace qtomo::testing {

ComplexMatrix random_complex(Rng& rng, Eigen::Index rows, Eigen::Index cols) {
  std::normal_distribution<double> g(0.0, 1.0);
  ComplexMatrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = Complex(g(rng), g(rng));
  }
  return m;
}

ComplexMatrix random_complex_of_rank(Rng& rng, Eigen::Index rows, Eigen::Index cols,
                                     Eigen::Index rank) {
  return random_complex(rng, rows, rank) * random_complex(rng, rank, cols);
}

ComplexMatrix random_hermitian(Rng& rng, Eigen::Index dim) {
  const ComplexMatrix a = random_complex(rng, dim, dim);
  return 0.5 * (a + a.adjoint());
}

DensityMatrix random_density_matrix(Rng& rng, std::size_t dim) {
  const auto d = static_cast<Eigen::Index>(dim);
  const ComplexMatrix g = random_complex(rng, d, d);
  ComplexMatrix rho = g * g.adjoint();
  rho /= rho.trace().real();
  rho = 0.5 * (rho + rho.adjoint()).eval();
  return DensityMatrix(rho);
}

Povm random_povm(Rng& rng, std::size_t dim, std::size_t n) {
  const auto d = static_cast<Eigen::Index>(dim);
  std::vector<ComplexMatrix> a;
  ComplexMatrix s = ComplexMatrix::Zero(d, d);
  for (std::size_t k = 0; k < n; ++k) {
    const ComplexMatrix g = random_complex(rng, d, d);
    a.push_back(g * g.adjoint());
    s += a.back();
  }
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(s);
  const ComplexMatrix inv_sqrt = es.operatorInverseSqrt();
  std::vector<ComplexMatrix> elements;
  for (const auto& ak : a) {
    ComplexMatrix p = inv_sqrt * ak * inv_sqrt;
    elements.push_back(0.5 * (p + p.adjoint()));
  }
  // Absorb the residual of the identity sum into the last element.
  ComplexMatrix sum = ComplexMatrix::Zero(d, d);
  for (const auto& e : elements) sum += e;
  elements.back() += ComplexMatrix::Identity(d, d) - sum;
  return validate_povm(std::move(elements));
}

ProbabilityVector random_positive_probs(Rng& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(0.05, 1.0);
  std::vector<double> p(n);
  double s = 0.0;
  for (double& x : p) s += (x = u(rng));
  for (double& x : p) x /= s;
  return ProbabilityVector(std::move(p));
}

ComplexMatrix normal_equation_ginverse(const ComplexMatrix& frame, const RealVector& weights) {
  const ComplexMatrix w_inv = weights.cwiseInverse().cast<Complex>().asDiagonal();
  const ComplexMatrix gram = frame * w_inv * frame.adjoint();
  return w_inv * frame.adjoint() * gram.partialPivLu().inverse();
}

std::array<double, 4> penrose_residuals(const ComplexMatrix& a, const ComplexMatrix& x) {
  const ComplexMatrix ax = a * x;
  const ComplexMatrix xa = x * a;
  return {(a * x * a - a).norm(), (x * a * x - x).norm(), (ax.adjoint() - ax).norm(),
          (xa.adjoint() - xa).norm()};
}

ComplexMatrix null_space_basis(const ComplexMatrix& a) {
  Eigen::FullPivLU<ComplexMatrix> lu(a);
  lu.setThreshold(1e-10);
  const ComplexMatrix kernel = lu.kernel();
  if (lu.rank() == a.cols()) return ComplexMatrix::Zero(a.cols(), 0);
  Eigen::HouseholderQR<ComplexMatrix> qr(kernel);
  return qr.householderQ() * ComplexMatrix::Identity(kernel.rows(), kernel.cols());
}

std::vector<std::uint64_t> reference_exact_counts() {
  // (3/14, 5/42, 1/18, 5/18, 4/15, 1/15) * 630
  return {135, 75, 35, 175, 168, 42};
}

}  // namespace qtomo::testing
