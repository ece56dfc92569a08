#include <catch_amalgamated.hpp>

#include <cmath>

#include "qtomo/estimators.hpp"
#include "qtomo/frame.hpp"
#include "unit/test_support.hpp"

using namespace qtomo;
using Catch::Matchers::WithinAbs;

namespace {

double max_abs_diff(const DualSet& a, const DualSet& b) {
  REQUIRE(a.operators.size() == b.operators.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < a.operators.size(); ++i) {
    worst = std::max(worst, (a.operators[i] - b.operators[i]).cwiseAbs().maxCoeff());
  }
  return worst;
}

Povm computational_basis_povm() {
  ComplexMatrix p0 = ComplexMatrix::Zero(2, 2);
  ComplexMatrix p1 = ComplexMatrix::Zero(2, 2);
  p0(0, 0) = 1.0;
  p1(1, 1) = 1.0;
  return validate_povm({p0, p1});
}

ComplexMatrix reconstruct_from(const DualSet& duals, const RealVector& p) {
  ComplexMatrix out = ComplexMatrix::Zero(static_cast<Eigen::Index>(duals.dim),
                                          static_cast<Eigen::Index>(duals.dim));
  for (std::size_t i = 0; i < duals.n_outcomes; ++i) {
    out += p(static_cast<Eigen::Index>(i)) * duals.operators[i];
  }
  return out;
}

}  // namespace

TEST_CASE("vectorization is row-major and round-trips") {
  ComplexMatrix m(2, 2);
  m << 1.0, 2.0, 3.0, 4.0;
  const ComplexVector v = vectorize(m);
  CHECK(v(1) == Complex(2.0));
  CHECK(v(2) == Complex(3.0));

  testing::Rng rng(1);
  for (int trial = 0; trial < 20; ++trial) {
    const ComplexMatrix x = testing::random_complex(rng, 4, 4);
    CHECK(devectorize(vectorize(x), 4) == x);
  }
  CHECK_THROWS_AS(devectorize(ComplexVector::Zero(5), 2), DimensionError);
}

TEST_CASE("build_frame_map") {
  SECTION("Pauli POVM is informationally complete") {
    const Povm povm = pauli6_povm();
    const FrameMap f = build_frame_map(povm);
    CHECK(f.matrix.rows() == 4);
    CHECK(f.matrix.cols() == 6);
    CHECK(f.rank == 4);
    CHECK(f.info_complete);
    for (std::size_t i = 0; i < 6; ++i) {
      CHECK(devectorize(f.matrix.col(static_cast<Eigen::Index>(i)), 2) == povm[i]);
    }
  }
  SECTION("trivial POVM") {
    const FrameMap f = build_frame_map(validate_povm({ComplexMatrix::Identity(2, 2)}));
    CHECK(f.matrix.rows() == 4);
    CHECK(f.matrix.cols() == 1);
    CHECK(f.rank == 1);
    CHECK_FALSE(f.info_complete);
  }
  SECTION("computational basis") {
    const FrameMap f = build_frame_map(computational_basis_povm());
    CHECK(f.rank == 2);
    CHECK_FALSE(f.info_complete);
  }
}

TEST_CASE("moore_penrose examples") {
  CHECK((moore_penrose(ComplexMatrix::Identity(3, 3)) - ComplexMatrix::Identity(3, 3)).norm() <
        1e-15);

  ComplexMatrix d = ComplexMatrix::Zero(2, 2);
  d(0, 0) = 2.0;
  const ComplexMatrix inv = moore_penrose(d);
  CHECK_THAT(inv(0, 0).real(), WithinAbs(0.5, 1e-15));
  CHECK(std::abs(inv(1, 1)) == 0.0);

  const ComplexMatrix zero = moore_penrose(ComplexMatrix::Zero(3, 2));
  CHECK(zero.rows() == 2);
  CHECK(zero.cols() == 3);
  CHECK(zero.norm() == 0.0);

  CHECK_THROWS_AS(moore_penrose(ComplexMatrix::Identity(2, 2), 0.0), ValidationError);
}

TEST_CASE("moore_penrose satisfies the four Penrose conditions") {
  testing::Rng rng(2024);
  struct Shape {
    Eigen::Index rows, cols, rank;
  };
  for (const Shape s : {Shape{6, 4, 4}, Shape{4, 6, 4}, Shape{5, 5, 3}}) {
    for (int trial = 0; trial < 20; ++trial) {
      const ComplexMatrix a = testing::random_complex_of_rank(rng, s.rows, s.cols, s.rank);
      const auto res = testing::penrose_residuals(a, moore_penrose(a));
      for (double r : res) CHECK(r < 1e-10);
      CHECK(numerical_rank(a) == static_cast<std::size_t>(s.rank));
    }
  }
}

TEST_CASE("moore_penrose agrees with the normal-equation inverse on full-rank input") {
  testing::Rng rng(9);
  for (int trial = 0; trial < 20; ++trial) {
    const ComplexMatrix a = testing::random_complex(rng, 4, 7);
    const ComplexMatrix oracle = testing::normal_equation_ginverse(a, RealVector::Ones(7));
    CHECK((moore_penrose(a) - oracle).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("canonical duals of the Pauli POVM") {
  const Povm povm = pauli6_povm();
  const FrameMap frame = build_frame_map(povm);
  const CanonicalDuals c = canonical_duals(frame);

  const ComplexMatrix sigmas[] = {pauli::x(), pauli::y(), pauli::z()};
  for (int k = 0; k < 3; ++k) {
    const ComplexMatrix plus = 0.5 * pauli::identity() + 1.5 * sigmas[k];
    const ComplexMatrix minus = 0.5 * pauli::identity() - 1.5 * sigmas[k];
    CHECK((c.duals.operators[2 * k] - plus).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((c.duals.operators[2 * k + 1] - minus).cwiseAbs().maxCoeff() < 1e-12);
  }
  CHECK(c.duals.provenance == DualKind::kCanonical);

  // Independent route: normal equations.
  const ComplexMatrix oracle = testing::normal_equation_ginverse(frame.matrix, RealVector::Ones(6));
  CHECK((c.ginverse.matrix - oracle).cwiseAbs().maxCoeff() < 1e-12);

  CHECK_THAT(c.projector.matrix.trace().real(), WithinAbs(4.0, 1e-8));

  // Null space generators are annihilated by the frame and orthogonal to Gamma_mp rows.
  RealVector n1(6), n2(6);
  n1 << 1, 1, -1, -1, 0, 0;
  n2 << 1, 1, 0, 0, -1, -1;
  for (const RealVector& n : {n1, n2}) {
    const ComplexVector nc = n.cast<Complex>();
    CHECK((frame.matrix * nc).norm() < 1e-15);
    CHECK((c.projector.matrix * nc).norm() < 1e-12);
  }

  for (const auto& d : c.duals.operators) {
    CHECK(is_hermitian(d, 1e-10));
    CHECK_THAT(d.trace().real(), WithinAbs(1.0, 1e-10));
  }
}

TEST_CASE("orthonormal projectors are self-dual") {
  const Povm povm = computational_basis_povm();
  const CanonicalDuals c = canonical_duals(build_frame_map(povm));
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK((c.duals.operators[i] - povm[i]).cwiseAbs().maxCoeff() < 1e-15);
  }
}

TEST_CASE("ProjectorM is an orthogonal projector with trace equal to the rank") {
  testing::Rng rng(44);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t d = 2 + static_cast<std::size_t>(trial % 2);
    const std::size_t n = d * d + static_cast<std::size_t>(trial % 3);
    const FrameMap frame = build_frame_map(testing::random_povm(rng, d, n));
    const ComplexMatrix& m = canonical_duals(frame).projector.matrix;
    CHECK((m * m - m).norm() < 1e-10);
    CHECK((m - m.adjoint()).norm() < 1e-10);
    CHECK_THAT(m.trace().real(), WithinAbs(static_cast<double>(frame.rank), 1e-8));
  }
}

TEST_CASE("optimal duals") {
  const Povm povm = pauli6_povm();
  const FrameMap frame = build_frame_map(povm);
  const CanonicalDuals c = canonical_duals(frame);

  SECTION("uniform prior reduces to canonical duals") {
    const WeightedDuals w = optimal_duals(frame, ProbabilityVector::uniform(6));
    CHECK(max_abs_diff(w.duals, c.duals) < 1e-12);
    CHECK(w.duals.provenance == DualKind::kOptimal);
  }

  SECTION("reference prior lowers the sigma_z noise") {
    const ProbabilityVector pi = born_probabilities(reference_qubit_state(), povm);
    const WeightedDuals w = optimal_duals(frame, pi);
    const double opt = statistical_error(w.duals, pauli::z(), pi.as_eigen());
    const double can = statistical_error(c.duals, pauli::z(), pi.as_eigen());
    CHECK(opt < can);

    // Independent closed form of the weighted minimum-norm inverse.
    const ComplexMatrix oracle = testing::normal_equation_ginverse(frame.matrix, pi.as_eigen());
    CHECK((w.ginverse.matrix - oracle).cwiseAbs().maxCoeff() < 1e-10);
  }

  SECTION("unit trace for any prior state") {
    testing::Rng rng(8);
    for (int trial = 0; trial < 30; ++trial) {
      const DensityMatrix prior = testing::random_density_matrix(rng, 2);
      const WeightedDuals w = optimal_duals(c, born_probabilities(prior, povm));
      for (const auto& d : w.duals.operators) {
        CHECK_THAT(d.trace().real(), WithinAbs(1.0, 1e-10));
        CHECK(is_hermitian(d, 1e-10));
      }
    }
  }

  SECTION("arbitrary weights keep the reconstruction identity") {
    testing::Rng rng(9);
    for (int trial = 0; trial < 30; ++trial) {
      const WeightedDuals w = optimal_duals(c, testing::random_positive_probs(rng, 6));
      const DensityMatrix rho = testing::random_density_matrix(rng, 2);
      const ProbabilityVector p = born_probabilities(rho, povm);
      CHECK(hs_distance(reconstruct(w.duals, p), rho.matrix()) < 1e-10);
      for (const auto& d : w.duals.operators) CHECK(is_hermitian(d, 1e-10));
    }
  }

  SECTION("bad weights") {
    CHECK_THROWS_AS(weighted_min_norm_ginverse(c, RealVector::Zero(6)), ValidationError);
    RealVector neg = RealVector::Constant(6, 0.2);
    neg(3) = -0.1;
    CHECK_THROWS_AS(weighted_min_norm_ginverse(c, neg), ValidationError);
    CHECK_THROWS_AS(weighted_min_norm_ginverse(c, RealVector::Ones(5)), DimensionError);
    CHECK_THROWS_AS(optimal_duals(c, ProbabilityVector::uniform(4)), DimensionError);
  }
}

TEST_CASE("frequentist duals") {
  const Povm povm = pauli6_povm();
  const FrameMap frame = build_frame_map(povm);
  const CanonicalDuals c = canonical_duals(frame);

  SECTION("uniform frequencies give canonical duals") {
    CHECK(max_abs_diff(frequentist_duals(frame, ProbabilityVector::uniform(6)).duals, c.duals) <
          1e-12);
  }
  SECTION("exact probabilities match the prior-optimal construction") {
    const ProbabilityVector p = born_probabilities(reference_qubit_state(), povm);
    const WeightedDuals f = frequentist_duals(frame, p);
    const WeightedDuals o = optimal_duals(frame, p);
    CHECK(max_abs_diff(f.duals, o.duals) < 1e-12);
    CHECK(f.duals.provenance == DualKind::kFrequentist);
  }
  SECTION("degenerate frequencies still give a g-inverse") {
    const ProbabilityVector nu({0.5, 0.5, 0.0, 0.0, 0.0, 0.0});
    const WeightedDuals f = frequentist_duals(frame, nu);
    const ComplexMatrix& g = f.ginverse.matrix;
    CHECK((frame.matrix * g * frame.matrix - frame.matrix).norm() < 1e-10);
    for (const auto& d : f.duals.operators) CHECK(is_hermitian(d, 1e-10));
  }
}

TEST_CASE("g-inverse identity and weighted minimum-norm condition on random POVMs") {
  testing::Rng rng(123);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t d = 2 + static_cast<std::size_t>(trial % 2);
    const std::size_t n = d * d + 1 + static_cast<std::size_t>(trial % 4);
    const FrameMap frame = build_frame_map(testing::random_povm(rng, d, n));
    REQUIRE(frame.info_complete);
    const CanonicalDuals c = canonical_duals(frame);
    const ProbabilityVector pi = testing::random_positive_probs(rng, n);
    const ComplexMatrix& lam = frame.matrix;

    for (const ComplexMatrix& g : {c.ginverse.matrix, optimal_duals(c, pi).ginverse.matrix,
                                   frequentist_duals(c, pi).ginverse.matrix}) {
      CHECK((lam * g * lam - lam).norm() < 1e-10);
    }
    const ComplexMatrix g = optimal_duals(c, pi).ginverse.matrix;
    const ComplexMatrix wgl = pi.as_eigen().cast<Complex>().asDiagonal() * g * lam;
    CHECK((wgl - wgl.adjoint()).norm() < 1e-10);
  }
}

TEST_CASE("optimal duals minimize the weighted coefficient norm") {
  testing::Rng rng(77);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t d = 2;
    const std::size_t n = 6 + static_cast<std::size_t>(trial % 3);
    const Povm povm = testing::random_povm(rng, d, n);
    const FrameMap frame = build_frame_map(povm);
    const CanonicalDuals c = canonical_duals(frame);
    const ProbabilityVector pi = testing::random_positive_probs(rng, n);
    const WeightedDuals opt = optimal_duals(c, pi);
    const RealVector w = pi.as_eigen();
    const ComplexMatrix& lam = frame.matrix;
    const ComplexMatrix proj = ComplexMatrix::Identity(static_cast<Eigen::Index>(n),
                                                       static_cast<Eigen::Index>(n)) -
                               opt.ginverse.matrix * lam;

    for (int k = 0; k < 10; ++k) {
      const ComplexMatrix x = testing::random_hermitian(rng, 2);
      const double s_opt = statistical_error(opt.duals, x, w);
      CHECK(s_opt <= statistical_error(c.duals, x, w) + 1e-12);

      const ComplexVector f = dual_coefficients(opt.duals, x);
      const ComplexVector z = testing::random_complex(rng, static_cast<Eigen::Index>(n), 1);
      const ComplexVector perturbed = f + proj * z;
      // Still a solution of Lambda x = vec(X)
      CHECK((lam * perturbed - vectorize(x)).norm() < 1e-10);
      const double s_pert = (perturbed.cwiseAbs2().array() * w.array()).sum();
      CHECK(s_pert >= s_opt - 1e-12);
    }
  }
}

TEST_CASE("reconstruction identity holds for every dual provenance") {
  testing::Rng rng(31);
  const Povm povm = pauli6_povm();
  const CanonicalDuals c = canonical_duals(build_frame_map(povm));
  for (int trial = 0; trial < 100; ++trial) {
    const DensityMatrix rho = testing::random_density_matrix(rng, 2);
    const ProbabilityVector p = born_probabilities(rho, povm);
    const ProbabilityVector pi = testing::random_positive_probs(rng, 6);
    for (const DualSet& duals :
         {c.duals, optimal_duals(c, pi).duals, frequentist_duals(c, p).duals}) {
      CHECK((reconstruct_from(duals, p.as_eigen()) - rho.matrix()).cwiseAbs().maxCoeff() < 1e-10);
    }
  }
}

TEST_CASE("expansion coefficients") {
  const Povm povm = pauli6_povm();
  const CanonicalDuals c = canonical_duals(build_frame_map(povm));

  const ComplexVector ones = expansion_coefficients(c.duals, povm, pauli::identity());
  for (Eigen::Index i = 0; i < 6; ++i) CHECK(std::abs(ones(i) - 1.0) < 1e-12);

  const ComplexVector fz = expansion_coefficients(c.duals, povm, pauli::z());
  const double expected[] = {0, 0, 0, 0, 3, -3};
  for (Eigen::Index i = 0; i < 6; ++i) CHECK(std::abs(fz(i) - expected[i]) < 1e-12);

  CHECK(expansion_coefficients(c.duals, povm, ComplexMatrix::Zero(2, 2)).norm() == 0.0);

  const Povm basis = computational_basis_povm();
  const CanonicalDuals cb = canonical_duals(build_frame_map(basis));
  CHECK_THROWS_AS(expansion_coefficients(cb.duals, basis, pauli::x()), ValidationError);
  CHECK_THROWS_AS(expansion_coefficients(c.duals, povm, ComplexMatrix::Zero(3, 3)), DimensionError);
}

TEST_CASE("statistical error") {
  const Povm povm = pauli6_povm();
  const CanonicalDuals c = canonical_duals(build_frame_map(povm));
  const RealVector uniform = RealVector::Constant(6, 1.0 / 6.0);
  CHECK_THAT(statistical_error(c.duals, pauli::z(), uniform), WithinAbs(3.0, 1e-12));
  CHECK_THAT(statistical_error(c.duals, pauli::identity(), uniform), WithinAbs(1.0, 1e-12));
  CHECK(statistical_error(c.duals, ComplexMatrix::Zero(2, 2), uniform) == 0.0);
  CHECK_THROWS_AS(statistical_error(c.duals, pauli::z(), RealVector::Ones(4)), DimensionError);
}
