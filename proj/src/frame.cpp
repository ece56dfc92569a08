#include "qtomo/frame.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace qtomo {

ComplexVector vectorize(const ComplexMatrix& op) {
  const Eigen::Index d = op.rows();
  ComplexVector v(op.size());
  for (Eigen::Index m = 0; m < d; ++m) {
    for (Eigen::Index n = 0; n < op.cols(); ++n) v(m * op.cols() + n) = op(m, n);
  }
  return v;
}

ComplexMatrix devectorize(const ComplexVector& v, std::size_t dim) {
  const auto d = static_cast<Eigen::Index>(dim);
  if (v.size() != d * d) {
    throw DimensionError("cannot devectorize length " + std::to_string(v.size()) +
                         " into a " + std::to_string(dim) + "x" + std::to_string(dim) +
                         " operator");
  }
  ComplexMatrix op(d, d);
  for (Eigen::Index m = 0; m < d; ++m) {
    for (Eigen::Index n = 0; n < d; ++n) op(m, n) = v(m * d + n);
  }
  return op;
}

// ---------------------------------------------------------------------------
// Pseudoinverse

double default_pinv_tolerance(const ComplexMatrix& m) {
  return static_cast<double>(std::max(m.rows(), m.cols())) *
         std::numeric_limits<double>::epsilon();
}

namespace {

using Svd = Eigen::JacobiSVD<ComplexMatrix>;

Svd thin_svd(const ComplexMatrix& m) { return Svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV); }

double cutoff_for(const Svd& svd, const ComplexMatrix& m, std::optional<double> rel_tol) {
  const double tol = rel_tol.value_or(default_pinv_tolerance(m));
  if (!(tol > 0.0)) throw ValidationError("pseudoinverse tolerance must be positive");
  const auto& s = svd.singularValues();
  return s.size() == 0 ? 0.0 : tol * s(0);
}

}  // namespace

ComplexMatrix moore_penrose(const ComplexMatrix& m, std::optional<double> rel_tol) {
  if (m.size() == 0) return ComplexMatrix::Zero(m.cols(), m.rows());
  const Svd svd = thin_svd(m);
  const double cutoff = cutoff_for(svd, m, rel_tol);
  const RealVector& s = svd.singularValues();
  RealVector inv = RealVector::Zero(s.size());
  for (Eigen::Index k = 0; k < s.size(); ++k) {
    if (s(k) > cutoff) inv(k) = 1.0 / s(k);
  }
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().adjoint();
}

std::size_t numerical_rank(const ComplexMatrix& m, std::optional<double> rel_tol) {
  if (m.size() == 0) return 0;
  const Svd svd = thin_svd(m);
  const double cutoff = cutoff_for(svd, m, rel_tol);
  const RealVector& s = svd.singularValues();
  return static_cast<std::size_t>((s.array() > cutoff).count());
}

// ---------------------------------------------------------------------------
// Frame map

FrameMap build_frame_map(const Povm& povm) {
  FrameMap frame;
  frame.dim = povm.dim();
  frame.n_outcomes = povm.size();
  const auto d2 = static_cast<Eigen::Index>(frame.dim * frame.dim);
  frame.matrix.resize(d2, static_cast<Eigen::Index>(frame.n_outcomes));
  for (std::size_t i = 0; i < povm.size(); ++i) {
    frame.matrix.col(static_cast<Eigen::Index>(i)) = vectorize(povm[i]);
  }
  frame.rank = numerical_rank(frame.matrix);
  frame.info_complete = frame.rank == frame.dim * frame.dim;
  return frame;
}

std::string to_string(DualKind kind) {
  switch (kind) {
    case DualKind::kCanonical: return "canonical";
    case DualKind::kOptimal: return "optimal";
    case DualKind::kFrequentist: return "frequentist";
  }
  return "unknown";
}

DualKind dual_kind_from_string(const std::string& s) {
  if (s == "canonical") return DualKind::kCanonical;
  if (s == "optimal") return DualKind::kOptimal;
  if (s == "frequentist") return DualKind::kFrequentist;
  throw ValidationError("unknown dual provenance '" + s +
                        "' (expected canonical, optimal or frequentist)");
}

DualSet duals_from_ginverse(const GInverse& g, std::size_t dim, DualKind provenance) {
  const auto d2 = static_cast<Eigen::Index>(dim * dim);
  if (g.matrix.cols() != d2) {
    throw DimensionError("g-inverse has " + std::to_string(g.matrix.cols()) +
                         " columns, expected " + std::to_string(d2));
  }
  DualSet out;
  out.dim = dim;
  out.n_outcomes = static_cast<std::size_t>(g.matrix.rows());
  out.provenance = provenance;
  out.weight = g.weight;
  out.operators.reserve(out.n_outcomes);
  for (Eigen::Index i = 0; i < g.matrix.rows(); ++i) {
    const ComplexVector row = g.matrix.row(i).transpose().conjugate();
    out.operators.push_back(devectorize(row, dim));
  }
  return out;
}

CanonicalDuals canonical_duals(const FrameMap& frame) {
  CanonicalDuals c;
  c.ginverse.matrix = moore_penrose(frame.matrix);
  c.projector.matrix = c.ginverse.matrix * frame.matrix;
  c.duals = duals_from_ginverse(c.ginverse, frame.dim, DualKind::kCanonical);
  return c;
}

GInverse weighted_min_norm_ginverse(const CanonicalDuals& canonical, const RealVector& weights,
                                    std::optional<double> rel_tol) {
  const ComplexMatrix& m = canonical.projector.matrix;
  const Eigen::Index n = m.rows();
  if (weights.size() != n) {
    throw DimensionError("weight vector has length " + std::to_string(weights.size()) +
                         ", expected " + std::to_string(n));
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!std::isfinite(weights(i)) || weights(i) < 0.0) {
      throw ValidationError("weight " + std::to_string(i) + " must be finite and nonnegative");
    }
  }
  if (weights.sum() <= 0.0) throw ValidationError("weight vector must not be all zero");

  const ComplexMatrix complement = ComplexMatrix::Identity(n, n) - m;
  const auto w = weights.cast<Complex>().asDiagonal();
  const ComplexMatrix gram = complement * w * complement;
  // pinv(gram) lives on Rng(I-M); projecting again keeps round-off in the
  // discarded singular directions from leaking into Rng(M).
  const ComplexMatrix correction = complement * moore_penrose(gram, rel_tol) * w * m;

  GInverse g;
  g.matrix = canonical.ginverse.matrix - correction * canonical.ginverse.matrix;
  g.weight = weights;
  return g;
}

namespace {

WeightedDuals weighted_duals(const CanonicalDuals& canonical, const ProbabilityVector& w,
                             DualKind kind) {
  if (w.size() != canonical.duals.n_outcomes) {
    throw DimensionError("weight vector has length " + std::to_string(w.size()) +
                         ", frame has " + std::to_string(canonical.duals.n_outcomes) +
                         " outcomes");
  }
  WeightedDuals out;
  out.ginverse = weighted_min_norm_ginverse(canonical, w.as_eigen());
  out.duals = duals_from_ginverse(out.ginverse, canonical.duals.dim, kind);
  return out;
}

}  // namespace

WeightedDuals optimal_duals(const CanonicalDuals& canonical, const ProbabilityVector& prior_probs) {
  return weighted_duals(canonical, prior_probs, DualKind::kOptimal);
}

WeightedDuals optimal_duals(const FrameMap& frame, const ProbabilityVector& prior_probs) {
  return optimal_duals(canonical_duals(frame), prior_probs);
}

WeightedDuals frequentist_duals(const CanonicalDuals& canonical, const ProbabilityVector& freqs) {
  return weighted_duals(canonical, freqs, DualKind::kFrequentist);
}

WeightedDuals frequentist_duals(const FrameMap& frame, const ProbabilityVector& freqs) {
  return frequentist_duals(canonical_duals(frame), freqs);
}

// ---------------------------------------------------------------------------
// Expansions

ComplexVector dual_coefficients(const DualSet& duals, const ComplexMatrix& x) {
  const auto d = static_cast<Eigen::Index>(duals.dim);
  if (x.rows() != d || x.cols() != d) {
    throw DimensionError("operator must be " + std::to_string(d) + "x" + std::to_string(d));
  }
  ComplexVector f(static_cast<Eigen::Index>(duals.n_outcomes));
  for (std::size_t i = 0; i < duals.n_outcomes; ++i) {
    // Tr[D^dagger X] = sum conj(D_mn) X_mn
    f(static_cast<Eigen::Index>(i)) = (duals.operators[i].conjugate().array() * x.array()).sum();
  }
  return f;
}

ComplexVector expansion_coefficients(const DualSet& duals, const Povm& povm, const ComplexMatrix& x) {
  if (povm.size() != duals.n_outcomes || povm.dim() != duals.dim) {
    throw DimensionError("dual set and POVM disagree in shape");
  }
  ComplexVector f = dual_coefficients(duals, x);
  ComplexMatrix rebuilt = ComplexMatrix::Zero(x.rows(), x.cols());
  for (std::size_t i = 0; i < povm.size(); ++i) rebuilt += f(static_cast<Eigen::Index>(i)) * povm[i];
  const double residual = (rebuilt - x).cwiseAbs().maxCoeff();
  if (residual > 1e-10) {
    std::ostringstream os;
    os << "operator is outside the span of the POVM (residual " << residual << ")";
    throw ValidationError(os.str());
  }
  return f;
}

double statistical_error(const DualSet& duals, const ComplexMatrix& x, const RealVector& weights) {
  if (weights.size() != static_cast<Eigen::Index>(duals.n_outcomes)) {
    throw DimensionError("weight vector length does not match number of duals");
  }
  const ComplexVector f = dual_coefficients(duals, x);
  return (f.cwiseAbs2().array() * weights.array()).sum();
}

}  // namespace qtomo
