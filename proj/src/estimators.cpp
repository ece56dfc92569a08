#include "qtomo/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

namespace qtomo {

namespace {

ProbabilityVector counts_to_freqs(const std::vector<std::uint64_t>& counts) {
  if (counts.empty()) throw ValidationError("counts must be non-empty");
  const std::uint64_t total = std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
  if (total == 0) throw ValidationError("counts must contain at least one event");
  std::vector<double> nu(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i) {
    nu[i] = static_cast<double>(counts[i]) / static_cast<double>(total);
  }
  return ProbabilityVector(std::move(nu));
}

void finish(EstimateRecord& r) {
  r.trace = r.estimate.trace().real();
  r.physical = min_eigenvalue(r.estimate) >= tol::kEigenFloor;
}

void check_shape(const Povm& povm, const ProbabilityVector& freqs) {
  if (freqs.size() != povm.size()) {
    throw DimensionError("counts have " + std::to_string(freqs.size()) + " entries, POVM has " +
                         std::to_string(povm.size()) + " outcomes");
  }
}

DensityMatrix prior_or_mixed(const Povm& povm, const std::optional<DensityMatrix>& prior) {
  if (!prior) return DensityMatrix::maximally_mixed(povm.dim());
  return *prior;
}

}  // namespace

FrequencyVector::FrequencyVector(std::vector<std::uint64_t> counts)
    : counts_(std::move(counts)),
      total_(std::accumulate(counts_.begin(), counts_.end(), std::uint64_t{0})),
      freqs_(counts_to_freqs(counts_)) {}

bool FrequencyVector::is_uniform() const {
  return std::adjacent_find(counts_.begin(), counts_.end(), std::not_equal_to<>()) == counts_.end();
}

void IterationSchedule::validate() const {
  if (max_iterations < 1) throw ValidationError("iterations must be at least 1");
  if (!(tolerance >= 0.0)) throw ValidationError("tolerance must be nonnegative");
  if (!(probability_floor >= 0.0)) throw ValidationError("probability floor must be nonnegative");
}

std::string to_string(Method m) {
  switch (m) {
    case Method::kPlain: return "plain";
    case Method::kBayes: return "bayes";
    case Method::kFreq: return "freq";
  }
  return "unknown";
}

Method method_from_string(const std::string& s) {
  if (s == "plain") return Method::kPlain;
  if (s == "bayes") return Method::kBayes;
  if (s == "freq") return Method::kFreq;
  throw ValidationError("unknown method '" + s + "' (expected plain, bayes or freq)");
}

std::string display_name(Method m) {
  switch (m) {
    case Method::kPlain: return "Plain";
    case Method::kBayes: return "Bayesian";
    case Method::kFreq: return "Frequentist";
  }
  return "Unknown";
}

ComplexMatrix reconstruct(const DualSet& duals, const ProbabilityVector& weights) {
  if (weights.size() != duals.n_outcomes) {
    throw DimensionError("got " + std::to_string(weights.size()) + " frequencies for " +
                         std::to_string(duals.n_outcomes) + " duals");
  }
  const auto d = static_cast<Eigen::Index>(duals.dim);
  ComplexMatrix out = ComplexMatrix::Zero(d, d);
  for (std::size_t i = 0; i < duals.n_outcomes; ++i) out += weights[i] * duals.operators[i];
  return out;
}

ComplexMatrix reconstruct(const DualSet& duals, const FrequencyVector& freqs) {
  return reconstruct(duals, freqs.freqs());
}

// ---------------------------------------------------------------------------

Estimator::Estimator(Povm povm)
    : povm_(std::move(povm)), frame_(build_frame_map(povm_)), canonical_(canonical_duals(frame_)) {}

EstimateRecord Estimator::plain(const ProbabilityVector& freqs, const DensityMatrix& prior) const {
  check_shape(povm_, freqs);
  const WeightedDuals duals = optimal_duals(canonical_, born_probabilities(prior, povm_));
  EstimateRecord r;
  r.method = Method::kPlain;
  r.estimate = reconstruct(duals.duals, freqs);
  r.iterations_used = 1;
  finish(r);
  return r;
}

EstimateRecord Estimator::bayesian(const ProbabilityVector& freqs, const DensityMatrix& prior,
                                   const IterationSchedule& schedule) const {
  check_shape(povm_, freqs);
  if (prior.dim() != povm_.dim()) throw DimensionError("prior dimension does not match POVM");
  schedule.validate();

  EstimateRecord r;
  r.method = Method::kBayes;
  const std::size_t n = povm_.size();
  ComplexMatrix current = prior.matrix();
  for (int k = 1; k <= schedule.max_iterations; ++k) {
    RealVector raw = raw_born_values(current, povm_);
    std::size_t clamped = 0;
    for (Eigen::Index i = 0; i < raw.size(); ++i) {
      if (raw(i) < 0.0) {
        raw(i) = schedule.probability_floor;
        ++clamped;
      }
    }
    r.clamp_events += static_cast<int>(clamped);
    std::vector<double> pi(n);
    const double sum = raw.sum();
    if (clamped == n || !(sum > 0.0)) {
      std::fill(pi.begin(), pi.end(), 1.0 / static_cast<double>(n));
      ++r.uniform_fallbacks;
    } else {
      for (std::size_t i = 0; i < n; ++i) pi[i] = raw(static_cast<Eigen::Index>(i)) / sum;
    }

    const WeightedDuals duals = optimal_duals(canonical_, ProbabilityVector(std::move(pi)));
    ComplexMatrix next = reconstruct(duals.duals, freqs);
    // A clamped weight vector is no longer a Born vector, so the duals lose
    // unit trace; restore it on the iterate.
    if (clamped > 0) {
      const double tr = next.trace().real();
      if (std::abs(tr) > 1e-6) {
        next /= tr;
        r.renormalized = true;
      }
    }
    const double step = hs_distance(next, current);
    r.steps.push_back(step);
    r.iterations_used = k;
    current = std::move(next);
    if (step <= schedule.tolerance && !r.converged_at) r.converged_at = k;
    if (schedule.tolerance > 0.0 && step <= schedule.tolerance) break;
  }
  r.estimate = std::move(current);
  finish(r);
  return r;
}

EstimateRecord Estimator::frequentist(const ProbabilityVector& freqs, bool renormalize) const {
  check_shape(povm_, freqs);
  const WeightedDuals duals = frequentist_duals(canonical_, freqs);
  EstimateRecord r;
  r.method = Method::kFreq;
  r.estimate = reconstruct(duals.duals, freqs);
  r.iterations_used = 1;
  const double tr = r.estimate.trace().real();
  if (renormalize && std::abs(tr) > 1e-6) {
    r.estimate /= tr;
    r.renormalized = true;
  }
  finish(r);
  return r;
}

// ---------------------------------------------------------------------------

EstimateRecord estimate_plain(const Povm& povm, const FrequencyVector& freqs,
                              const std::optional<DensityMatrix>& prior_state) {
  return Estimator(povm).plain(freqs, prior_or_mixed(povm, prior_state));
}

EstimateRecord estimate_bayesian(const Povm& povm, const FrequencyVector& freqs,
                                 const std::optional<DensityMatrix>& prior_state,
                                 const IterationSchedule& schedule) {
  return Estimator(povm).bayesian(freqs, prior_or_mixed(povm, prior_state), schedule);
}

EstimateRecord estimate_frequentist(const Povm& povm, const FrequencyVector& freqs,
                                    bool renormalize) {
  return Estimator(povm).frequentist(freqs, renormalize);
}

}  // namespace qtomo
