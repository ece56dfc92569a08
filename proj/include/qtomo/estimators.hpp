#pragma once

// The three ways of turning outcome frequencies into a state estimate:
// a single reconstruction with prior-optimal duals (plain), the iterated
// prior update (Bayesian), and duals weighted by the frequencies themselves
// (frequentist).

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qtomo/frame.hpp"
#include "qtomo/operator_core.hpp"

namespace qtomo {

class FrequencyVector {
 public:
  /// Throws ValidationError for an empty vector or a zero total.
  explicit FrequencyVector(std::vector<std::uint64_t> counts);

  std::size_t size() const { return counts_.size(); }
  std::uint64_t total() const { return total_; }
  const std::vector<std::uint64_t>& counts() const { return counts_; }
  /// nu_i = n_i / n_tot
  const ProbabilityVector& freqs() const { return freqs_; }
  bool is_uniform() const;

 private:
  std::vector<std::uint64_t> counts_;
  std::uint64_t total_ = 0;
  ProbabilityVector freqs_;
};

struct IterationSchedule {
  int max_iterations = 10;
  // Stop once the HS step between successive iterates is <= tolerance.
  // Zero means fixed-count mode.
  double tolerance = 0.0;
  double probability_floor = 1e-12;

  void validate() const;
};

enum class Method { kPlain, kBayes, kFreq };

std::string to_string(Method m);
Method method_from_string(const std::string& s);
std::string display_name(Method m);

struct EstimateRecord {
  ComplexMatrix estimate;
  Method method = Method::kPlain;
  int iterations_used = 0;
  std::vector<double> steps;  // HS distance between successive iterates
  // First iteration (1-based) whose step was <= tolerance.
  std::optional<int> converged_at;
  int clamp_events = 0;       // prior probabilities clamped to the floor
  int uniform_fallbacks = 0;  // iterations that fell back to a uniform prior
  double trace = 1.0;
  bool physical = true;
  bool renormalized = false;
};

/// sum_i nu_i D_i
ComplexMatrix reconstruct(const DualSet& duals, const FrequencyVector& freqs);
ComplexMatrix reconstruct(const DualSet& duals, const ProbabilityVector& weights);

/// One reconstruction with duals optimal for `prior_state`.
EstimateRecord estimate_plain(const Povm& povm, const FrequencyVector& freqs,
                              const std::optional<DensityMatrix>& prior_state = std::nullopt);

EstimateRecord estimate_bayesian(const Povm& povm, const FrequencyVector& freqs,
                                 const std::optional<DensityMatrix>& prior_state = std::nullopt,
                                 const IterationSchedule& schedule = {});

EstimateRecord estimate_frequentist(const Povm& povm, const FrequencyVector& freqs,
                                    bool renormalize = false);

/// Precomputed frame and Moore-Penrose duals for repeated estimation with one POVM.
class Estimator {
 public:
  explicit Estimator(Povm povm);

  const Povm& povm() const { return povm_; }
  const FrameMap& frame() const { return frame_; }
  const CanonicalDuals& canonical() const { return canonical_; }

  // The ProbabilityVector overloads accept arbitrary (e.g. exact) frequencies.
  EstimateRecord plain(const ProbabilityVector& freqs, const DensityMatrix& prior) const;
  EstimateRecord bayesian(const ProbabilityVector& freqs, const DensityMatrix& prior,
                          const IterationSchedule& schedule) const;
  EstimateRecord frequentist(const ProbabilityVector& freqs, bool renormalize = false) const;

  EstimateRecord plain(const FrequencyVector& freqs, const DensityMatrix& prior) const {
    return plain(freqs.freqs(), prior);
  }
  EstimateRecord bayesian(const FrequencyVector& freqs, const DensityMatrix& prior,
                          const IterationSchedule& schedule) const {
    return bayesian(freqs.freqs(), prior, schedule);
  }
  EstimateRecord frequentist(const FrequencyVector& freqs, bool renormalize = false) const {
    return frequentist(freqs.freqs(), renormalize);
  }

 private:
  Povm povm_;
  FrameMap frame_;
  CanonicalDuals canonical_;
};

}  // namespace qtomo
