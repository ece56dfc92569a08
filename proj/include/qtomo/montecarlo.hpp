#pragma once

// Repeated simulated experiments: sample POVM outcomes from the true state,
// run each estimator on the same counts and aggregate Hilbert-Schmidt
// distances to the truth.

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qtomo/estimators.hpp"

namespace qtomo {

/// Seed of experiment `index`: two splitmix64 rounds over the master seed and
/// the index. Stable across platforms and thread counts.
std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t index);

/// n_shots independent inverse-CDF categorical draws from an mt19937_64
/// stream seeded with `seed`. Uniforms are built from the top 53 bits of each
/// engine output, so results are bit-reproducible everywhere.
std::vector<std::uint64_t> sample_counts(const ProbabilityVector& probs, std::uint64_t n_shots,
                                         std::uint64_t seed);

struct Histogram {
  double start = 0.0;
  double bin_width = 0.0;
  std::vector<std::uint64_t> counts;  // regular bins [start + k w, start + (k+1) w)
  std::uint64_t underflow = 0;        // values below start
  std::uint64_t overflow = 0;         // values past the last regular bin
  bool has_overflow_bin = false;

  double bin_lo(std::size_t k) const;
  double bin_hi(std::size_t k) const;
  std::uint64_t total() const;
  bool empty() const { return total() == 0 && counts.empty(); }
};

/// Fixed-width histogram. With `n_bins` unset the regular bins extend far
/// enough to hold every value; otherwise values beyond bin n_bins-1 land in
/// the overflow bin. Values on an edge go to the upper bin.
Histogram build_histogram(const std::vector<double>& values, double bin_width, double start = 0.0,
                          std::optional<std::size_t> n_bins = std::nullopt);

struct CampaignConfig {
  CampaignConfig(Povm p, DensityMatrix truth) : povm(std::move(p)), true_state(std::move(truth)) {}

  Povm povm;
  DensityMatrix true_state;
  std::optional<DensityMatrix> prior;  // defaults to I/d
  std::string povm_path;               // echo only
  std::string true_state_path;
  std::string prior_path;
  std::uint64_t n_experiments = 1000;
  std::uint64_t n_shots = 1000;
  std::vector<Method> methods{Method::kPlain, Method::kBayes, Method::kFreq};
  IterationSchedule schedule;
  std::uint64_t master_seed = 0;
  double bin_width = 0.005;
  double bin_start = 0.0;
  std::optional<std::size_t> n_bins;
  unsigned threads = 1;  // 0 = hardware concurrency

  void validate() const;
};

struct MethodOutcome {
  Method method;
  double hs_distance = 0.0;
  double trace = 1.0;
  bool physical = true;
};

struct ExperimentRecord {
  std::uint64_t index = 0;
  std::uint64_t seed = 0;
  std::vector<std::uint64_t> counts;
  std::vector<MethodOutcome> outcomes;  // in config.methods order
};

struct MethodSummary {
  Method method;
  double mean = 0.0;
  double stddev = 0.0;  // population standard deviation
  Histogram histogram;
  std::optional<double> delta_mean_pct;  // relative to plain; unset for plain itself
  std::optional<double> delta_sigma_pct;
};

struct CampaignSummary {
  std::uint64_t n_experiments = 0;
  std::uint64_t n_shots = 0;
  std::uint64_t master_seed = 0;
  int iterations = 0;
  double tolerance = 0.0;
  double bin_width = 0.0;
  double bin_start = 0.0;
  std::string povm_path;
  std::string true_state_path;
  std::vector<MethodSummary> methods;

  const MethodSummary* find(Method m) const;
};

/// Runs every configured method on one experiment's counts.
ExperimentRecord run_experiment(const CampaignConfig& config, const Estimator& estimator,
                                std::uint64_t index);
ExperimentRecord run_experiment(const CampaignConfig& config, std::uint64_t index);

struct CampaignResult {
  CampaignSummary summary;
  std::vector<ExperimentRecord> experiments;  // ordered by index
};

CampaignResult run_campaign(const CampaignConfig& config);

/// Mean, population sigma, histograms and relative improvements over plain.
CampaignSummary summarize(const CampaignConfig& config,
                          const std::vector<ExperimentRecord>& experiments);

}  // namespace qtomo
