#include "qtomo/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <random>
#include <thread>

namespace qtomo {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

double uniform01(std::mt19937_64& eng) { return static_cast<double>(eng() >> 11) * 0x1.0p-53; }

}  // namespace

std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t index) {
  return splitmix64(splitmix64(master_seed) ^ splitmix64(~index));
}

std::vector<std::uint64_t> sample_counts(const ProbabilityVector& probs, std::uint64_t n_shots,
                                         std::uint64_t seed) {
  const std::size_t n = probs.size();
  std::vector<double> cdf(n);
  std::partial_sum(probs.values().begin(), probs.values().end(), cdf.begin());
  std::size_t last_nonzero = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (probs[i] > 0.0) last_nonzero = i;
  }

  std::vector<std::uint64_t> counts(n, 0);
  std::mt19937_64 eng(seed);
  for (std::uint64_t shot = 0; shot < n_shots; ++shot) {
    const double u = uniform01(eng);
    auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    std::size_t k = it == cdf.end() ? last_nonzero : static_cast<std::size_t>(it - cdf.begin());
    ++counts[k];
  }
  return counts;
}

// ---------------------------------------------------------------------------
// Histogram

double Histogram::bin_lo(std::size_t k) const { return start + static_cast<double>(k) * bin_width; }
double Histogram::bin_hi(std::size_t k) const { return start + static_cast<double>(k + 1) * bin_width; }

std::uint64_t Histogram::total() const {
  return std::accumulate(counts.begin(), counts.end(), std::uint64_t{0}) + underflow + overflow;
}

Histogram build_histogram(const std::vector<double>& values, double bin_width, double start,
                          std::optional<std::size_t> n_bins) {
  if (!(bin_width > 0.0)) throw ValidationError("bin width must be positive");
  if (n_bins && *n_bins == 0) throw ValidationError("number of bins must be positive");
  Histogram h;
  h.start = start;
  h.bin_width = bin_width;
  h.has_overflow_bin = n_bins.has_value();
  if (values.empty()) return h;

  // Bin index consistent with the printed edges start + k w.
  auto index_of = [&](double v) -> std::int64_t {
    auto k = static_cast<std::int64_t>(std::floor((v - start) / bin_width));
    while (h.bin_lo(static_cast<std::size_t>(k + 1)) <= v) ++k;
    while (k > 0 && h.bin_lo(static_cast<std::size_t>(k)) > v) --k;
    return k;
  };

  std::size_t regular = 0;
  if (n_bins) {
    regular = *n_bins;
  } else {
    for (double v : values) {
      if (v >= start) regular = std::max(regular, static_cast<std::size_t>(index_of(v)) + 1);
    }
  }
  h.counts.assign(regular, 0);
  for (double v : values) {
    if (!std::isfinite(v)) throw ValidationError("histogram input must be finite");
    if (v < start) {
      ++h.underflow;
      continue;
    }
    const auto k = static_cast<std::size_t>(index_of(v));
    if (k < regular) {
      ++h.counts[k];
    } else {
      ++h.overflow;
    }
  }
  return h;
}

// ---------------------------------------------------------------------------
// Campaign

void CampaignConfig::validate() const {
  if (n_experiments < 1) throw ValidationError("n_experiments must be at least 1");
  if (n_shots < 1) throw ValidationError("n_shots must be at least 1");
  if (methods.empty()) throw ValidationError("methods must name at least one estimator");
  if (true_state.dim() != povm.dim()) {
    throw DimensionError("true_state dimension does not match POVM dimension");
  }
  if (prior && prior->dim() != povm.dim()) {
    throw DimensionError("prior dimension does not match POVM dimension");
  }
  if (!(bin_width > 0.0)) throw ValidationError("bin_width must be positive");
  schedule.validate();
}

const MethodSummary* CampaignSummary::find(Method m) const {
  for (const auto& s : methods) {
    if (s.method == m) return &s;
  }
  return nullptr;
}

ExperimentRecord run_experiment(const CampaignConfig& config, const Estimator& estimator,
                                std::uint64_t index) {
  ExperimentRecord rec;
  rec.index = index;
  rec.seed = derive_seed(config.master_seed, index);
  const ProbabilityVector probs = born_probabilities(config.true_state, config.povm);
  rec.counts = sample_counts(probs, config.n_shots, rec.seed);
  const FrequencyVector freqs(rec.counts);
  const DensityMatrix prior =
      config.prior.value_or(DensityMatrix::maximally_mixed(config.povm.dim()));

  for (Method m : config.methods) {
    EstimateRecord est;
    switch (m) {
      case Method::kPlain: est = estimator.plain(freqs, prior); break;
      case Method::kBayes: est = estimator.bayesian(freqs, prior, config.schedule); break;
      case Method::kFreq: est = estimator.frequentist(freqs); break;
    }
    rec.outcomes.push_back(
        {m, hs_distance(est.estimate, config.true_state.matrix()), est.trace, est.physical});
  }
  return rec;
}

ExperimentRecord run_experiment(const CampaignConfig& config, std::uint64_t index) {
  return run_experiment(config, Estimator(config.povm), index);
}

CampaignSummary summarize(const CampaignConfig& config,
                          const std::vector<ExperimentRecord>& experiments) {
  CampaignSummary s;
  s.n_experiments = experiments.size();
  s.n_shots = config.n_shots;
  s.master_seed = config.master_seed;
  s.iterations = config.schedule.max_iterations;
  s.tolerance = config.schedule.tolerance;
  s.bin_width = config.bin_width;
  s.bin_start = config.bin_start;
  s.povm_path = config.povm_path;
  s.true_state_path = config.true_state_path;

  for (std::size_t j = 0; j < config.methods.size(); ++j) {
    std::vector<double> dist;
    dist.reserve(experiments.size());
    for (const auto& e : experiments) dist.push_back(e.outcomes[j].hs_distance);
    MethodSummary ms;
    ms.method = config.methods[j];
    if (!dist.empty()) {
      const double n = static_cast<double>(dist.size());
      ms.mean = std::accumulate(dist.begin(), dist.end(), 0.0) / n;
      double ss = 0.0;
      for (double v : dist) ss += (v - ms.mean) * (v - ms.mean);
      ms.stddev = std::sqrt(ss / n);
    }
    ms.histogram = build_histogram(dist, config.bin_width, config.bin_start, config.n_bins);
    s.methods.push_back(std::move(ms));
  }

  if (const MethodSummary* plain = s.find(Method::kPlain)) {
    const double pm = plain->mean;
    const double ps = plain->stddev;
    for (auto& ms : s.methods) {
      if (ms.method == Method::kPlain) continue;
      if (pm > 0.0) ms.delta_mean_pct = 100.0 * (ms.mean - pm) / pm;
      if (ps > 0.0) ms.delta_sigma_pct = 100.0 * (ms.stddev - ps) / ps;
    }
  }
  return s;
}

CampaignResult run_campaign(const CampaignConfig& config) {
  config.validate();
  const Estimator estimator(config.povm);
  CampaignResult result;
  result.experiments.resize(config.n_experiments);

  unsigned workers = config.threads == 0 ? std::thread::hardware_concurrency() : config.threads;
  workers = std::max(1u, static_cast<unsigned>(
                             std::min<std::uint64_t>(workers, config.n_experiments)));

  std::atomic<std::uint64_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto work = [&] {
    while (!failed.load()) {
      const std::uint64_t i = next.fetch_add(1);
      if (i >= config.n_experiments) return;
      try {
        result.experiments[i] = run_experiment(config, estimator, i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        failed = true;
      }
    }
  };

  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < workers; ++t) pool.emplace_back(work);
  }
  if (error) std::rethrow_exception(error);

  result.summary = summarize(config, result.experiments);
  return result;
}

}  // namespace qtomo
