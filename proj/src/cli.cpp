#include "qtomo/cli.hpp"

#include <CLI11.hpp>
#include <filesystem>
#include <optional>
#include <ostream>

#include "qtomo/io.hpp"
#include "qtomo/report.hpp"

namespace qtomo::cli {

namespace fs = std::filesystem;

namespace {

struct DualsArgs {
  std::string povm;
  std::string prior;
  std::string counts;
  std::string out;
};

struct EstimateArgs {
  std::string povm;
  std::string counts;
  std::string method = "plain";
  int iterations = 10;
  double tol = 0.0;
  std::string prior;
  bool renormalize = false;
  std::string out;
};

struct SimulateArgs {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> experiments;
  std::optional<std::uint64_t> shots;
  std::optional<int> iterations;
  std::optional<double> tol;
  std::optional<double> bin_width;
  std::optional<std::size_t> bins;
  std::optional<unsigned> threads;
  std::string out;
};

struct ReportArgs {
  std::string results;
  std::string csv;
};

void emit(const std::string& text, const std::string& path, std::ostream& out) {
  if (path.empty()) {
    out << text;
  } else {
    io::write_text_file(path, text);
  }
}

void run_duals(const DualsArgs& a, std::ostream& out) {
  const Povm povm = io::load_povm(a.povm);
  const FrameMap frame = build_frame_map(povm);
  const CanonicalDuals canonical = canonical_duals(frame);
  DualSet duals = canonical.duals;
  if (!a.prior.empty()) {
    duals = optimal_duals(canonical, born_probabilities(io::load_state(a.prior), povm)).duals;
  } else if (!a.counts.empty()) {
    const FrequencyVector freqs(io::counts_from_json(io::read_json_file(a.counts), a.counts));
    if (freqs.size() != povm.size()) {
      throw DimensionError(a.counts + ": counts has " + std::to_string(freqs.size()) +
                           " entries, POVM has " + std::to_string(povm.size()) + " outcomes");
    }
    duals = frequentist_duals(canonical, freqs.freqs()).duals;
  }
  emit(io::dump(io::duals_to_json(duals)), a.out, out);
}

void run_estimate(const EstimateArgs& a, std::ostream& out) {
  const Povm povm = io::load_povm(a.povm);
  const FrequencyVector freqs(io::counts_from_json(io::read_json_file(a.counts), a.counts));
  std::optional<DensityMatrix> prior;
  if (!a.prior.empty()) prior = io::load_state(a.prior);
  IterationSchedule schedule;
  schedule.max_iterations = a.iterations;
  schedule.tolerance = a.tol;

  EstimateRecord rec;
  switch (method_from_string(a.method)) {
    case Method::kPlain: rec = estimate_plain(povm, freqs, prior); break;
    case Method::kBayes: rec = estimate_bayesian(povm, freqs, prior, schedule); break;
    case Method::kFreq: rec = estimate_frequentist(povm, freqs, a.renormalize); break;
  }
  emit(io::dump(io::estimate_to_json(rec)), a.out, out);
}

void run_simulate(const SimulateArgs& a, std::ostream& out) {
  CampaignConfig config = io::load_campaign_config(a.config);
  if (a.seed) config.master_seed = *a.seed;
  if (a.experiments) config.n_experiments = *a.experiments;
  if (a.shots) config.n_shots = *a.shots;
  if (a.iterations) config.schedule.max_iterations = *a.iterations;
  if (a.tol) config.schedule.tolerance = *a.tol;
  if (a.bin_width) config.bin_width = *a.bin_width;
  if (a.bins) config.n_bins = *a.bins;
  if (a.threads) config.threads = *a.threads;

  const CampaignResult result = run_campaign(config);
  io::write_campaign_outputs(a.out, config, result);
  out << emit_report(result.summary).to_text();
}

void run_report(const ReportArgs& a, std::ostream& out) {
  const fs::path dir(a.results);
  const fs::path summary_path = dir / "summary.json";
  const CampaignSummary summary =
      io::summary_from_json(io::read_json_file(summary_path), summary_path.string());
  const ReportTable table = emit_report(summary);
  out << table.to_text();
  io::write_text_file(a.csv.empty() ? dir / "report.csv" : fs::path(a.csv), table.to_csv());
}

}  // namespace

int parse_and_dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Quantum state reconstruction from informationally complete POVM statistics"};
  app.name("qtomo");
  app.require_subcommand(1);

  DualsArgs duals_args;
  auto* duals = app.add_subcommand("duals", "Write the dual operator set of a POVM as JSON");
  duals->add_option("--povm", duals_args.povm, "POVM JSON file")->required();
  auto* dprior = duals->add_option("--prior", duals_args.prior,
                                   "Prior state JSON; emits duals optimal for its probabilities");
  auto* dcounts = duals->add_option("--counts", duals_args.counts,
                                    "Counts JSON; emits frequency-weighted duals");
  dprior->excludes(dcounts);
  duals->add_option("-o,--out", duals_args.out, "Output file (default: stdout)");

  EstimateArgs est_args;
  auto* estimate = app.add_subcommand("estimate", "Estimate a state from outcome counts");
  estimate->add_option("--povm", est_args.povm, "POVM JSON file")->required();
  estimate->add_option("--counts", est_args.counts, "Counts JSON file")->required();
  estimate->add_option("--method", est_args.method, "plain, bayes or freq")
      ->check(CLI::IsMember({"plain", "bayes", "freq"}));
  estimate->add_option("--iterations", est_args.iterations, "Maximum Bayesian iterations")
      ->check(CLI::PositiveNumber);
  estimate->add_option("--tol", est_args.tol, "Bayesian stopping tolerance (HS distance)")
      ->check(CLI::NonNegativeNumber);
  estimate->add_option("--prior", est_args.prior, "Prior state JSON (default: I/d)");
  estimate->add_flag("--renormalize", est_args.renormalize,
                     "Divide frequentist estimates by their trace");
  estimate->add_option("-o,--out", est_args.out, "Output file (default: stdout)");

  SimulateArgs sim_args;
  auto* simulate = app.add_subcommand("simulate", "Run a Monte Carlo campaign");
  simulate->add_option("--config", sim_args.config, "Campaign config JSON")->required();
  simulate->add_option("--seed", sim_args.seed, "Master seed");
  simulate->add_option("--experiments", sim_args.experiments, "Number of experiments");
  simulate->add_option("--shots", sim_args.shots, "Shots per experiment");
  simulate->add_option("--iterations", sim_args.iterations, "Bayesian iterations");
  simulate->add_option("--tol", sim_args.tol, "Bayesian stopping tolerance");
  simulate->add_option("--bin-width", sim_args.bin_width, "Histogram bin width");
  simulate->add_option("--bins", sim_args.bins, "Number of regular histogram bins");
  simulate->add_option("--threads", sim_args.threads, "Worker threads (0 = all cores)");
  simulate->add_option("-o,--out", sim_args.out, "Output directory")->required();

  ReportArgs report_args;
  auto* report = app.add_subcommand("report", "Print the comparison table of a campaign");
  report->add_option("--results", report_args.results, "Campaign output directory")->required();
  report->add_option("-o,--out", report_args.csv, "CSV output (default: <results>/report.csv)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "qtomo: " << e.what() << "\n";
    return kExitValidation;
  }

  try {
    if (*duals) run_duals(duals_args, out);
    if (*estimate) run_estimate(est_args, out);
    if (*simulate) run_simulate(sim_args, out);
    if (*report) run_report(report_args, out);
  } catch (const IoError& e) {
    err << "qtomo: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    err << "qtomo: " << e.what() << "\n";
    return kExitValidation;
  }
  return kExitOk;
}

}  // namespace qtomo::cli
