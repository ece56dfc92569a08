#include <catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "qtomo/cli.hpp"
#include "qtomo/io.hpp"

using namespace qtomo;
namespace fs = std::filesystem;

namespace {

const fs::path kData = fs::path(QTOMO_DATA_DIR) / "reference";

struct Run {
  int status;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "qtomo");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int status = cli::parse_and_dispatch(static_cast<int>(argv.size()), argv.data(), out, err);
  return {status, out.str(), err.str()};
}

fs::path scratch_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("qtomo_cli_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

}  // namespace

TEST_CASE("estimate with uniform counts gives I/2") {
  const Run r = run({"estimate", "--method", "plain", "--povm", (kData / "povm.json").string(),
                     "--counts", (kData / "uniform_counts.json").string()});
  REQUIRE(r.status == 0);
  const EstimateRecord rec = io::estimate_from_json(io::Json::parse(r.out), "stdout");
  CHECK((rec.estimate - 0.5 * pauli::identity()).cwiseAbs().maxCoeff() < 1e-15);
  CHECK(rec.physical);
}

TEST_CASE("estimate methods recover the reference state from exact counts") {
  for (const char* method : {"plain", "bayes", "freq"}) {
    const Run r = run({"estimate", "--method", method, "--povm", (kData / "povm.json").string(),
                       "--counts", (kData / "exact_counts.json").string(), "--iterations", "3"});
    REQUIRE(r.status == 0);
    const EstimateRecord rec = io::estimate_from_json(io::Json::parse(r.out), "stdout");
    CHECK(hs_distance(rec.estimate, reference_qubit_state().matrix()) < 1e-10);
    if (std::string(method) == "bayes") CHECK(rec.iterations_used == 3);
  }
}

TEST_CASE("duals command") {
  const fs::path dir = scratch_dir("duals");
  const Run r = run({"duals", "--povm", (kData / "povm.json").string(), "-o",
                     (dir / "duals.json").string()});
  REQUIRE(r.status == 0);
  const DualSet d = io::duals_from_json(io::read_json_file(dir / "duals.json"), "duals");
  CHECK(d.provenance == DualKind::kCanonical);
  CHECK((d.operators[0] - (0.5 * pauli::identity() + 1.5 * pauli::x())).cwiseAbs().maxCoeff() <
        1e-12);

  const Run opt = run({"duals", "--povm", (kData / "povm.json").string(), "--prior",
                       (kData / "state.json").string()});
  REQUIRE(opt.status == 0);
  CHECK(io::duals_from_json(io::Json::parse(opt.out), "o").provenance == DualKind::kOptimal);

  const Run freq = run({"duals", "--povm", (kData / "povm.json").string(), "--counts",
                        (kData / "exact_counts.json").string()});
  REQUIRE(freq.status == 0);
  CHECK(io::duals_from_json(io::Json::parse(freq.out), "f").provenance == DualKind::kFrequentist);

  CHECK(run({"duals", "--povm", (kData / "povm.json").string(), "--prior",
             (kData / "state.json").string(), "--counts", (kData / "exact_counts.json").string()})
            .status == cli::kExitValidation);
}

TEST_CASE("simulate then report") {
  const fs::path dir = scratch_dir("sim");
  const Run sim = run({"simulate", "--config", (kData / "config.json").string(), "--seed", "42",
                       "--experiments", "60", "--shots", "400", "-o", (dir / "out").string()});
  REQUIRE(sim.status == 0);
  for (const char* f : {"summary.json", "experiments.csv", "histogram_plain.csv",
                        "histogram_bayes.csv", "histogram_freq.csv"}) {
    CHECK(fs::exists(dir / "out" / f));
  }
  CHECK(slurp(dir / "out" / "histogram_plain.csv").rfind("bin_lo,bin_hi,count\n", 0) == 0);

  const Run rep = run({"report", "--results", (dir / "out").string()});
  REQUIRE(rep.status == 0);
  CHECK(rep.out.find("Plain") != std::string::npos);
  CHECK(rep.out.find("Bayesian") != std::string::npos);
  CHECK(rep.out.find("Frequentist") != std::string::npos);
  CHECK(slurp(dir / "out" / "report.csv").rfind("procedure,mean_hs_distance,sigma", 0) == 0);

  // Byte-determinism across reruns and thread counts.
  const Run again = run({"simulate", "--config", (kData / "config.json").string(), "--seed", "42",
                         "--experiments", "60", "--shots", "400", "--threads", "3", "-o",
                         (dir / "again").string()});
  REQUIRE(again.status == 0);
  for (const char* f : {"summary.json", "experiments.csv", "histogram_freq.csv"}) {
    CHECK(slurp(dir / "out" / f) == slurp(dir / "again" / f));
  }
}

TEST_CASE("exit codes") {
  SECTION("unknown flag is a validation error") {
    const Run r = run({"estimate", "--povm", "p.json", "--counts", "c.json", "--bogus"});
    CHECK(r.status == cli::kExitValidation);
    CHECK_FALSE(r.err.empty());
  }
  SECTION("missing subcommand") { CHECK(run({}).status == cli::kExitValidation); }
  SECTION("unknown method") {
    CHECK(run({"estimate", "--method", "mle", "--povm", (kData / "povm.json").string(), "--counts",
               (kData / "uniform_counts.json").string()})
              .status == cli::kExitValidation);
  }
  SECTION("missing file is an I/O error") {
    const Run r = run({"estimate", "--povm", "/nonexistent/p.json", "--counts",
                       (kData / "uniform_counts.json").string()});
    CHECK(r.status == cli::kExitIo);
    CHECK(r.err.find("/nonexistent/p.json") != std::string::npos);
  }
  SECTION("schema violation names the field") {
    const fs::path dir = scratch_dir("schema");
    std::ofstream(dir / "counts.json") << R"({"counts": [1, 2, 3]})";
    const Run r = run({"estimate", "--povm", (kData / "povm.json").string(), "--counts",
                       (dir / "counts.json").string()});
    CHECK(r.status == cli::kExitValidation);
    CHECK(r.err.find("outcomes") != std::string::npos);
  }
  SECTION("report without baseline") {
    const fs::path dir = scratch_dir("nobase");
    const Run sim = run({"simulate", "--config", (kData / "config.json").string(), "--experiments",
                         "2", "--shots", "10", "-o", dir.string()});
    REQUIRE(sim.status == 0);
    io::Json j = io::read_json_file(dir / "summary.json");
    j["methods"].erase(0);
    io::write_text_file(dir / "summary.json", io::dump(j));
    const Run r = run({"report", "--results", dir.string()});
    CHECK(r.status == cli::kExitValidation);
    CHECK(r.err.find("baseline") != std::string::npos);
  }
  SECTION("help") { CHECK(run({"--help"}).status == cli::kExitOk); }
}
