#include "qtomo/io.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <sstream>

namespace qtomo::io {

namespace fs = std::filesystem;

std::string format_double(double v) {
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

Json read_json_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError("'" + path.string() + "' is not valid JSON: " + e.what());
  }
}

void write_text_file(const fs::path& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << contents;
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

// ---------------------------------------------------------------------------
// Field access helpers

namespace {

[[noreturn]] void schema_error(const std::string& where, const std::string& what) {
  throw ValidationError(where + ": " + what);
}

const Json& field(const Json& j, const char* key, const std::string& where) {
  if (!j.is_object()) schema_error(where, "expected a JSON object");
  auto it = j.find(key);
  if (it == j.end()) schema_error(where, std::string("missing field '") + key + "'");
  return *it;
}

std::string sub(const std::string& where, const std::string& key) { return where + "." + key; }

double get_double(const Json& j, const std::string& where) {
  if (!j.is_number()) schema_error(where, "expected a number");
  return j.get<double>();
}

std::uint64_t get_uint(const Json& j, const std::string& where) {
  if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<std::int64_t>() >= 0)) {
    schema_error(where, "expected a nonnegative integer");
  }
  return j.get<std::uint64_t>();
}

std::string get_string(const Json& j, const std::string& where) {
  if (!j.is_string()) schema_error(where, "expected a string");
  return j.get<std::string>();
}

bool get_bool(const Json& j, const std::string& where) {
  if (!j.is_boolean()) schema_error(where, "expected true or false");
  return j.get<bool>();
}

const Json& get_array(const Json& j, const std::string& where) {
  if (!j.is_array()) schema_error(where, "expected an array");
  return j;
}

Json optional_number(const std::optional<double>& v) {
  return v ? Json(*v) : Json(nullptr);
}

std::optional<double> optional_number_from(const Json& j, const char* key, const std::string& where) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  return get_double(*it, sub(where, key));
}

Json real_vector_json(const RealVector& v) {
  Json arr = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v(i));
  return arr;
}

RealVector real_vector_from(const Json& j, const std::string& where) {
  get_array(j, where);
  RealVector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    v(static_cast<Eigen::Index>(i)) = get_double(j[i], where + "[" + std::to_string(i) + "]");
  }
  return v;
}

}  // namespace

// ---------------------------------------------------------------------------
// Matrices, states, POVMs

Json to_json(const ComplexMatrix& m) {
  Json data = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) data.push_back({m(r, c).real(), m(r, c).imag()});
  }
  Json j;
  j["rows"] = m.rows();
  j["cols"] = m.cols();
  j["data"] = std::move(data);
  return j;
}

ComplexMatrix matrix_from_json(const Json& j, const std::string& where) {
  const std::uint64_t rows = get_uint(field(j, "rows", where), sub(where, "rows"));
  const std::uint64_t cols = get_uint(field(j, "cols", where), sub(where, "cols"));
  const Json& data = get_array(field(j, "data", where), sub(where, "data"));
  if (data.size() != rows * cols) {
    schema_error(sub(where, "data"), "has " + std::to_string(data.size()) + " entries, expected " +
                                         std::to_string(rows * cols) + " (rows*cols)");
  }
  ComplexMatrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t k = 0; k < data.size(); ++k) {
    const std::string at = sub(where, "data") + "[" + std::to_string(k) + "]";
    if (!data[k].is_array() || data[k].size() != 2) schema_error(at, "expected [re, im]");
    m(static_cast<Eigen::Index>(k / cols), static_cast<Eigen::Index>(k % cols)) =
        Complex(get_double(data[k][0], at), get_double(data[k][1], at));
  }
  return m;
}

Json state_to_json(const DensityMatrix& state) {
  Json j;
  j["dim"] = state.dim();
  const Json m = to_json(state.matrix());
  for (auto it = m.begin(); it != m.end(); ++it) j[it.key()] = it.value();
  return j;
}

DensityMatrix state_from_json(const Json& j, const std::string& where) {
  const std::uint64_t dim = get_uint(field(j, "dim", where), sub(where, "dim"));
  ComplexMatrix m = matrix_from_json(j, where);
  if (static_cast<std::uint64_t>(m.rows()) != dim || static_cast<std::uint64_t>(m.cols()) != dim) {
    schema_error(sub(where, "dim"), "state matrix is " + std::to_string(m.rows()) + "x" +
                                        std::to_string(m.cols()) + " but dim is " +
                                        std::to_string(dim));
  }
  try {
    return DensityMatrix(std::move(m));
  } catch (const ValidationError& e) {
    schema_error(where, e.what());
  }
}

Json povm_to_json(const Povm& povm) {
  Json j;
  j["dim"] = povm.dim();
  Json elems = Json::array();
  for (const auto& e : povm.elements()) elems.push_back(to_json(e));
  j["elements"] = std::move(elems);
  return j;
}

Povm povm_from_json(const Json& j, const std::string& where) {
  const std::uint64_t dim = get_uint(field(j, "dim", where), sub(where, "dim"));
  const Json& arr = get_array(field(j, "elements", where), sub(where, "elements"));
  std::vector<ComplexMatrix> elements;
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const std::string at = sub(where, "elements") + "[" + std::to_string(i) + "]";
    ComplexMatrix m = matrix_from_json(arr[i], at);
    if (static_cast<std::uint64_t>(m.rows()) != dim || static_cast<std::uint64_t>(m.cols()) != dim) {
      schema_error(at, "element is " + std::to_string(m.rows()) + "x" + std::to_string(m.cols()) +
                           " but dim is " + std::to_string(dim));
    }
    elements.push_back(std::move(m));
  }
  try {
    return validate_povm(std::move(elements));
  } catch (const ValidationError& e) {
    schema_error(where, e.what());
  }
}

Json duals_to_json(const DualSet& duals) {
  Json j;
  j["dim"] = duals.dim;
  j["n"] = duals.n_outcomes;
  j["provenance"] = to_string(duals.provenance);
  if (duals.weight) j["weights"] = real_vector_json(*duals.weight);
  Json ops = Json::array();
  for (const auto& d : duals.operators) ops.push_back(to_json(d));
  j["operators"] = std::move(ops);
  return j;
}

DualSet duals_from_json(const Json& j, const std::string& where) {
  DualSet out;
  out.dim = get_uint(field(j, "dim", where), sub(where, "dim"));
  out.n_outcomes = get_uint(field(j, "n", where), sub(where, "n"));
  try {
    out.provenance = dual_kind_from_string(get_string(field(j, "provenance", where),
                                                      sub(where, "provenance")));
  } catch (const ValidationError& e) {
    schema_error(sub(where, "provenance"), e.what());
  }
  if (auto it = j.find("weights"); it != j.end()) out.weight = real_vector_from(*it, sub(where, "weights"));
  const Json& ops = get_array(field(j, "operators", where), sub(where, "operators"));
  if (ops.size() != out.n_outcomes) {
    schema_error(sub(where, "operators"), "has " + std::to_string(ops.size()) +
                                              " entries but n is " + std::to_string(out.n_outcomes));
  }
  for (std::size_t i = 0; i < ops.size(); ++i) {
    const std::string at = sub(where, "operators") + "[" + std::to_string(i) + "]";
    ComplexMatrix m = matrix_from_json(ops[i], at);
    if (static_cast<std::size_t>(m.rows()) != out.dim || static_cast<std::size_t>(m.cols()) != out.dim) {
      schema_error(at, "operator shape does not match dim");
    }
    out.operators.push_back(std::move(m));
  }
  return out;
}

Json counts_to_json(const std::vector<std::uint64_t>& counts) {
  Json j;
  j["counts"] = counts;
  return j;
}

std::vector<std::uint64_t> counts_from_json(const Json& j, const std::string& where) {
  const Json& arr = get_array(field(j, "counts", where), sub(where, "counts"));
  std::vector<std::uint64_t> out;
  for (std::size_t i = 0; i < arr.size(); ++i) {
    out.push_back(get_uint(arr[i], sub(where, "counts") + "[" + std::to_string(i) + "]"));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Estimates and summaries

Json estimate_to_json(const EstimateRecord& r) {
  Json j;
  j["method"] = to_string(r.method);
  j["estimate"] = to_json(r.estimate);
  j["trace"] = r.trace;
  j["physical"] = r.physical;
  j["renormalized"] = r.renormalized;
  j["iterations_used"] = r.iterations_used;
  j["converged_at"] = r.converged_at ? Json(*r.converged_at) : Json(nullptr);
  j["steps"] = r.steps;
  j["clamp_events"] = r.clamp_events;
  j["uniform_fallbacks"] = r.uniform_fallbacks;
  return j;
}

EstimateRecord estimate_from_json(const Json& j, const std::string& where) {
  EstimateRecord r;
  try {
    r.method = method_from_string(get_string(field(j, "method", where), sub(where, "method")));
  } catch (const ValidationError& e) {
    schema_error(sub(where, "method"), e.what());
  }
  r.estimate = matrix_from_json(field(j, "estimate", where), sub(where, "estimate"));
  r.trace = get_double(field(j, "trace", where), sub(where, "trace"));
  r.physical = get_bool(field(j, "physical", where), sub(where, "physical"));
  r.renormalized = get_bool(field(j, "renormalized", where), sub(where, "renormalized"));
  r.iterations_used =
      static_cast<int>(get_uint(field(j, "iterations_used", where), sub(where, "iterations_used")));
  const Json& conv = field(j, "converged_at", where);
  if (!conv.is_null()) r.converged_at = static_cast<int>(get_uint(conv, sub(where, "converged_at")));
  const Json& steps = get_array(field(j, "steps", where), sub(where, "steps"));
  for (std::size_t i = 0; i < steps.size(); ++i) {
    r.steps.push_back(get_double(steps[i], sub(where, "steps") + "[" + std::to_string(i) + "]"));
  }
  r.clamp_events =
      static_cast<int>(get_uint(field(j, "clamp_events", where), sub(where, "clamp_events")));
  r.uniform_fallbacks = static_cast<int>(
      get_uint(field(j, "uniform_fallbacks", where), sub(where, "uniform_fallbacks")));
  return r;
}

Json histogram_to_json(const Histogram& h) {
  Json j;
  j["start"] = h.start;
  j["bin_width"] = h.bin_width;
  j["counts"] = h.counts;
  j["underflow"] = h.underflow;
  j["overflow"] = h.overflow;
  j["has_overflow_bin"] = h.has_overflow_bin;
  return j;
}

Histogram histogram_from_json(const Json& j, const std::string& where) {
  Histogram h;
  h.start = get_double(field(j, "start", where), sub(where, "start"));
  h.bin_width = get_double(field(j, "bin_width", where), sub(where, "bin_width"));
  const Json& counts = get_array(field(j, "counts", where), sub(where, "counts"));
  for (std::size_t i = 0; i < counts.size(); ++i) {
    h.counts.push_back(get_uint(counts[i], sub(where, "counts") + "[" + std::to_string(i) + "]"));
  }
  h.underflow = get_uint(field(j, "underflow", where), sub(where, "underflow"));
  h.overflow = get_uint(field(j, "overflow", where), sub(where, "overflow"));
  h.has_overflow_bin = get_bool(field(j, "has_overflow_bin", where), sub(where, "has_overflow_bin"));
  return h;
}

Json summary_to_json(const CampaignSummary& s) {
  Json config;
  config["povm"] = s.povm_path;
  config["true_state"] = s.true_state_path;
  config["n_experiments"] = s.n_experiments;
  config["n_shots"] = s.n_shots;
  config["master_seed"] = s.master_seed;
  config["iterations"] = s.iterations;
  config["tolerance"] = s.tolerance;
  config["bin_width"] = s.bin_width;
  config["bin_start"] = s.bin_start;

  Json methods = Json::array();
  for (const auto& m : s.methods) {
    Json jm;
    jm["method"] = to_string(m.method);
    jm["mean"] = m.mean;
    jm["sigma"] = m.stddev;
    jm["delta_mean_pct"] = optional_number(m.delta_mean_pct);
    jm["delta_sigma_pct"] = optional_number(m.delta_sigma_pct);
    jm["histogram"] = histogram_to_json(m.histogram);
    methods.push_back(std::move(jm));
  }
  Json j;
  j["config"] = std::move(config);
  j["methods"] = std::move(methods);
  return j;
}

CampaignSummary summary_from_json(const Json& j, const std::string& where) {
  CampaignSummary s;
  const std::string cw = sub(where, "config");
  const Json& config = field(j, "config", where);
  s.povm_path = get_string(field(config, "povm", cw), sub(cw, "povm"));
  s.true_state_path = get_string(field(config, "true_state", cw), sub(cw, "true_state"));
  s.n_experiments = get_uint(field(config, "n_experiments", cw), sub(cw, "n_experiments"));
  s.n_shots = get_uint(field(config, "n_shots", cw), sub(cw, "n_shots"));
  s.master_seed = get_uint(field(config, "master_seed", cw), sub(cw, "master_seed"));
  s.iterations = static_cast<int>(get_uint(field(config, "iterations", cw), sub(cw, "iterations")));
  s.tolerance = get_double(field(config, "tolerance", cw), sub(cw, "tolerance"));
  s.bin_width = get_double(field(config, "bin_width", cw), sub(cw, "bin_width"));
  s.bin_start = get_double(field(config, "bin_start", cw), sub(cw, "bin_start"));

  const Json& methods = get_array(field(j, "methods", where), sub(where, "methods"));
  for (std::size_t i = 0; i < methods.size(); ++i) {
    const std::string at = sub(where, "methods") + "[" + std::to_string(i) + "]";
    const Json& jm = methods[i];
    MethodSummary m;
    try {
      m.method = method_from_string(get_string(field(jm, "method", at), sub(at, "method")));
    } catch (const ValidationError& e) {
      schema_error(sub(at, "method"), e.what());
    }
    m.mean = get_double(field(jm, "mean", at), sub(at, "mean"));
    m.stddev = get_double(field(jm, "sigma", at), sub(at, "sigma"));
    m.delta_mean_pct = optional_number_from(jm, "delta_mean_pct", at);
    m.delta_sigma_pct = optional_number_from(jm, "delta_sigma_pct", at);
    m.histogram = histogram_from_json(field(jm, "histogram", at), sub(at, "histogram"));
    s.methods.push_back(std::move(m));
  }
  return s;
}

// ---------------------------------------------------------------------------
// Files

DensityMatrix load_state(const fs::path& path) {
  return state_from_json(read_json_file(path), path.string());
}

Povm load_povm(const fs::path& path) { return povm_from_json(read_json_file(path), path.string()); }

CampaignConfig load_campaign_config(const fs::path& path) {
  const Json j = read_json_file(path);
  const std::string where = path.string();
  const fs::path base = path.parent_path();
  auto resolve = [&](const std::string& rel) {
    const fs::path p(rel);
    return p.is_absolute() ? p : base / p;
  };

  const std::string povm_rel = get_string(field(j, "povm", where), sub(where, "povm"));
  const std::string state_rel = get_string(field(j, "true_state", where), sub(where, "true_state"));
  CampaignConfig c(load_povm(resolve(povm_rel)), load_state(resolve(state_rel)));
  c.povm_path = povm_rel;
  c.true_state_path = state_rel;
  if (auto it = j.find("prior"); it != j.end() && !it->is_null()) {
    c.prior_path = get_string(*it, sub(where, "prior"));
    c.prior = load_state(resolve(c.prior_path));
  }

  auto opt_uint = [&](const char* key, auto& target) {
    if (auto it = j.find(key); it != j.end()) {
      target = static_cast<std::remove_reference_t<decltype(target)>>(get_uint(*it, sub(where, key)));
    }
  };
  auto opt_double = [&](const char* key, double& target) {
    if (auto it = j.find(key); it != j.end()) target = get_double(*it, sub(where, key));
  };
  opt_uint("n_experiments", c.n_experiments);
  opt_uint("n_shots", c.n_shots);
  opt_uint("master_seed", c.master_seed);
  opt_uint("iterations", c.schedule.max_iterations);
  opt_uint("threads", c.threads);
  opt_double("tolerance", c.schedule.tolerance);
  opt_double("probability_floor", c.schedule.probability_floor);
  opt_double("bin_width", c.bin_width);
  opt_double("bin_start", c.bin_start);
  if (auto it = j.find("bins"); it != j.end() && !it->is_null()) {
    c.n_bins = static_cast<std::size_t>(get_uint(*it, sub(where, "bins")));
  }
  if (auto it = j.find("methods"); it != j.end()) {
    const Json& arr = get_array(*it, sub(where, "methods"));
    c.methods.clear();
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const std::string at = sub(where, "methods") + "[" + std::to_string(i) + "]";
      try {
        c.methods.push_back(method_from_string(get_string(arr[i], at)));
      } catch (const ValidationError& e) {
        schema_error(at, e.what());
      }
    }
  }
  try {
    c.validate();
  } catch (const ValidationError& e) {
    schema_error(where, e.what());
  }
  return c;
}

std::string experiments_csv(const std::vector<Method>& methods,
                            const std::vector<ExperimentRecord>& experiments) {
  std::ostringstream os;
  os << "index,seed";
  const std::size_t n_out = experiments.empty() ? 0 : experiments.front().counts.size();
  for (std::size_t i = 0; i < n_out; ++i) os << ",count_" << i;
  for (Method m : methods) os << ",hs_" << to_string(m);
  for (Method m : methods) os << ",trace_" << to_string(m);
  for (Method m : methods) os << ",physical_" << to_string(m);
  os << "\n";
  for (const auto& e : experiments) {
    os << e.index << "," << e.seed;
    for (auto c : e.counts) os << "," << c;
    for (const auto& o : e.outcomes) os << "," << format_double(o.hs_distance);
    for (const auto& o : e.outcomes) os << "," << format_double(o.trace);
    for (const auto& o : e.outcomes) os << "," << (o.physical ? 1 : 0);
    os << "\n";
  }
  return os.str();
}

std::string histogram_csv(const Histogram& h) {
  std::ostringstream os;
  os << "bin_lo,bin_hi,count\n";
  for (std::size_t k = 0; k < h.counts.size(); ++k) {
    os << format_double(h.bin_lo(k)) << "," << format_double(h.bin_hi(k)) << "," << h.counts[k]
       << "\n";
  }
  if (h.has_overflow_bin) {
    os << format_double(h.bin_lo(h.counts.size())) << ",inf," << h.overflow << "\n";
  }
  return os.str();
}

void write_campaign_outputs(const fs::path& dir, const CampaignConfig& config,
                            const CampaignResult& result) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory '" + dir.string() + "': " + ec.message());
  write_text_file(dir / "summary.json", dump(summary_to_json(result.summary)));
  write_text_file(dir / "experiments.csv", experiments_csv(config.methods, result.experiments));
  for (const auto& m : result.summary.methods) {
    write_text_file(dir / ("histogram_" + to_string(m.method) + ".csv"), histogram_csv(m.histogram));
  }
}

}  // namespace qtomo::io
