#pragma once

// JSON and CSV encodings of the library types.
//
// Matrices:  {"rows": r, "cols": c, "data": [[re, im], ...]} (row-major)
// States:    a matrix object with an extra "dim" field
// POVMs:     {"dim": d, "elements": [matrix, ...]}
// Duals:     {"dim": d, "n": N, "provenance": s, "operators": [matrix, ...]}
// Counts:    {"counts": [n_0, n_1, ...]}
//
// Parse failures throw ValidationError naming the offending field; missing
// or unwritable files throw IoError.

#include <filesystem>
#include <string>
#include <string_view>

#include <json.hpp>

#include "qtomo/estimators.hpp"
#include "qtomo/frame.hpp"
#include "qtomo/montecarlo.hpp"

namespace qtomo::io {

using Json = nlohmann::ordered_json;

/// Shortest decimal form that parses back to the same double.
std::string format_double(double v);

Json read_json_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view contents);
/// Pretty-printed with a trailing newline.
std::string dump(const Json& j);

Json to_json(const ComplexMatrix& m);
ComplexMatrix matrix_from_json(const Json& j, const std::string& where);

Json state_to_json(const DensityMatrix& state);
DensityMatrix state_from_json(const Json& j, const std::string& where);

Json povm_to_json(const Povm& povm);
Povm povm_from_json(const Json& j, const std::string& where);

Json duals_to_json(const DualSet& duals);
DualSet duals_from_json(const Json& j, const std::string& where);

Json counts_to_json(const std::vector<std::uint64_t>& counts);
std::vector<std::uint64_t> counts_from_json(const Json& j, const std::string& where);

Json estimate_to_json(const EstimateRecord& r);
EstimateRecord estimate_from_json(const Json& j, const std::string& where);

Json histogram_to_json(const Histogram& h);
Histogram histogram_from_json(const Json& j, const std::string& where);

Json summary_to_json(const CampaignSummary& s);
CampaignSummary summary_from_json(const Json& j, const std::string& where);

/// Campaign config file. "povm", "true_state" and the optional "prior" are
/// paths relative to the config file's directory.
CampaignConfig load_campaign_config(const std::filesystem::path& path);

DensityMatrix load_state(const std::filesystem::path& path);
Povm load_povm(const std::filesystem::path& path);

/// index, seed, count_<i>..., then hs_<m>, trace_<m>, physical_<m> per method.
std::string experiments_csv(const std::vector<Method>& methods,
                            const std::vector<ExperimentRecord>& experiments);
/// Header "bin_lo,bin_hi,count"; the overflow bin, when present, has bin_hi "inf".
std::string histogram_csv(const Histogram& h);

/// Writes summary.json, experiments.csv and histogram_<method>.csv into `dir`.
void write_campaign_outputs(const std::filesystem::path& dir, const CampaignConfig& config,
                            const CampaignResult& result);

}  // namespace qtomo::io
