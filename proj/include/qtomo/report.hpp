#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qtomo/montecarlo.hpp"

namespace qtomo {

struct ReportRow {
  std::string name;
  std::string mean;   // two decimals
  std::string sigma;  // two decimals
  std::optional<std::string> delta_mean;   // e.g. "-16.7%"; unset for the baseline
  std::optional<std::string> delta_sigma;
};

struct ReportTable {
  std::vector<ReportRow> rows;  // plain first

  std::string to_text() const;
  std::string to_csv() const;
};

/// Builds the comparison table. Percentages are computed from the rendered
/// two-decimal values, 100 (x - x_plain) / x_plain, rounded to one decimal.
/// Throws ValidationError when the summary has no plain baseline.
ReportTable emit_report(const CampaignSummary& summary);

}  // namespace qtomo
