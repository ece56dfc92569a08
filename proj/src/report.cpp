#include "qtomo/report.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace qtomo {

namespace {

std::string fixed(double v, int decimals) {
  std::array<char, 64> buf{};
  std::snprintf(buf.data(), buf.size(), "%.*f", decimals, v);
  std::string s(buf.data());
  if (s.find_first_not_of("-0.") == std::string::npos && s.front() == '-') s.erase(0, 1);
  return s;
}

std::optional<std::string> percent_change(const std::string& rendered, const std::string& baseline) {
  const double x = std::stod(rendered);
  const double base = std::stod(baseline);
  if (base == 0.0) return std::nullopt;
  return fixed(100.0 * (x - base) / base, 1) + "%";
}

constexpr const char* kDash = "-";

}  // namespace

ReportTable emit_report(const CampaignSummary& summary) {
  const MethodSummary* plain = summary.find(Method::kPlain);
  if (!plain) throw ValidationError("summary has no plain baseline; rerun with method 'plain'");

  ReportTable table;
  ReportRow base{display_name(Method::kPlain), fixed(plain->mean, 2), fixed(plain->stddev, 2),
                 std::nullopt, std::nullopt};
  table.rows.push_back(base);
  for (const auto& m : summary.methods) {
    if (m.method == Method::kPlain) continue;
    ReportRow row{display_name(m.method), fixed(m.mean, 2), fixed(m.stddev, 2), {}, {}};
    row.delta_mean = percent_change(row.mean, base.mean);
    row.delta_sigma = percent_change(row.sigma, base.sigma);
    table.rows.push_back(std::move(row));
  }
  return table;
}

std::string ReportTable::to_text() const {
  const std::array<std::string, 5> header{"Procedure", "<H.S. dist.>", "sigma",
                                          "Delta(<H.S. dist.>)", "Delta(sigma)"};
  std::vector<std::array<std::string, 5>> cells;
  cells.push_back(header);
  for (const auto& r : rows) {
    cells.push_back({r.name, r.mean, r.sigma, r.delta_mean.value_or(kDash),
                     r.delta_sigma.value_or(kDash)});
  }
  std::array<std::size_t, 5> width{};
  for (const auto& row : cells) {
    for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
  }

  std::ostringstream os;
  auto rule = [&] {
    std::size_t total = 0;
    for (auto w : width) total += w;
    os << std::string(total + 2 * (width.size() - 1), '-') << "\n";
  };
  rule();
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const auto& row = cells[i];
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c == 0) {
        os << row[c] << std::string(width[c] - row[c].size(), ' ');
      } else {
        os << "  " << std::string(width[c] - row[c].size(), ' ') << row[c];
      }
    }
    os << "\n";
    if (i == 0) rule();
  }
  rule();
  return os.str();
}

std::string ReportTable::to_csv() const {
  std::ostringstream os;
  os << "procedure,mean_hs_distance,sigma,delta_mean,delta_sigma\n";
  for (const auto& r : rows) {
    os << r.name << "," << r.mean << "," << r.sigma << "," << r.delta_mean.value_or(kDash) << ","
       << r.delta_sigma.value_or(kDash) << "\n";
  }
  return os.str();
}

}  // namespace qtomo
