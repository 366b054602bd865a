#pragma once

#include "wearlca/analytics.hpp"
#include "wearlca/lca.hpp"
#include "wearlca/metrics.hpp"

#include <json.hpp>

#include <string>
#include <string_view>
#include <vector>

// Stable on-disk schemas (documented in docs/formats.md). Every writer has a
// matching reader so outputs can be round-tripped.
namespace wearlca::reports {

using nlohmann::json;

inline constexpr int kSchemaVersion = 1;

json to_json(const MetricReport& report);
MetricReport metric_report_from_json(const json& doc);
/// report.csv, one row per class; ratios rendered with 3 decimals.
std::string metric_report_csv(const MetricReport& report);

struct ReportCsvRow
{
    int class_id = 0;
    std::string class_name;
    double dice = 0.0;
    bool absent = false;
    std::uint64_t predicted_pixels = 0;
    std::uint64_t ground_truth_pixels = 0;
};
std::vector<ReportCsvRow> parse_metric_report_csv(std::string_view text);

json to_json(const WearSummary& summary);
WearSummary wear_summary_from_json(const json& doc);
/// summary.csv, one row per image.
std::string summary_csv(std::span<const WearSummary> summaries);
std::vector<WearSummary> parse_summary_csv(std::string_view text, ProductFamily family);

json to_json(const ProcessWearProfile& profile);
ProcessWearProfile profile_from_json(const json& doc);

json to_json(const FocalTrackEstimate& estimate);

json to_json(const Scenario& scenario);
json to_json(const ImpactResult& result);

/// impacts.csv: scenario_id then one column per indicator.
std::string impacts_csv(std::span<const ImpactResult> results);
std::vector<ImpactResult> parse_impacts_csv(std::string_view text);

/// comparison.json: deltas, ranks and transfer flags plus chart series with
/// every indicator normalized to its largest scenario value (= 100).
json to_json(const ScenarioComparison& comparison);
ScenarioComparison comparison_from_json(const json& doc);

/// Fixed 3-decimal rendering used by tables and UI labels.
std::string fixed3(double value);

}
