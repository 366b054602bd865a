#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace wearlca {

namespace fs = std::filesystem;

enum class FlowUnit
{
    kWh,
    kg,
    L,
    tkm,
    item,
};

std::string_view to_string(FlowUnit unit);
FlowUnit flow_unit_from_string(std::string_view text);

struct FlowInfo
{
    std::string id;
    std::string name;
    FlowUnit unit = FlowUnit::kWh;
};

/// Known elementary/technosphere flows with their fixed units (flows.csv).
class FlowRegistry
{
public:
    FlowRegistry() = default;
    explicit FlowRegistry(std::vector<FlowInfo> flows);

    static FlowRegistry load(const fs::path& path);
    static FlowRegistry parse(std::string_view csv_text);

    const FlowInfo* find(std::string_view id) const;
    /// Throws UnknownFlow.
    const FlowInfo& at(std::string_view id) const;
    const std::vector<FlowInfo>& flows() const noexcept { return flows_; }

private:
    std::vector<FlowInfo> flows_;
    std::map<std::string, std::size_t, std::less<>> index_;
};

struct Indicator
{
    std::string id;
    std::string unit;
};

/// The 18 midpoint categories, in reporting order.
const std::vector<Indicator>& midpoint_indicators();
std::optional<std::size_t> indicator_index(std::string_view id);

struct FunctionalUnit
{
    std::string description;
    double quantity = 1.0;
    std::string unit;

    /// Throws InvalidFactor unless quantity > 0.
    void validate() const;
};

struct FlowAmount
{
    std::string flow_id;
    double amount = 0.0;
    FlowUnit unit = FlowUnit::kWh;
    std::string source; // process the amount was scaled from, if any
};

/// A unit process: flows per one unit of its reference output.
struct Process
{
    std::string process_id;
    std::string name;
    std::string reference_output;
    std::vector<FlowAmount> flows;

    /// Non-empty, no duplicate flow ids, finite amounts. Throws InvalidArgument.
    void validate() const;
    /// Flows multiplied by `scale`, tagged with this process as their source.
    std::vector<FlowAmount> scaled(double scale) const;
};

struct Assumption
{
    std::string key;
    std::string value;
    std::string provenance;
};

struct Scenario
{
    std::string scenario_id;
    FunctionalUnit functional_unit;
    std::vector<FlowAmount> inventory; // scaled to the functional unit
    std::vector<Assumption> assumptions;
    std::set<std::string> credited_flows; // allowed to carry negative amounts

    /// Sum of all inventory lines of one flow (0 when absent).
    double total(std::string_view flow_id) const;
    const Assumption* assumption(std::string_view key) const;

    /// Checks amounts are finite and non-negative (unless credited) and that
    /// every unit matches the registry. Throws InvalidFactor, UnknownFlow, UnitMismatch.
    void validate(const FlowRegistry& registry) const;
};

struct Factor
{
    double value = 0.0;
    std::string unit;
    std::string provenance;
};

/// Characterization factors per (flow, indicator). Pairs without a row are
/// 0 and listed by missing_factors().
class CharacterizationTable
{
public:
    CharacterizationTable() = default;

    /// example-factors.csv: flow_id,indicator,factor,unit,provenance.
    /// Throws UnknownFlow, InvalidTable (unknown indicator, duplicate row,
    /// non-finite factor).
    static CharacterizationTable load(const fs::path& path, const FlowRegistry& registry);
    static CharacterizationTable parse(std::string_view csv_text, const FlowRegistry& registry);

    void set(const std::string& flow_id, std::size_t indicator, Factor factor);
    double factor(std::string_view flow_id, std::size_t indicator) const;
    const Factor* find(std::string_view flow_id, std::size_t indicator) const;

    const std::vector<Indicator>& indicators() const noexcept { return midpoint_indicators(); }

    /// (flow_id, indicator id) pairs of registry flows with no factor row.
    std::vector<std::pair<std::string, std::string>> missing_factors(const FlowRegistry& registry) const;

    /// Copy with every factor of one indicator multiplied by k.
    CharacterizationTable rescaled(std::size_t indicator, double k) const;

private:
    std::map<std::string, std::map<std::size_t, Factor>, std::less<>> factors_;
};

struct FlowContribution
{
    std::string flow_id;
    double amount = 0.0;
    FlowUnit unit = FlowUnit::kWh;
    std::vector<double> impacts; // per indicator
};

struct ImpactResult
{
    std::string scenario_id;
    std::vector<Indicator> indicators;
    std::vector<double> values;                 // per indicator
    std::vector<FlowContribution> contributions; // merged per flow, first-appearance order

    double value(std::string_view indicator_id) const;
};

/// Linear combination of inventory amounts and factors.
/// Throws UnknownFlow for flows missing from the registry, UnitMismatch when
/// an inventory unit disagrees with the registry.
ImpactResult characterize(const Scenario& scenario, const CharacterizationTable& table, const FlowRegistry& registry);

struct ScenarioDelta
{
    std::string scenario_id;
    std::vector<double> values;
    std::vector<double> absolute_delta;
    std::vector<std::optional<double>> percent_delta; // empty when the baseline value is 0
    std::vector<std::size_t> rank;                     // 1 = lowest impact among all compared scenarios
    bool impact_transfer = false;                      // GWP falls while some indicator rises
    std::vector<std::string> increased_indicators;
};

struct ScenarioComparison
{
    std::string baseline_id;
    std::vector<Indicator> indicators;
    std::vector<ScenarioDelta> scenarios; // input order, baseline included
};

/// Per-indicator deltas against the baseline. Ranks are 1-based with ties
/// broken by input order. Errors: EmptyInput (fewer than two results),
/// MissingBaseline, IndicatorMismatch.
ScenarioComparison compare(std::span<const ImpactResult> results, std::string_view baseline_id);

inline constexpr std::string_view kGlobalWarming = "global_warming";

}
