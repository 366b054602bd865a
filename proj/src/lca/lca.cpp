#include "wearlca/lca.hpp"
#include "wearlca/csv.hpp"
#include "wearlca/error.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <numeric>

namespace wearlca {

std::string_view to_string(FlowUnit unit)
{
    switch (unit) {
    case FlowUnit::kWh:
        return "kWh";
    case FlowUnit::kg:
        return "kg";
    case FlowUnit::L:
        return "L";
    case FlowUnit::tkm:
        return "tkm";
    case FlowUnit::item:
        return "item";
    }
    return "kWh";
}

FlowUnit flow_unit_from_string(std::string_view text)
{
    for (auto unit : {FlowUnit::kWh, FlowUnit::kg, FlowUnit::L, FlowUnit::tkm, FlowUnit::item}) {
        if (to_string(unit) == text) {
            return unit;
        }
    }
    throw InvalidTable("unknown flow unit '{}'", text);
}

namespace {

std::string read_file(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw UnreadableFile("{}: cannot open", path.string());
    }
    return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

}

FlowRegistry::FlowRegistry(std::vector<FlowInfo> flows)
: flows_(std::move(flows))
{
    for (std::size_t i = 0; i < flows_.size(); ++i) {
        if (!index_.emplace(flows_[i].id, i).second) {
            throw InvalidTable("duplicate flow '{}' in registry", flows_[i].id);
        }
    }
}

FlowRegistry FlowRegistry::load(const fs::path& path)
{
    try {
        return parse(read_file(path));
    } catch (const InvalidTable& e) {
        throw InvalidTable("{}: {}", path.string(), e.what());
    }
}

FlowRegistry FlowRegistry::parse(std::string_view csv_text)
{
    auto rows = csv::parse(csv_text);
    if (rows.empty()) {
        throw InvalidTable("flow registry is empty");
    }
    const auto& header = rows.front();
    const auto id_col = csv::column(header, "flow_id");
    const auto name_col = csv::column(header, "name");
    const auto unit_col = csv::column(header, "unit");
    std::vector<FlowInfo> flows;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& row = rows[r];
        if (row.size() != header.size()) {
            throw InvalidTable("row {} has {} fields, expected {}", r + 1, row.size(), header.size());
        }
        flows.push_back({row[id_col], row[name_col], flow_unit_from_string(row[unit_col])});
    }
    return FlowRegistry(std::move(flows));
}

const FlowInfo* FlowRegistry::find(std::string_view id) const
{
    auto it = index_.find(id);
    return it == index_.end() ? nullptr : &flows_[it->second];
}

const FlowInfo& FlowRegistry::at(std::string_view id) const
{
    if (const auto* info = find(id)) {
        return *info;
    }
    throw UnknownFlow("flow '{}' is not in the registry", id);
}

const std::vector<Indicator>& midpoint_indicators()
{
    static const std::vector<Indicator> indicators = {
        {"global_warming", "kg CO2 eq"},
        {"stratospheric_ozone_depletion", "kg CFC11 eq"},
        {"ionizing_radiation", "kBq Co-60 eq"},
        {"ozone_formation_human_health", "kg NOx eq"},
        {"fine_particulate_matter_formation", "kg PM2.5 eq"},
        {"ozone_formation_terrestrial_ecosystems", "kg NOx eq"},
        {"terrestrial_acidification", "kg SO2 eq"},
        {"freshwater_eutrophication", "kg P eq"},
        {"marine_eutrophication", "kg N eq"},
        {"terrestrial_ecotoxicity", "kg 1,4-DCB"},
        {"freshwater_ecotoxicity", "kg 1,4-DCB"},
        {"marine_ecotoxicity", "kg 1,4-DCB"},
        {"human_carcinogenic_toxicity", "kg 1,4-DCB"},
        {"human_non_carcinogenic_toxicity", "kg 1,4-DCB"},
        {"land_use", "m2a crop eq"},
        {"mineral_resource_scarcity", "kg Cu eq"},
        {"fossil_resource_scarcity", "kg oil eq"},
        {"water_consumption", "m3"},
    };
    return indicators;
}

std::optional<std::size_t> indicator_index(std::string_view id)
{
    const auto& all = midpoint_indicators();
    for (std::size_t i = 0; i < all.size(); ++i) {
        if (all[i].id == id) {
            return i;
        }
    }
    return std::nullopt;
}

void FunctionalUnit::validate() const
{
    if (!(quantity > 0.0) || !std::isfinite(quantity)) {
        throw InvalidFactor("functional unit magnitude must be positive, got {}", quantity);
    }
}

void Process::validate() const
{
    if (flows.empty()) {
        throw InvalidArgument("process {} has no flows", process_id);
    }
    std::set<std::string_view> seen;
    for (const auto& f : flows) {
        if (!seen.insert(f.flow_id).second) {
            throw InvalidArgument("process {} lists flow {} twice", process_id, f.flow_id);
        }
        if (!std::isfinite(f.amount)) {
            throw InvalidArgument("process {}: non-finite amount for {}", process_id, f.flow_id);
        }
    }
}

std::vector<FlowAmount> Process::scaled(double scale) const
{
    std::vector<FlowAmount> out;
    out.reserve(flows.size());
    for (const auto& f : flows) {
        out.push_back({f.flow_id, f.amount * scale, f.unit, process_id});
    }
    return out;
}

double Scenario::total(std::string_view flow_id) const
{
    double sum = 0.0;
    for (const auto& f : inventory) {
        if (f.flow_id == flow_id) {
            sum += f.amount;
        }
    }
    return sum;
}

const Assumption* Scenario::assumption(std::string_view key) const
{
    auto it = std::find_if(assumptions.begin(), assumptions.end(), [&](const Assumption& a) { return a.key == key; });
    return it == assumptions.end() ? nullptr : &*it;
}

void Scenario::validate(const FlowRegistry& registry) const
{
    functional_unit.validate();
    for (const auto& f : inventory) {
        const auto& info = registry.at(f.flow_id);
        if (info.unit != f.unit) {
            throw UnitMismatch("flow {} is measured in {}, inventory gives {}", f.flow_id, to_string(info.unit), to_string(f.unit));
        }
        if (!std::isfinite(f.amount)) {
            throw InvalidFactor("flow {}: non-finite amount", f.flow_id);
        }
        if (f.amount < 0.0 && !credited_flows.contains(f.flow_id)) {
            throw InvalidFactor("flow {}: negative amount {} on a non-credited flow", f.flow_id, f.amount);
        }
    }
}

CharacterizationTable CharacterizationTable::load(const fs::path& path, const FlowRegistry& registry)
{
    try {
        return parse(read_file(path), registry);
    } catch (const InvalidTable& e) {
        throw InvalidTable("{}: {}", path.string(), e.what());
    }
}

CharacterizationTable CharacterizationTable::parse(std::string_view csv_text, const FlowRegistry& registry)
{
    auto rows = csv::parse(csv_text);
    if (rows.empty()) {
        throw InvalidTable("factor table is empty");
    }
    const auto& header = rows.front();
    const auto flow_col = csv::column(header, "flow_id");
    const auto ind_col = csv::column(header, "indicator");
    const auto factor_col = csv::column(header, "factor");
    const auto unit_col = csv::column(header, "unit");
    const auto prov_col = csv::column(header, "provenance");

    CharacterizationTable table;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& row = rows[r];
        if (row.size() != header.size()) {
            throw InvalidTable("row {} has {} fields, expected {}", r + 1, row.size(), header.size());
        }
        registry.at(row[flow_col]);
        auto ind = indicator_index(row[ind_col]);
        if (!ind) {
            throw InvalidTable("row {}: unknown indicator '{}'", r + 1, row[ind_col]);
        }
        const double value = csv::parse_number(row[factor_col]);
        if (!std::isfinite(value)) {
            throw InvalidTable("row {}: non-finite factor", r + 1);
        }
        if (table.find(row[flow_col], *ind) != nullptr) {
            throw InvalidTable("row {}: duplicate factor for ({}, {})", r + 1, row[flow_col], row[ind_col]);
        }
        table.set(row[flow_col], *ind, Factor{value, row[unit_col], row[prov_col]});
    }
    return table;
}

void CharacterizationTable::set(const std::string& flow_id, std::size_t indicator, Factor factor)
{
    if (indicator >= midpoint_indicators().size()) {
        throw InvalidTable("indicator index {} out of range", indicator);
    }
    factors_[flow_id][indicator] = std::move(factor);
}

const Factor* CharacterizationTable::find(std::string_view flow_id, std::size_t indicator) const
{
    auto it = factors_.find(flow_id);
    if (it == factors_.end()) {
        return nullptr;
    }
    auto jt = it->second.find(indicator);
    return jt == it->second.end() ? nullptr : &jt->second;
}

double CharacterizationTable::factor(std::string_view flow_id, std::size_t indicator) const
{
    const auto* f = find(flow_id, indicator);
    return f == nullptr ? 0.0 : f->value;
}

std::vector<std::pair<std::string, std::string>> CharacterizationTable::missing_factors(const FlowRegistry& registry) const
{
    std::vector<std::pair<std::string, std::string>> missing;
    const auto& inds = midpoint_indicators();
    for (const auto& flow : registry.flows()) {
        for (std::size_t i = 0; i < inds.size(); ++i) {
            if (find(flow.id, i) == nullptr) {
                missing.emplace_back(flow.id, inds[i].id);
            }
        }
    }
    return missing;
}

CharacterizationTable CharacterizationTable::rescaled(std::size_t indicator, double k) const
{
    auto copy = *this;
    for (auto& [flow, per_indicator] : copy.factors_) {
        if (auto it = per_indicator.find(indicator); it != per_indicator.end()) {
            it->second.value *= k;
        }
    }
    return copy;
}

double ImpactResult::value(std::string_view indicator_id) const
{
    for (std::size_t i = 0; i < indicators.size(); ++i) {
        if (indicators[i].id == indicator_id) {
            return values[i];
        }
    }
    throw IndicatorMismatch("indicator '{}' not in result {}", indicator_id, scenario_id);
}

ImpactResult characterize(const Scenario& scenario, const CharacterizationTable& table, const FlowRegistry& registry)
{
    const auto& inds = table.indicators();
    ImpactResult result;
    result.scenario_id = scenario.scenario_id;
    result.indicators = inds;
    result.values.assign(inds.size(), 0.0);

    std::map<std::string, std::size_t, std::less<>> slot;
    for (const auto& f : scenario.inventory) {
        const auto& info = registry.at(f.flow_id);
        if (info.unit != f.unit) {
            throw UnitMismatch("flow {} is measured in {}, inventory gives {}", f.flow_id, to_string(info.unit), to_string(f.unit));
        }
        auto [it, inserted] = slot.emplace(f.flow_id, result.contributions.size());
        if (inserted) {
            result.contributions.push_back({f.flow_id, 0.0, f.unit, std::vector<double>(inds.size(), 0.0)});
        }
        auto& contrib = result.contributions[it->second];
        contrib.amount += f.amount;
        for (std::size_t i = 0; i < inds.size(); ++i) {
            const double impact = f.amount * table.factor(f.flow_id, i);
            contrib.impacts[i] += impact;
            result.values[i] += impact;
        }
    }
    return result;
}

ScenarioComparison compare(std::span<const ImpactResult> results, std::string_view baseline_id)
{
    if (results.size() < 2) {
        throw EmptyInput("comparison needs at least two results, got {}", results.size());
    }
    auto base_it = std::find_if(results.begin(), results.end(), [&](const ImpactResult& r) { return r.scenario_id == baseline_id; });
    if (base_it == results.end()) {
        throw MissingBaseline("baseline '{}' is not among the results", baseline_id);
    }
    const auto& base = *base_it;
    for (const auto& r : results) {
        const bool same = r.indicators.size() == base.indicators.size()
            && std::equal(r.indicators.begin(), r.indicators.end(), base.indicators.begin(),
                          [](const Indicator& a, const Indicator& b) { return a.id == b.id; });
        if (!same || r.values.size() != base.values.size()) {
            throw IndicatorMismatch("result {} uses a different indicator set than baseline {}", r.scenario_id, base.scenario_id);
        }
    }

    const auto n_ind = base.indicators.size();
    const auto gwp = std::find_if(base.indicators.begin(), base.indicators.end(), [](const Indicator& i) { return i.id == kGlobalWarming; });
    const std::optional<std::size_t> gwp_index = gwp == base.indicators.end()
        ? std::nullopt
        : std::optional<std::size_t>(static_cast<std::size_t>(std::distance(base.indicators.begin(), gwp)));

    ScenarioComparison cmp;
    cmp.baseline_id = std::string(baseline_id);
    cmp.indicators = base.indicators;
    for (const auto& r : results) {
        ScenarioDelta d;
        d.scenario_id = r.scenario_id;
        d.values = r.values;
        d.rank.assign(n_ind, 0);
        for (std::size_t i = 0; i < n_ind; ++i) {
            const double delta = r.values[i] - base.values[i];
            d.absolute_delta.push_back(delta);
            d.percent_delta.push_back(base.values[i] == 0.0 ? std::nullopt : std::optional<double>(100.0 * delta / base.values[i]));
            if (delta > 0.0) {
                d.increased_indicators.push_back(base.indicators[i].id);
            }
        }
        d.impact_transfer = gwp_index && d.absolute_delta[*gwp_index] < 0.0 && !d.increased_indicators.empty();
        cmp.scenarios.push_back(std::move(d));
    }

    std::vector<std::size_t> order(results.size());
    for (std::size_t i = 0; i < n_ind; ++i) {
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return results[a].values[i] < results[b].values[i]; });
        for (std::size_t pos = 0; pos < order.size(); ++pos) {
            cmp.scenarios[order[pos]].rank[i] = pos + 1;
        }
    }
    return cmp;
}

}
