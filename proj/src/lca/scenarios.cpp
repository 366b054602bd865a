#include "wearlca/scenarios.hpp"
#include "wearlca/csv.hpp"
#include "wearlca/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <iterator>

namespace wearlca {

using nlohmann::json;

namespace {

struct Anchor
{
    double speed;
    double lifespan_share;
};

constexpr std::array<Anchor, 3> kTradeoffAnchors = {{{1.0, 1.0}, {1.2, 0.7}, {1.5, 0.3}}};

std::string num(double v)
{
    return csv::format_number(v);
}

}

double speed_lifespan_tradeoff(double speed_factor)
{
    if (!(speed_factor >= kTradeoffAnchors.front().speed && speed_factor <= kTradeoffAnchors.back().speed)) {
        throw InvalidFactor("speed factor {} outside the trade-off range [{}, {}]", speed_factor,
                            kTradeoffAnchors.front().speed, kTradeoffAnchors.back().speed);
    }
    for (const auto& a : kTradeoffAnchors) {
        if (speed_factor == a.speed) {
            return a.lifespan_share;
        }
    }
    for (std::size_t i = 1; i < kTradeoffAnchors.size(); ++i) {
        const auto& lo = kTradeoffAnchors[i - 1];
        const auto& hi = kTradeoffAnchors[i];
        if (speed_factor < hi.speed) {
            const double t = (speed_factor - lo.speed) / (hi.speed - lo.speed);
            return lo.lifespan_share + t * (hi.lifespan_share - lo.lifespan_share);
        }
    }
    return kTradeoffAnchors.back().lifespan_share;
}

Scenario machining_scenario(const MachiningParameters& params)
{
    using namespace machining;
    if (!(params.lifespan_factor > 0.0) || !std::isfinite(params.lifespan_factor)) {
        throw InvalidFactor("lifespan factor must be positive, got {}", params.lifespan_factor);
    }
    if (!(params.speed_factor > 0.0)) {
        throw InvalidFactor("speed factor must be positive, got {}", params.speed_factor);
    }
    const double tradeoff = speed_lifespan_tradeoff(params.speed_factor);

    const double base_minutes = kShaftsPerUnit * kSecondsPerShaft / 60.0;
    const double minutes = base_minutes / params.speed_factor;
    const double time_ratio = minutes / base_minutes;
    const double effective_lifespan = kBaseToolLifespanMin * params.lifespan_factor * tradeoff;

    Scenario s;
    s.scenario_id = fmt::format("machining(lifespan={},speed={},cv={})", num(params.lifespan_factor), num(params.speed_factor),
                                params.cv_assisted ? "on" : "off");
    s.functional_unit = {"Manufacture 100 unit shafts (42CrMo4, 800 g) per hour with WC-Co cutting tools (9.06 g)",
                         kShaftsPerUnit, "shafts/hour"};
    s.inventory = {
        {"cutting_tool", minutes / effective_lifespan, FlowUnit::item, "machining_process"},
        {"electricity_de", kMachineEnergyKwh * time_ratio, FlowUnit::kWh, "machining_process"},
        {"cutting_fluid", kCuttingFluidL * time_ratio, FlowUnit::L, "machining_process"},
    };
    if (params.cv_assisted) {
        s.inventory.push_back({"cv_training_electricity", kCvTrainingKwh * kShaftsPerUnit / kShaftsPerTrainedModel, FlowUnit::kWh,
                               "cv_model_training"});
    }

    s.assumptions = {
        {"lifespan_factor", num(params.lifespan_factor), "scenario parameter"},
        {"speed_factor", num(params.speed_factor), "scenario parameter"},
        {"cv_assisted", params.cv_assisted ? "true" : "false", "scenario parameter"},
        {"cutting_time_min", num(minutes), "100 shafts x 30 s per shaft, divided by the speed factor"},
        {"base_tool_lifespan_min", num(kBaseToolLifespanMin), "expert estimate for the baseline process"},
        {"speed_lifespan_tradeoff", num(tradeoff), "anchors 1.0->1.0, 1.2->0.7, 1.5->0.3; piecewise linear in between"},
        {"lifespan_composition", "effective lifespan = base x lifespan_factor x tradeoff(speed_factor)",
         "assumed multiplicative composition of lifespan and speed changes"},
        {"tool_amortization", "continuous (fractional tools per functional unit)", "steady-state hourly rate"},
        {"machine_energy_scaling", "12.5 kWh x cutting-time ratio", "assumed: energy and cutting fluid scale with cutting time"},
    };
    if (params.cv_assisted) {
        s.assumptions.push_back({"cv_training_amortization", "2.395 kWh over 1000 shafts", "one trained model serves 1000 shafts"});
    }
    return s;
}

Scenario machining_scenario(double lifespan_factor, double speed_factor, bool cv_assisted)
{
    return machining_scenario(MachiningParameters{lifespan_factor, speed_factor, cv_assisted});
}

std::string_view to_string(Market market)
{
    return market == Market::EU ? "EU" : "NonEU";
}

Process new_anode_process(double production_energy_kwh)
{
    using namespace anode;
    Process p{"anode_production", "Production of one rotating anode (1.9 kg)", "1 anode",
              {
                  {"tungsten_rhenium_alloy", kMassKg * kTungstenRheniumShare, FlowUnit::kg, {}},
                  {"graphite", kMassKg * kGraphiteShare, FlowUnit::kg, {}},
                  {"molybdenum", kMassKg * kMolybdenumShare, FlowUnit::kg, {}},
                  {"anode_production_energy", production_energy_kwh, FlowUnit::kWh, {}},
              }};
    p.validate();
    return p;
}

Process transport_leg_process(Market market)
{
    using namespace anode;
    const double tonnes = kMassKg / 1000.0;
    Process p;
    p.reference_output = "1 anode transported one way";
    if (market == Market::EU) {
        p.process_id = "transport_leg_eu";
        p.name = "Austria to European customer, lorry";
        p.flows = {{"transport_truck", tonnes * kEuTruckKm, FlowUnit::tkm, {}}};
    } else {
        p.process_id = "transport_leg_noneu";
        p.name = "Austria to Asian/US customer, lorry and aircraft";
        p.flows = {
            {"transport_truck", tonnes * kNonEuTruckKm, FlowUnit::tkm, {}},
            {"transport_air", tonnes * kNonEuAirKm, FlowUnit::tkm, {}},
        };
    }
    p.validate();
    return p;
}

Scenario anode_scenario(const AnodeParameters& params)
{
    using namespace anode;
    if (!(params.production_energy_kwh >= 0.0) || !std::isfinite(params.production_energy_kwh)) {
        throw InvalidFactor("anode production energy must be non-negative, got {}", params.production_energy_kwh);
    }
    if (!(params.refurbishment_fraction >= 0.0 && params.refurbishment_fraction <= 1.0)) {
        throw InvalidFactor("refurbishment fraction must be in [0, 1], got {}", params.refurbishment_fraction);
    }

    const auto production = new_anode_process(params.production_energy_kwh);
    const auto leg = transport_leg_process(params.market);

    Scenario s;
    s.scenario_id = fmt::format("anode({},{})", to_string(params.market), params.remanufacture ? "reman" : "base");
    s.functional_unit = {"Provide two X-ray rotating anodes for an assumed usage of five years", 2.0, "anodes/5 years"};

    auto append = [&](std::vector<FlowAmount> flows) {
        s.inventory.insert(s.inventory.end(), std::make_move_iterator(flows.begin()), std::make_move_iterator(flows.end()));
    };

    if (!params.remanufacture) {
        append(production.scaled(2.0));
        append(leg.scaled(2.0));
    } else {
        append(production.scaled(1.0));
        append(leg.scaled(1.0));
        // second anode: back to the production site and out again
        auto round_trip = leg.scaled(2.0);
        for (auto& f : round_trip) {
            f.source = leg.process_id + "_round_trip";
        }
        append(std::move(round_trip));
        s.inventory.push_back({"anode_refurbishment_energy", params.refurbishment_fraction * params.production_energy_kwh,
                               FlowUnit::kWh, "focal_track_refurbishment"});
        s.inventory.push_back({"cv_training_electricity", kCvTrainingKwh, FlowUnit::kWh, "cv_model_training"});
    }

    s.assumptions = {
        {"market", std::string(to_string(params.market)), "scenario parameter"},
        {"remanufacture", params.remanufacture ? "true" : "false", "scenario parameter"},
        {"anode_mass_kg", num(kMassKg), "12.5% W-Re 95/5, 12.5% graphite, 75% molybdenum"},
        {"anode_lifespan_years", "2.5", "expert estimate; the functional unit spans two lifespans"},
        {"anode_production_energy_kwh", num(params.production_energy_kwh),
         "not published; default calibrated to the reported remanufacturing savings"},
        {"transport", params.market == Market::EU ? "874 km lorry per leg" : "124 km lorry + 8930.5 km air per leg",
         "baseline one-way per anode; remanufacturing adds a round trip"},
    };
    if (params.remanufacture) {
        s.assumptions.push_back({"refurbishment_energy_fraction", num(params.refurbishment_fraction),
                                 "not published; modeled as a fraction of production energy, default calibrated"});
        s.assumptions.push_back({"cv_training_kwh", num(kCvTrainingKwh), "5 training runs x 30 min x 1.15 kW"});
    }
    return s;
}

Scenario anode_scenario(Market market, bool remanufacture)
{
    AnodeParameters p;
    p.market = market;
    p.remanufacture = remanufacture;
    return anode_scenario(p);
}

namespace {

struct NamedMachining
{
    std::string_view name;
    MachiningParameters params;
};

constexpr std::array<NamedMachining, 6> kMachiningNames = {{
    {"machining:baseline", {1.0, 1.0, false}},
    {"machining:l20", {1.2, 1.0, true}},
    {"machining:s20", {1.0, 1.2, true}},
    {"machining:s50", {1.0, 1.5, true}},
    {"machining:l20s20", {1.2, 1.2, true}},
    {"machining:l20s50", {1.2, 1.5, true}},
}};

}

const std::vector<std::string>& named_scenarios()
{
    static const std::vector<std::string> names = [] {
        std::vector<std::string> out;
        for (const auto& m : kMachiningNames) {
            out.emplace_back(m.name);
        }
        for (const char* n : {"anode:eu:base", "anode:eu:reman", "anode:noneu:base", "anode:noneu:reman"}) {
            out.emplace_back(n);
        }
        return out;
    }();
    return names;
}

bool is_named_scenario(std::string_view name)
{
    const auto& names = named_scenarios();
    return std::find(names.begin(), names.end(), name) != names.end();
}

Scenario named_scenario(std::string_view name)
{
    for (const auto& m : kMachiningNames) {
        if (m.name == name) {
            auto s = machining_scenario(m.params);
            s.scenario_id = std::string(name);
            return s;
        }
    }
    if (name.starts_with("anode:")) {
        std::optional<Market> market;
        if (name.starts_with("anode:eu:")) {
            market = Market::EU;
        } else if (name.starts_with("anode:noneu:")) {
            market = Market::NonEU;
        }
        const auto kind = name.substr(name.rfind(':') + 1);
        if (market && (kind == "base" || kind == "reman")) {
            auto s = anode_scenario(*market, kind == "reman");
            s.scenario_id = std::string(name);
            return s;
        }
    }
    throw UnknownScenario("unknown scenario '{}'", name);
}

std::string baseline_for(std::string_view name)
{
    if (name.starts_with("machining")) {
        return "machining:baseline";
    }
    if (name.starts_with("anode:eu")) {
        return "anode:eu:base";
    }
    if (name.starts_with("anode:noneu")) {
        return "anode:noneu:base";
    }
    throw UnknownScenario("no baseline for '{}'", name);
}

namespace {

Market parse_market(const std::string& text)
{
    if (text == "EU" || text == "eu") {
        return Market::EU;
    }
    if (text == "NonEU" || text == "noneu" || text == "non-eu") {
        return Market::NonEU;
    }
    throw InvalidArgument("unknown market '{}'", text);
}

}

Scenario parse_scenario_json(std::string_view text, const FlowRegistry& registry)
{
    Scenario s;
    try {
        const auto doc = json::parse(text);
        if (doc.value("schema_version", 1) != 1) {
            throw InvalidArgument("unsupported scenario schema_version");
        }
        const auto kind = doc.at("case").get<std::string>();
        const auto params = doc.value("parameters", json::object());
        if (kind == "machining") {
            MachiningParameters p;
            p.lifespan_factor = params.value("lifespan_factor", 1.0);
            p.speed_factor = params.value("speed_factor", 1.0);
            p.cv_assisted = params.value("cv_assisted", false);
            s = machining_scenario(p);
        } else if (kind == "anode") {
            AnodeParameters p;
            p.market = parse_market(params.value("market", std::string("EU")));
            p.remanufacture = params.value("remanufacture", false);
            p.production_energy_kwh = params.value("production_energy_kwh", p.production_energy_kwh);
            p.refurbishment_fraction = params.value("refurbishment_fraction", p.refurbishment_fraction);
            s = anode_scenario(p);
        } else if (kind == "custom") {
            const auto& fu = doc.at("functional_unit");
            s.functional_unit = {fu.at("description").get<std::string>(), fu.at("quantity").get<double>(),
                                 fu.value("unit", std::string())};
            for (const auto& item : doc.at("inventory")) {
                const auto id = item.at("flow_id").get<std::string>();
                const auto& info = registry.at(id);
                if (item.contains("unit") && flow_unit_from_string(item.at("unit").get<std::string>()) != info.unit) {
                    throw UnitMismatch("flow {} is measured in {}", id, to_string(info.unit));
                }
                s.inventory.push_back({id, item.at("amount").get<double>(), info.unit, "scenario.json"});
            }
            s.assumptions.push_back({"inventory", "user supplied", "scenario.json"});
        } else {
            throw InvalidArgument("unknown case '{}'", kind);
        }
        s.scenario_id = doc.value("id", s.scenario_id);
        const auto overrides = doc.value("overrides", json::object());
        for (const auto& [flow, amount] : overrides.items()) {
            const auto& info = registry.at(flow);
            std::erase_if(s.inventory, [&](const FlowAmount& f) { return f.flow_id == flow; });
            s.inventory.push_back({flow, amount.get<double>(), info.unit, "override"});
            s.assumptions.push_back({"override:" + flow, num(amount.get<double>()), "user override in scenario.json"});
        }
        const auto credited = doc.value("credited_flows", json::array());
        for (const auto& flow : credited) {
            s.credited_flows.insert(flow.get<std::string>());
        }
    } catch (const json::exception& e) {
        throw InvalidArgument("malformed scenario: {}", e.what());
    } catch (const InvalidTable& e) {
        throw InvalidArgument("malformed scenario: {}", e.what());
    }
    s.validate(registry);
    return s;
}

Scenario load_scenario_file(const fs::path& path, const FlowRegistry& registry)
{
    std::ifstream in(path);
    if (!in) {
        throw UnreadableFile("{}: cannot open", path.string());
    }
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return parse_scenario_json(text, registry);
}

}
