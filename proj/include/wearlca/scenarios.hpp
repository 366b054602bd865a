#pragma once

#include "wearlca/lca.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace wearlca {

/// Case-study constants for the machining-tool inventory (per functional
/// unit of 100 shafts in one hour).
namespace machining {
inline constexpr double kShaftsPerUnit = 100.0;
inline constexpr double kSecondsPerShaft = 30.0;
inline constexpr double kBaseToolLifespanMin = 30.0;
inline constexpr double kMachineEnergyKwh = 12.5;
inline constexpr double kCuttingFluidL = 0.0155;
inline constexpr double kCvTrainingKwh = 2.395;
inline constexpr double kShaftsPerTrainedModel = 1000.0;
}

/// Case-study constants for the rotating-anode inventory (functional unit:
/// two anodes over five years).
namespace anode {
inline constexpr double kMassKg = 1.9;
inline constexpr double kTungstenRheniumShare = 0.125;
inline constexpr double kGraphiteShare = 0.125;
inline constexpr double kMolybdenumShare = 0.75;
inline constexpr double kEuTruckKm = 874.0;
inline constexpr double kNonEuTruckKm = 124.0;
inline constexpr double kNonEuAirKm = 8930.5;
inline constexpr double kCvTrainingKwh = 2.875;
// Solved by tools/calibration/calibrate_factors.py; see data/calibration.json.
inline constexpr double kDefaultProductionEnergyKwh = 1321.0051869801114;
inline constexpr double kDefaultRefurbishmentFraction = 0.10410853721227359;
}

/// Remaining tool-life share at a cutting-speed factor. Exact at the
/// anchors 1.0 -> 1.0, 1.2 -> 0.7, 1.5 -> 0.3, piecewise linear between them.
/// Throws InvalidFactor outside [1.0, 1.5].
double speed_lifespan_tradeoff(double speed_factor);

struct MachiningParameters
{
    double lifespan_factor = 1.0;
    double speed_factor = 1.0;
    bool cv_assisted = false;
};

/// Errors: InvalidFactor (non-positive lifespan factor, speed outside the
/// trade-off range).
Scenario machining_scenario(const MachiningParameters& params);
Scenario machining_scenario(double lifespan_factor, double speed_factor, bool cv_assisted);

enum class Market
{
    EU,
    NonEU,
};

std::string_view to_string(Market market);

struct AnodeParameters
{
    Market market = Market::EU;
    bool remanufacture = false;
    double production_energy_kwh = anode::kDefaultProductionEnergyKwh;
    double refurbishment_fraction = anode::kDefaultRefurbishmentFraction;
};

/// Errors: InvalidFactor (negative production energy, fraction outside [0, 1]).
Scenario anode_scenario(const AnodeParameters& params);
Scenario anode_scenario(Market market, bool remanufacture);

/// Unit processes the anode scenarios are assembled from.
Process new_anode_process(double production_energy_kwh);
Process transport_leg_process(Market market);

/// Hard-registered scenario names: machining:{baseline,l20,s20,s50,l20s20,l20s50}
/// and anode:{eu,noneu}:{base,reman}.
const std::vector<std::string>& named_scenarios();
bool is_named_scenario(std::string_view name);
/// Throws UnknownScenario.
Scenario named_scenario(std::string_view name);
/// Baseline name of the case a named scenario belongs to.
std::string baseline_for(std::string_view name);

/// scenario.json: {"schema_version":1, "id", "case": "machining"|"anode"|"custom",
/// "parameters": {...}, "functional_unit": {...}, "inventory": [...], "overrides": {flow: amount}}.
/// Throws InvalidArgument on schema errors plus the builder errors.
Scenario parse_scenario_json(std::string_view text, const FlowRegistry& registry);
Scenario load_scenario_file(const fs::path& path, const FlowRegistry& registry);

}
