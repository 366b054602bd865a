#include "support/test_support.hpp"

#include "wearlca/reports.hpp"
#include "wearlca/scenarios.hpp"

#include <fmt/format.h>
#include <gtest/gtest.h>

using namespace wearlca;
using wearlca::test::Gen;

namespace {

const ClassMap& M = ClassMap::machining_tool();

const FlowRegistry& registry()
{
    static const auto r = FlowRegistry::load(test::data_dir() / "flows.csv");
    return r;
}

const CharacterizationTable& table()
{
    static const auto t = CharacterizationTable::load(test::data_dir() / "example-factors.csv", registry());
    return t;
}

}

TEST(Reports, Fixed3)
{
    EXPECT_EQ(reports::fixed3(0.6316), "0.632");
    EXPECT_EQ(reports::fixed3(8.013), "8.013");
    EXPECT_EQ(reports::fixed3(1.0), "1.000");
}

TEST(Reports, MetricReportRoundTrip)
{
    Gen gen(11001);
    for (auto mode : {Aggregation::Pooled, Aggregation::PerImage}) {
        const auto a = gen.mask(12, 9, M);
        const auto b = gen.mask(12, 9, M, 2);
        const std::vector<MaskPair> pairs{{a, b}};
        const auto r = dataset_metrics(pairs, M, mode);
        const auto back = reports::metric_report_from_json(nlohmann::json::parse(reports::to_json(r).dump()));
        EXPECT_EQ(back.class_map_ref, r.class_map_ref);
        EXPECT_EQ(back.aggregation, r.aggregation);
        EXPECT_EQ(back.image_count, r.image_count);
        EXPECT_EQ(back.mean_dsc, r.mean_dsc);
        EXPECT_EQ(back.pixel_accuracy, r.pixel_accuracy);
        EXPECT_EQ(back.image_mean_accuracy, r.image_mean_accuracy);
        EXPECT_EQ(back.confusion, r.confusion);
        ASSERT_EQ(back.per_class.size(), r.per_class.size());
        for (std::size_t c = 0; c < r.per_class.size(); ++c) {
            EXPECT_EQ(back.per_class[c].dice, r.per_class[c].dice);
            EXPECT_EQ(back.per_class[c].absent, r.per_class[c].absent);
        }

        const auto rows = reports::parse_metric_report_csv(reports::metric_report_csv(r));
        ASSERT_EQ(rows.size(), 4u);
        for (std::size_t c = 0; c < 4; ++c) {
            EXPECT_EQ(rows[c].class_id, static_cast<int>(c));
            EXPECT_EQ(rows[c].class_name, M.at(static_cast<ClassId>(c)).name);
            EXPECT_NEAR(rows[c].dice, r.per_class[c].dice, 5e-4);
            EXPECT_EQ(rows[c].predicted_pixels, r.per_class[c].predicted_pixels);
        }
    }
}

TEST(Reports, SummaryRoundTrip)
{
    Gen gen(11002);
    std::vector<WearSummary> summaries;
    for (int i = 0; i < 20; ++i) {
        summaries.push_back(summarize(gen.mask(gen.size(1, 20), gen.size(1, 20), M, gen.size(1, 4)), fmt::format("tool,{}", i)));
    }
    const auto parsed = reports::parse_summary_csv(reports::summary_csv(summaries), ProductFamily::MachiningTool);
    ASSERT_EQ(parsed.size(), summaries.size());
    for (std::size_t i = 0; i < summaries.size(); ++i) {
        const auto& a = summaries[i];
        const auto& b = parsed[i];
        EXPECT_EQ(a.image_id, b.image_id);
        EXPECT_EQ(a.width, b.width);
        EXPECT_EQ(a.support_pixels, b.support_pixels);
        EXPECT_EQ(a.wear_extent, b.wear_extent);
        for (std::size_t c = 0; c < a.classes.size(); ++c) {
            EXPECT_EQ(a.classes[c].pixels, b.classes[c].pixels);
            EXPECT_EQ(a.classes[c].fraction, b.classes[c].fraction);
            EXPECT_EQ(a.classes[c].region_count, b.classes[c].region_count);
            EXPECT_EQ(a.classes[c].largest_region, b.classes[c].largest_region);
        }
        const auto j = reports::wear_summary_from_json(reports::to_json(a));
        EXPECT_EQ(j.image_id, a.image_id);
        EXPECT_EQ(j.wear_extent, a.wear_extent);
        EXPECT_EQ(j.classes.size(), a.classes.size());
    }
}

TEST(Reports, ProfileRoundTrip)
{
    Gen gen(11003);
    std::vector<WearSummary> summaries;
    for (int i = 0; i < 15; ++i) {
        summaries.push_back(summarize(gen.mask(8, 8, M), fmt::format("t{}", i)));
    }
    const auto p = aggregate(summaries);
    const auto back = reports::profile_from_json(nlohmann::json::parse(reports::to_json(p).dump()));
    EXPECT_EQ(back.family, p.family);
    EXPECT_EQ(back.n_tools, p.n_tools);
    EXPECT_EQ(back.image_ids, p.image_ids);
    ASSERT_EQ(back.classes.size(), p.classes.size());
    for (std::size_t c = 0; c < p.classes.size(); ++c) {
        EXPECT_EQ(back.classes[c].class_id, p.classes[c].class_id);
        EXPECT_EQ(back.classes[c].fraction.mean, p.classes[c].fraction.mean);
        EXPECT_EQ(back.classes[c].fraction.std, p.classes[c].fraction.std);
        EXPECT_EQ(back.classes[c].incidence, p.classes[c].incidence);
        EXPECT_EQ(back.classes[c].histogram.counts, p.classes[c].histogram.counts);
    }
}

TEST(Reports, ImpactsAndComparisonRoundTrip)
{
    std::vector<ImpactResult> results;
    for (const auto& name : named_scenarios()) {
        if (name.starts_with("machining")) {
            results.push_back(characterize(named_scenario(name), table(), registry()));
        }
    }
    const auto parsed = reports::parse_impacts_csv(reports::impacts_csv(results));
    ASSERT_EQ(parsed.size(), 6u);
    for (std::size_t i = 0; i < results.size(); ++i) {
        EXPECT_EQ(parsed[i].scenario_id, results[i].scenario_id);
        EXPECT_EQ(parsed[i].values, results[i].values);
    }

    const auto cmp = compare(results, "machining:baseline");
    const auto doc = reports::to_json(cmp);
    ASSERT_EQ(doc.at("scenarios").size(), 6u);
    const auto back = reports::comparison_from_json(nlohmann::json::parse(doc.dump()));
    EXPECT_EQ(back.baseline_id, cmp.baseline_id);
    ASSERT_EQ(back.scenarios.size(), 6u);
    for (std::size_t i = 0; i < 6; ++i) {
        EXPECT_EQ(back.scenarios[i].values.size(), 18u);
        EXPECT_EQ(back.scenarios[i].values, cmp.scenarios[i].values);
        EXPECT_EQ(back.scenarios[i].absolute_delta, cmp.scenarios[i].absolute_delta);
        EXPECT_EQ(back.scenarios[i].percent_delta, cmp.scenarios[i].percent_delta);
        EXPECT_EQ(back.scenarios[i].rank, cmp.scenarios[i].rank);
        EXPECT_EQ(back.scenarios[i].impact_transfer, cmp.scenarios[i].impact_transfer);
    }
}

TEST(Reports, ScenarioJsonCarriesAssumptions)
{
    const auto doc = reports::to_json(named_scenario("anode:noneu:reman"));
    EXPECT_EQ(doc.at("scenario_id"), "anode:noneu:reman");
    bool has_refurb = false;
    for (const auto& a : doc.at("assumptions")) {
        has_refurb |= a.at("key") == "refurbishment_energy_fraction";
    }
    EXPECT_TRUE(has_refurb);
}
