#include "support/test_support.hpp"

#include "wearlca/cli.hpp"
#include "wearlca/csv.hpp"
#include "wearlca/reports.hpp"
#include "wearlca/scenarios.hpp"

#include <fmt/format.h>
#include <gtest/gtest.h>
#include <json.hpp>

#include <cstdlib>
#include <sstream>

using namespace wearlca;
using wearlca::test::TempDir;
using nlohmann::json;

namespace {

struct Run
{
    int code;
    std::string out;
    std::string err;
};

Run wearlca_cli(std::vector<std::string> args)
{
    args.insert(args.begin(), "wearlca");
    std::vector<const char*> argv;
    for (const auto& a : args) {
        argv.push_back(a.c_str());
    }
    std::ostringstream out;
    std::ostringstream err;
    const int code = cli::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::string machining_manifest()
{
    return (test::fixture_dir() / "machining" / "manifest.json").string();
}

std::string anode_manifest()
{
    return (test::fixture_dir() / "anode" / "manifest.json").string();
}

// Three tiny machining masks, optionally without predictions.
fs::path small_dataset(const fs::path& dir, bool with_predictions, const std::string& role = "test")
{
    json records = json::array();
    const auto& map = ClassMap::machining_tool();
    for (int i = 0; i < 3; ++i) {
        const auto name = fmt::format("m{}.png", i);
        write_mask(dir / name, SegmentationMask(3, 2, {0, 1, 1, 0, 2, static_cast<ClassId>(i)}, map));
        json rec = {{"image_id", fmt::format("img{}", i)}, {"role", role}, {"gt", name}};
        if (with_predictions) {
            rec["pred"] = name;
        }
        records.push_back(rec);
    }
    const auto path = dir / "manifest.json";
    test::write_text(path, json{{"schema_version", 1}, {"class_map", "machining_tool"}, {"records", records}}.dump());
    return path;
}

std::vector<std::pair<std::string, std::string>> directory_bytes(const fs::path& dir)
{
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& e : fs::directory_iterator(dir)) {
        out.emplace_back(e.path().filename().string(), test::read_file(e.path()));
    }
    std::sort(out.begin(), out.end());
    return out;
}

}

TEST(Cli, EvaluateMachiningFixture)
{
    TempDir out;
    const auto r = wearlca_cli({"evaluate", "--manifest", machining_manifest(), "--out", out.path().string()});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto doc = json::parse(test::read_file(out / "report.json"));
    EXPECT_NEAR(doc.at("mean_dsc").get<double>(), 0.6315, 1e-12);
    const auto report = reports::metric_report_from_json(doc);
    EXPECT_EQ(report.image_count, 51u);
    const auto rows = reports::parse_metric_report_csv(test::read_file(out / "report.csv"));
    ASSERT_EQ(rows.size(), 4u);
    EXPECT_EQ(reports::fixed3(rows[2].dice), "0.244");
}

TEST(Cli, EvaluateAnodeFixturePerImage)
{
    TempDir out;
    const auto r = wearlca_cli({"evaluate", "--manifest", anode_manifest(), "--out", out.path().string(), "--mode", "per-image"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto doc = json::parse(test::read_file(out / "report.json"));
    EXPECT_EQ(doc.at("aggregation"), "per_image");
}

TEST(Cli, EvaluateWithoutPredictions)
{
    TempDir dir;
    const auto manifest = small_dataset(dir.path(), false);
    const auto r = wearlca_cli({"evaluate", "--manifest", manifest.string(), "--out", (dir / "out").string()});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("no prediction for image_id img0"), std::string::npos) << r.err;
}

TEST(Cli, EvaluateEmptyTestSplit)
{
    TempDir dir;
    const auto manifest = small_dataset(dir.path(), true, "train");
    EXPECT_EQ(wearlca_cli({"evaluate", "--manifest", manifest.string(), "--out", (dir / "out").string()}).code, 2);
}

TEST(Cli, EvaluateInvalidManifest)
{
    TempDir dir;
    test::write_text(dir / "bad.json", "{\"records\": 3}");
    EXPECT_EQ(wearlca_cli({"evaluate", "--manifest", (dir / "bad.json").string(), "--out", (dir / "o").string()}).code, 2);
    EXPECT_EQ(wearlca_cli({"evaluate", "--manifest", (dir / "none.json").string(), "--out", (dir / "o").string()}).code, 2);
}

TEST(Cli, FormatSelectsOutputs)
{
    TempDir out;
    ASSERT_EQ(wearlca_cli({"evaluate", "--manifest", machining_manifest(), "--out", out.path().string(), "--format", "csv"}).code, 0);
    EXPECT_TRUE(fs::exists(out / "report.csv"));
    EXPECT_FALSE(fs::exists(out / "report.json"));
    EXPECT_EQ(wearlca_cli({"evaluate", "--manifest", machining_manifest(), "--format", "xml"}).code, 1);
}

TEST(Cli, ProfileThreeImages)
{
    TempDir dir;
    const auto manifest = small_dataset(dir.path(), false);
    const auto r = wearlca_cli({"profile", "--manifest", manifest.string(), "--out", (dir / "out").string()});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto doc = json::parse(test::read_file(dir / "out" / "profile.json"));
    EXPECT_EQ(doc.at("n_tools"), 3);
    const auto profile = reports::profile_from_json(doc);
    EXPECT_EQ(profile.n_tools, 3u);
    const auto rows = reports::parse_summary_csv(test::read_file(dir / "out" / "summary.csv"), ProductFamily::MachiningTool);
    EXPECT_EQ(rows.size(), 3u);
}

TEST(Cli, ProfileMixedFamily)
{
    TempDir dir;
    const auto manifest = small_dataset(dir.path(), false);
    // one mask declares the anode taxonomy in its sidecar
    test::write_text(sidecar_path(dir / "m1.png"), R"({"class_map":"rotating_anode"})");
    EXPECT_EQ(wearlca_cli({"profile", "--manifest", manifest.string(), "--out", (dir / "out").string()}).code, 2);

    TempDir dir2;
    write_mask(dir2 / "a.png", SegmentationMask(1, 1, {0}, ClassMap::machining_tool()));
    test::write_text(dir2 / "manifest.json",
                     R"({"class_map":"machining_tool","records":[{"image_id":"a","role":"test","gt":"a.png","class_map":"rotating_anode"}]})");
    EXPECT_EQ(wearlca_cli({"profile", "--manifest", (dir2 / "manifest.json").string(), "--out", (dir2 / "o").string()}).code, 2);
}

TEST(Cli, TrackStitchesAnodePatches)
{
    TempDir out;
    const auto r = wearlca_cli({"track", "--manifest", anode_manifest(), "--out", out.path().string(), "--coverage", "0.25",
                                "--pixel-pitch", "1.5"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto doc = json::parse(test::read_file(out / "tracks.json"));
    ASSERT_EQ(doc.at("tracks").size(), 12u);
    for (const auto& t : doc.at("tracks")) {
        for (const auto& c : t.at("estimate").at("classes")) {
            EXPECT_DOUBLE_EQ(c.at("estimated_pixels").get<double>(), c.at("sampled_pixels").get<double>() / 0.25);
        }
    }
    EXPECT_EQ(wearlca_cli({"track", "--manifest", anode_manifest(), "--out", out.path().string(), "--coverage", "0", "--pixel-pitch", "1"}).code,
              2);
    EXPECT_EQ(wearlca_cli({"track", "--manifest", anode_manifest(), "--coverage", "0.5"}).code, 1);
}

TEST(Cli, LcaBaseline)
{
    TempDir out;
    const auto r = wearlca_cli({"lca", "--scenario", "machining:baseline", "--out", out.path().string()});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto results = reports::parse_impacts_csv(test::read_file(out / "impacts.csv"));
    ASSERT_EQ(results.size(), 1u);
    EXPECT_NEAR(results[0].value(kGlobalWarming), 8.013, 1e-3);
    EXPECT_FALSE(fs::exists(out / "comparison.json"));
}

TEST(Cli, LcaSixMachiningScenarios)
{
    TempDir out;
    std::vector<std::string> args{"lca", "--out", out.path().string()};
    for (const auto& n : named_scenarios()) {
        if (n.starts_with("machining")) {
            args.insert(args.end(), {"--scenario", n});
        }
    }
    ASSERT_EQ(wearlca_cli(args).code, 0);
    const auto doc = json::parse(test::read_file(out / "comparison.json"));
    ASSERT_EQ(doc.at("scenarios").size(), 6u);
    for (const auto& s : doc.at("scenarios")) {
        EXPECT_EQ(s.at("values").size(), 18u);
    }
    EXPECT_EQ(doc.at("baseline_id"), "machining:baseline");
}

TEST(Cli, LcaAnodeEuDelta)
{
    TempDir out;
    ASSERT_EQ(wearlca_cli({"lca", "--scenario", "anode:eu:base", "--scenario", "anode:eu:reman", "--out", out.path().string()}).code, 0);
    const auto cmp = reports::comparison_from_json(json::parse(test::read_file(out / "comparison.json")));
    EXPECT_NEAR(*cmp.scenarios[1].percent_delta[0], -44.79, 5.0);
    EXPECT_FALSE(cmp.scenarios[1].impact_transfer);
}

TEST(Cli, LcaUnknownScenario)
{
    TempDir out;
    const auto r = wearlca_cli({"lca", "--scenario", "machining:l99", "--out", out.path().string()});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("machining:l99"), std::string::npos);
}

TEST(Cli, LcaScenarioFile)
{
    TempDir dir;
    test::write_text(dir / "s.json", R"({"schema_version":1,"id":"mine","case":"machining","parameters":{"lifespan_factor":1.2,"speed_factor":1.5,"cv_assisted":true}})");
    ASSERT_EQ(wearlca_cli({"lca", "--scenario", "machining:l20s50", "--scenario", (dir / "s.json").string(), "--out", (dir / "o").string()}).code,
              0);
    const auto results = reports::parse_impacts_csv(test::read_file(dir / "o" / "impacts.csv"));
    ASSERT_EQ(results.size(), 2u);
    EXPECT_EQ(results[1].scenario_id, "mine");
    EXPECT_EQ(results[0].values, results[1].values);
}

TEST(Cli, FactorsOverride)
{
    TempDir dir;
    const auto registry = FlowRegistry::load(test::data_dir() / "flows.csv");
    const auto table = CharacterizationTable::load(test::data_dir() / "example-factors.csv", registry);
    // every factor doubled
    std::string doubled = "flow_id,indicator,factor,unit,provenance\n";
    for (const auto& f : registry.flows()) {
        for (std::size_t i = 0; i < 18; ++i) {
            if (const auto* factor = table.find(f.id, i)) {
                doubled += fmt::format("{},{},{},\"{}\",test\n", f.id, midpoint_indicators()[i].id, csv::format_number(factor->value * 2.0), factor->unit);
            }
        }
    }
    test::write_text(dir / "double.csv", doubled);

    ASSERT_EQ(wearlca_cli({"lca", "--scenario", "machining:baseline", "--factors", (dir / "double.csv").string(), "--out", (dir / "a").string()}).code,
              0);
    EXPECT_NEAR(reports::parse_impacts_csv(test::read_file(dir / "a" / "impacts.csv"))[0].value(kGlobalWarming), 2 * 8.013, 2e-3);

    ::setenv("WEARLCA_FACTORS", (dir / "double.csv").c_str(), 1);
    const auto r = wearlca_cli({"lca", "--scenario", "machining:baseline", "--out", (dir / "b").string()});
    ::unsetenv("WEARLCA_FACTORS");
    ASSERT_EQ(r.code, 0);
    EXPECT_EQ(test::read_file(dir / "a" / "impacts.csv"), test::read_file(dir / "b" / "impacts.csv"));

    EXPECT_EQ(wearlca_cli({"lca", "--scenario", "machining:baseline", "--factors", (dir / "none.csv").string(), "--out", (dir / "c").string()}).code,
              2);
}

TEST(Cli, UsageErrors)
{
    EXPECT_EQ(wearlca_cli({}).code, 1);
    EXPECT_EQ(wearlca_cli({"dance"}).code, 1);
    EXPECT_EQ(wearlca_cli({"evaluate"}).code, 1);
    EXPECT_EQ(wearlca_cli({"--help"}).code, 0);
}

TEST(CliProperty, ByteIdenticalReruns)
{
    const std::vector<std::vector<std::string>> commands = {
        {"evaluate", "--manifest", machining_manifest()},
        {"evaluate", "--manifest", anode_manifest(), "--mode", "per-image"},
        {"profile", "--manifest", anode_manifest()},
        {"track", "--manifest", anode_manifest(), "--coverage", "0.1", "--pixel-pitch", "2"},
        {"lca", "--scenario", "machining:baseline", "--scenario", "machining:l20", "--scenario", "machining:l20s50",
         "--scenario", "anode:eu:base"},
    };
    for (const auto& cmd : commands) {
        TempDir a;
        TempDir b;
        auto args_a = cmd;
        args_a.insert(args_a.end(), {"--out", a.path().string()});
        auto args_b = cmd;
        args_b.insert(args_b.end(), {"--out", b.path().string()});
        const auto ra = wearlca_cli(args_a);
        const auto rb = wearlca_cli(args_b);
        ASSERT_EQ(ra.code, 0) << cmd[0] << ra.err;
        ASSERT_EQ(rb.code, 0);
        EXPECT_EQ(ra.out, rb.out);
        const auto fa = directory_bytes(a.path());
        EXPECT_FALSE(fa.empty());
        EXPECT_EQ(fa, directory_bytes(b.path())) << cmd[0];
    }
}
