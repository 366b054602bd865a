#include "wearlca/cli.hpp"
#include "wearlca/error.hpp"
#include "wearlca/manifest.hpp"
#include "wearlca/metrics.hpp"
#include "wearlca/reports.hpp"
#include "wearlca/scenarios.hpp"
#include "wearlca/service.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include <cstdlib>
#include <fstream>
#include <map>
#include <ostream>

namespace wearlca::cli {

namespace {

using nlohmann::json;

#ifndef WEARLCA_DATA_DIR
#define WEARLCA_DATA_DIR "data"
#endif

struct Options
{
    fs::path manifest;
    fs::path out = ".";
    std::vector<std::string> scenarios;
    std::optional<fs::path> factors;
    std::optional<fs::path> flows;
    std::string format;
    std::string mode = "pooled";
    double coverage = 0.0;
    double pixel_pitch = 0.0;
    int port = 8080;
    fs::path workspace = ".";
    std::optional<fs::path> ui_dir;
    std::string host = "0.0.0.0";
};

// Thrown for failures that map onto an exit code directly.
struct Exit
{
    int code;
    std::string message;
};

bool wants(const Options& opt, std::string_view format)
{
    return opt.format.empty() || opt.format == format;
}

void write_file(const fs::path& path, std::string_view content)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw Exit{kExitUsage, fmt::format("cannot write {}", path.string())};
    }
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) {
        throw Exit{kExitUsage, fmt::format("cannot write {}", path.string())};
    }
}

void prepare_out(const fs::path& dir)
{
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (!fs::is_directory(dir)) {
        throw Exit{kExitUsage, fmt::format("output directory {} is not usable", dir.string())};
    }
}

std::string pretty(const json& doc)
{
    return doc.dump(2) + "\n";
}

DatasetManifest checked_manifest(const fs::path& path)
{
    try {
        auto manifest = load_manifest(path);
        validate_manifest(manifest);
        return manifest;
    } catch (const Error& e) {
        throw Exit{kExitInvalidInput, e.what()};
    }
}

fs::path data_path(std::string_view name)
{
    return fs::path(WEARLCA_DATA_DIR) / name;
}

std::pair<FlowRegistry, CharacterizationTable> load_tables(const Options& opt)
{
    fs::path factors = data_path("example-factors.csv");
    if (const char* env = std::getenv("WEARLCA_FACTORS"); env != nullptr && *env != '\0') {
        factors = env;
    }
    if (opt.factors) {
        factors = *opt.factors;
    }
    try {
        auto registry = FlowRegistry::load(opt.flows.value_or(data_path("flows.csv")));
        auto table = CharacterizationTable::load(factors, registry);
        return {std::move(registry), std::move(table)};
    } catch (const Error& e) {
        throw Exit{kExitInvalidInput, e.what()};
    }
}

const fs::path& summary_source(const ManifestRecord& rec)
{
    return rec.prediction ? *rec.prediction : rec.ground_truth;
}

int cmd_evaluate(const Options& opt, std::ostream& out)
{
    const auto manifest = checked_manifest(opt.manifest);
    const auto& map = *manifest.class_map;

    std::vector<SegmentationMask> preds;
    std::vector<SegmentationMask> gts;
    for (const auto& rec : manifest.records) {
        if (rec.role != Role::Test) {
            continue;
        }
        if (!rec.prediction) {
            throw Exit{kExitInvalidInput, fmt::format("no prediction for image_id {}", rec.image_id)};
        }
        preds.push_back(load_mask(*rec.prediction, map));
        gts.push_back(load_mask(rec.ground_truth, map));
    }
    if (preds.empty()) {
        throw Exit{kExitInvalidInput, "manifest has an empty test split"};
    }

    const auto mode = opt.mode == "per-image" ? Aggregation::PerImage : Aggregation::Pooled;
    MetricReport report;
    try {
        std::vector<MaskPair> pairs;
        for (std::size_t i = 0; i < preds.size(); ++i) {
            pairs.push_back({preds[i], gts[i]});
        }
        report = dataset_metrics(pairs, map, mode);
    } catch (const Error& e) {
        throw Exit{kExitComputation, e.what()};
    }

    prepare_out(opt.out);
    if (wants(opt, "json")) {
        write_file(opt.out / "report.json", pretty(reports::to_json(report)));
    }
    if (wants(opt, "csv")) {
        write_file(opt.out / "report.csv", reports::metric_report_csv(report));
    }
    fmt::print(out, "{} test images, mean_dsc {}, pixel_accuracy {}\n", report.image_count,
               reports::fixed3(report.mean_dsc), reports::fixed3(report.pixel_accuracy));
    return kExitOk;
}

int cmd_profile(const Options& opt, std::ostream& out)
{
    const auto manifest = checked_manifest(opt.manifest);
    std::vector<WearSummary> summaries;
    summaries.reserve(manifest.records.size());
    for (const auto& rec : manifest.records) {
        summaries.push_back(summarize(load_mask(summary_source(rec), *manifest.class_map), rec.image_id));
    }

    ProcessWearProfile profile;
    try {
        profile = aggregate(summaries);
    } catch (const MixedFamilies& e) {
        throw Exit{kExitInvalidInput, e.what()};
    } catch (const DuplicateImageId& e) {
        throw Exit{kExitInvalidInput, e.what()};
    } catch (const EmptyInput& e) {
        throw Exit{kExitInvalidInput, e.what()};
    }

    prepare_out(opt.out);
    if (wants(opt, "json")) {
        write_file(opt.out / "profile.json", pretty(reports::to_json(profile)));
    }
    if (wants(opt, "csv")) {
        write_file(opt.out / "summary.csv", reports::summary_csv(summaries));
    }
    fmt::print(out, "profiled {} images\n", summaries.size());
    return kExitOk;
}

int cmd_track(const Options& opt, std::ostream& out)
{
    const auto manifest = checked_manifest(opt.manifest);
    const auto& map = *manifest.class_map;

    std::map<std::string, std::vector<const ManifestRecord*>> tracks;
    for (const auto& rec : manifest.records) {
        if (rec.parent_track_id && rec.patch_offset) {
            tracks[*rec.parent_track_id].push_back(&rec);
        }
    }
    if (tracks.empty()) {
        throw Exit{kExitInvalidInput, "manifest has no records with parent_track_id and patch_offset"};
    }

    json doc = {{"schema_version", reports::kSchemaVersion}, {"class_map", map.ref()}, {"tracks", json::array()}};
    for (const auto& [track_id, records] : tracks) {
        std::vector<SegmentationMask> masks;
        masks.reserve(records.size());
        std::vector<PlacedPatch> patches;
        std::size_t width = 0;
        std::size_t height = 0;
        for (const auto* rec : records) {
            masks.push_back(load_mask(summary_source(*rec), map));
        }
        for (std::size_t i = 0; i < records.size(); ++i) {
            const auto& off = *records[i]->patch_offset;
            patches.push_back({masks[i], off});
            width = std::max(width, off.x + masks[i].width());
            height = std::max(height, off.y + masks[i].height());
        }
        try {
            const auto stitched = stitch(patches, width, height);
            const auto summary = summarize(stitched.mask, track_id);
            const auto estimate = extrapolate(summary, opt.coverage, opt.pixel_pitch);
            doc["tracks"].push_back({
                {"track_id", track_id},
                {"patches", records.size()},
                {"canvas", {{"width", width}, {"height", height}}},
                {"uncovered_pixels", stitched.uncovered_pixels},
                {"overlap_pixels", stitched.overlap_pixels},
                {"conflict_pixels", stitched.conflict_pixels},
                {"summary", reports::to_json(summary)},
                {"estimate", reports::to_json(estimate)},
            });
        } catch (const NonPositiveCoverage& e) {
            throw Exit{kExitInvalidInput, e.what()};
        } catch (const InvalidArgument& e) {
            throw Exit{kExitInvalidInput, e.what()};
        } catch (const Error& e) {
            throw Exit{kExitComputation, e.what()};
        }
    }

    prepare_out(opt.out);
    write_file(opt.out / "tracks.json", pretty(doc));
    fmt::print(out, "stitched {} tracks\n", tracks.size());
    return kExitOk;
}

int cmd_lca(const Options& opt, std::ostream& out)
{
    const auto [registry, table] = load_tables(opt);

    std::vector<Scenario> scenarios;
    for (const auto& spec : opt.scenarios) {
        try {
            if (is_named_scenario(spec)) {
                scenarios.push_back(named_scenario(spec));
            } else if (fs::is_regular_file(spec)) {
                scenarios.push_back(load_scenario_file(spec, registry));
            } else {
                throw UnknownScenario("unknown scenario '{}'", spec);
            }
        } catch (const Error& e) {
            throw Exit{kExitInvalidInput, e.what()};
        }
    }

    std::vector<ImpactResult> results;
    try {
        for (const auto& s : scenarios) {
            results.push_back(characterize(s, table, registry));
        }
    } catch (const Error& e) {
        throw Exit{kExitComputation, e.what()};
    }

    prepare_out(opt.out);
    write_file(opt.out / "impacts.csv", reports::impacts_csv(results));
    if (results.size() > 1) {
        try {
            const auto comparison = compare(results, results.front().scenario_id);
            write_file(opt.out / "comparison.json", pretty(reports::to_json(comparison)));
        } catch (const Error& e) {
            throw Exit{kExitComputation, e.what()};
        }
    }
    for (const auto& r : results) {
        fmt::print(out, "{}: global_warming {} kg CO2 eq\n", r.scenario_id, reports::fixed3(r.value(kGlobalWarming)));
    }
    return kExitOk;
}

int cmd_serve(const Options& opt, std::ostream& out)
{
    auto [registry, table] = load_tables(opt);
    service::Workspace workspace(opt.workspace);
    service::Api api(workspace, std::move(registry), std::move(table));
    service::Server server(api, {opt.host, opt.port, opt.ui_dir});
    fmt::print(out, "serving {} on http://{}:{}/\n", opt.workspace.string(), opt.host, opt.port);
    out.flush();
    return server.listen() ? kExitOk : kExitUsage;
}

}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    Options opt;
    CLI::App app{"Wear segmentation metrics, wear profiles and life cycle assessment", "wearlca"};
    app.require_subcommand(1);

    const auto add_format = [&](CLI::App* cmd) {
        cmd->add_option("--format", opt.format, "Write only one output format")->check(CLI::IsMember({"json", "csv"}));
    };

    auto* evaluate = app.add_subcommand("evaluate", "Segmentation metrics over the test split");
    evaluate->add_option("--manifest", opt.manifest, "Dataset manifest")->required();
    evaluate->add_option("--out", opt.out, "Output directory");
    evaluate->add_option("--mode", opt.mode, "Aggregation")->check(CLI::IsMember({"pooled", "per-image"}));
    add_format(evaluate);

    auto* profile = app.add_subcommand("profile", "Per-image wear summaries and the dataset profile");
    profile->add_option("--manifest", opt.manifest, "Dataset manifest")->required();
    profile->add_option("--out", opt.out, "Output directory");
    add_format(profile);

    auto* track = app.add_subcommand("track", "Stitch anode patches per focal track and extrapolate wear area");
    track->add_option("--manifest", opt.manifest, "Dataset manifest")->required();
    track->add_option("--out", opt.out, "Output directory");
    track->add_option("--coverage", opt.coverage, "Imaged fraction of the focal track, in (0, 1]")->required();
    track->add_option("--pixel-pitch", opt.pixel_pitch, "Edge length of one pixel")->required();

    auto* lca = app.add_subcommand("lca", "Characterize and compare scenarios");
    lca->add_option("--scenario", opt.scenarios, "Named scenario or scenario.json path (repeatable)")->required();
    lca->add_option("--out", opt.out, "Output directory");
    lca->add_option("--factors", opt.factors, "Characterization factor table (csv)");
    lca->add_option("--flows", opt.flows, "Flow registry (csv)");

    auto* serve = app.add_subcommand("serve", "Run the HTTP API");
    serve->add_option("--workspace", opt.workspace, "Directory of dataset manifests");
    serve->add_option("--serve-port", opt.port, "Port")->check(CLI::Range(0, 65535));
    serve->add_option("--host", opt.host, "Bind address");
    serve->add_option("--ui-dir", opt.ui_dir, "Built UI bundle served at /");
    serve->add_option("--factors", opt.factors, "Characterization factor table (csv)");
    serve->add_option("--flows", opt.flows, "Flow registry (csv)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (evaluate->parsed()) {
            return cmd_evaluate(opt, out);
        }
        if (profile->parsed()) {
            return cmd_profile(opt, out);
        }
        if (track->parsed()) {
            return cmd_track(opt, out);
        }
        if (lca->parsed()) {
            return cmd_lca(opt, out);
        }
        if (serve->parsed()) {
            return cmd_serve(opt, out);
        }
    } catch (const Exit& e) {
        fmt::print(err, "error: {}\n", e.message);
        return e.code;
    } catch (const Error& e) {
        fmt::print(err, "error: {}\n", e.what());
        return kExitInvalidInput;
    } catch (const std::exception& e) {
        fmt::print(err, "error: {}\n", e.what());
        return kExitUsage;
    }
    return kExitUsage;
}

}
