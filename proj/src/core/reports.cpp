#include "wearlca/reports.hpp"
#include "wearlca/csv.hpp"
#include "wearlca/error.hpp"

#include <algorithm>
#include <sstream>

namespace wearlca::reports {

namespace {

std::string_view to_string(Aggregation mode)
{
    return mode == Aggregation::Pooled ? "pooled" : "per_image";
}

Aggregation aggregation_from_string(std::string_view text)
{
    if (text == "pooled") {
        return Aggregation::Pooled;
    }
    if (text == "per_image") {
        return Aggregation::PerImage;
    }
    throw InvalidArgument("unknown aggregation '{}'", text);
}

ProductFamily family_from_string(std::string_view text)
{
    if (text == "MachiningTool") {
        return ProductFamily::MachiningTool;
    }
    if (text == "RotatingAnode") {
        return ProductFamily::RotatingAnode;
    }
    throw InvalidArgument("unknown product family '{}'", text);
}

json optional_number(const std::optional<double>& v)
{
    return v ? json(*v) : json(nullptr);
}

std::optional<double> optional_number(const json& v)
{
    return v.is_null() ? std::nullopt : std::optional<double>(v.get<double>());
}

json indicators_json(const std::vector<Indicator>& indicators)
{
    json out = json::array();
    for (const auto& i : indicators) {
        out.push_back({{"id", i.id}, {"unit", i.unit}});
    }
    return out;
}

std::vector<Indicator> indicators_from_json(const json& doc)
{
    std::vector<Indicator> out;
    for (const auto& i : doc) {
        out.push_back({i.at("id").get<std::string>(), i.at("unit").get<std::string>()});
    }
    return out;
}

}

std::string fixed3(double value)
{
    return fmt::format("{:.3f}", value);
}

json to_json(const MetricReport& report)
{
    const auto& map = ClassMap::from_ref(report.class_map_ref);
    json classes = json::array();
    for (const auto& c : report.per_class) {
        classes.push_back({
            {"class_id", c.class_id},
            {"name", map.at(c.class_id).name},
            {"dice", c.dice},
            {"absent", c.absent},
            {"predicted_pixels", c.predicted_pixels},
            {"ground_truth_pixels", c.ground_truth_pixels},
        });
    }
    json confusion = json::array();
    for (std::size_t g = 0; g < report.confusion.classes(); ++g) {
        json row = json::array();
        for (std::size_t p = 0; p < report.confusion.classes(); ++p) {
            row.push_back(report.confusion.at(g, p));
        }
        confusion.push_back(std::move(row));
    }
    json doc = {
        {"schema_version", kSchemaVersion},
        {"class_map", report.class_map_ref},
        {"aggregation", to_string(report.aggregation)},
        {"image_count", report.image_count},
        {"per_class", std::move(classes)},
        {"mean_dsc", report.mean_dsc},
        {"pixel_accuracy", report.pixel_accuracy},
        {"confusion", std::move(confusion)},
    };
    if (report.image_mean_accuracy) {
        doc["image_mean_accuracy"] = *report.image_mean_accuracy;
    }
    return doc;
}

MetricReport metric_report_from_json(const json& doc)
{
    MetricReport r;
    r.class_map_ref = doc.at("class_map").get<std::string>();
    ClassMap::from_ref(r.class_map_ref);
    r.aggregation = aggregation_from_string(doc.at("aggregation").get<std::string>());
    r.image_count = doc.at("image_count").get<std::size_t>();
    for (const auto& c : doc.at("per_class")) {
        ClassScore s;
        s.class_id = c.at("class_id").get<ClassId>();
        s.dice = c.at("dice").get<double>();
        s.absent = c.at("absent").get<bool>();
        s.predicted_pixels = c.at("predicted_pixels").get<std::uint64_t>();
        s.ground_truth_pixels = c.at("ground_truth_pixels").get<std::uint64_t>();
        r.per_class.push_back(s);
    }
    r.mean_dsc = doc.at("mean_dsc").get<double>();
    r.pixel_accuracy = doc.at("pixel_accuracy").get<double>();
    if (doc.contains("image_mean_accuracy")) {
        r.image_mean_accuracy = doc.at("image_mean_accuracy").get<double>();
    }
    const auto& rows = doc.at("confusion");
    r.confusion = ConfusionMatrix(rows.size());
    for (std::size_t g = 0; g < rows.size(); ++g) {
        if (rows[g].size() != rows.size()) {
            throw InvalidArgument("confusion matrix is not square");
        }
        for (std::size_t p = 0; p < rows.size(); ++p) {
            r.confusion.at(g, p) = rows[g][p].get<std::uint64_t>();
        }
    }
    return r;
}

std::string metric_report_csv(const MetricReport& report)
{
    const auto& map = ClassMap::from_ref(report.class_map_ref);
    std::ostringstream out;
    csv::write_row(out, {"class_id", "class_name", "dice", "absent", "predicted_pixels", "ground_truth_pixels"});
    for (const auto& c : report.per_class) {
        csv::write_row(out, {std::to_string(c.class_id), map.at(c.class_id).name, fixed3(c.dice), c.absent ? "true" : "false",
                             std::to_string(c.predicted_pixels), std::to_string(c.ground_truth_pixels)});
    }
    return out.str();
}

std::vector<ReportCsvRow> parse_metric_report_csv(std::string_view text)
{
    auto rows = csv::parse(text);
    if (rows.empty()) {
        throw InvalidTable("empty report.csv");
    }
    const auto& h = rows.front();
    const auto id = csv::column(h, "class_id");
    const auto name = csv::column(h, "class_name");
    const auto dice = csv::column(h, "dice");
    const auto absent = csv::column(h, "absent");
    const auto pred = csv::column(h, "predicted_pixels");
    const auto gt = csv::column(h, "ground_truth_pixels");
    std::vector<ReportCsvRow> out;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& row = rows[r];
        out.push_back({std::stoi(row.at(id)), row.at(name), csv::parse_number(row.at(dice)), row.at(absent) == "true",
                       std::stoull(row.at(pred)), std::stoull(row.at(gt))});
    }
    return out;
}

json to_json(const WearSummary& s)
{
    const auto& map = ClassMap::for_family(s.family);
    json classes = json::array();
    for (const auto& c : s.classes) {
        classes.push_back({
            {"class_id", c.class_id},
            {"name", map.at(c.class_id).name},
            {"pixels", c.pixels},
            {"fraction", c.fraction},
            {"region_count", c.region_count},
            {"largest_region", c.largest_region},
        });
    }
    return {
        {"image_id", s.image_id},
        {"family", wearlca::to_string(s.family)},
        {"width", s.width},
        {"height", s.height},
        {"support_pixels", s.support_pixels},
        {"classes", std::move(classes)},
        {"wear_extent", s.wear_extent ? json(*s.wear_extent) : json(nullptr)},
    };
}

WearSummary wear_summary_from_json(const json& doc)
{
    WearSummary s;
    s.image_id = doc.at("image_id").get<std::string>();
    s.family = family_from_string(doc.at("family").get<std::string>());
    s.width = doc.at("width").get<std::size_t>();
    s.height = doc.at("height").get<std::size_t>();
    s.support_pixels = doc.at("support_pixels").get<std::size_t>();
    for (const auto& c : doc.at("classes")) {
        s.classes.push_back({c.at("class_id").get<ClassId>(), c.at("pixels").get<std::size_t>(), c.at("fraction").get<double>(),
                             c.at("region_count").get<std::size_t>(), c.at("largest_region").get<std::size_t>()});
    }
    if (!doc.at("wear_extent").is_null()) {
        s.wear_extent = doc.at("wear_extent").get<std::size_t>();
    }
    return s;
}

std::string summary_csv(std::span<const WearSummary> summaries)
{
    std::ostringstream out;
    if (summaries.empty()) {
        return {};
    }
    const auto& map = ClassMap::for_family(summaries.front().family);
    csv::Row header = {"image_id", "width", "height", "support_pixels", "wear_extent"};
    for (const auto& c : map.classes()) {
        for (const char* field : {"pixels", "fraction", "regions", "largest_region"}) {
            header.push_back(c.name + "_" + field);
        }
    }
    csv::write_row(out, header);
    for (const auto& s : summaries) {
        csv::Row row = {s.image_id, std::to_string(s.width), std::to_string(s.height), std::to_string(s.support_pixels),
                        s.wear_extent ? std::to_string(*s.wear_extent) : std::string()};
        for (const auto& c : s.classes) {
            row.push_back(std::to_string(c.pixels));
            row.push_back(csv::format_number(c.fraction));
            row.push_back(std::to_string(c.region_count));
            row.push_back(std::to_string(c.largest_region));
        }
        csv::write_row(out, row);
    }
    return out.str();
}

std::vector<WearSummary> parse_summary_csv(std::string_view text, ProductFamily family)
{
    auto rows = csv::parse(text);
    std::vector<WearSummary> out;
    if (rows.empty()) {
        return out;
    }
    const auto& map = ClassMap::for_family(family);
    const auto& h = rows.front();
    const auto id = csv::column(h, "image_id");
    const auto width = csv::column(h, "width");
    const auto height = csv::column(h, "height");
    const auto support = csv::column(h, "support_pixels");
    const auto extent = csv::column(h, "wear_extent");
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& row = rows[r];
        if (row.size() != h.size()) {
            throw InvalidTable("summary.csv row {} has {} fields, expected {}", r + 1, row.size(), h.size());
        }
        WearSummary s;
        s.image_id = row[id];
        s.family = family;
        s.width = std::stoull(row[width]);
        s.height = std::stoull(row[height]);
        s.support_pixels = std::stoull(row[support]);
        if (!row[extent].empty()) {
            s.wear_extent = std::stoull(row[extent]);
        }
        for (const auto& c : map.classes()) {
            ClassWearStats stats;
            stats.class_id = c.id;
            stats.pixels = std::stoull(row[csv::column(h, c.name + "_pixels")]);
            stats.fraction = csv::parse_number(row[csv::column(h, c.name + "_fraction")]);
            stats.region_count = std::stoull(row[csv::column(h, c.name + "_regions")]);
            stats.largest_region = std::stoull(row[csv::column(h, c.name + "_largest_region")]);
            s.classes.push_back(stats);
        }
        out.push_back(std::move(s));
    }
    return out;
}

json to_json(const ProcessWearProfile& p)
{
    json classes = json::array();
    for (const auto& c : p.classes) {
        classes.push_back({
            {"class_id", c.class_id},
            {"name", c.name},
            {"fraction",
             {{"min", c.fraction.min},
              {"max", c.fraction.max},
              {"mean", c.fraction.mean},
              {"median", c.fraction.median},
              {"std", c.fraction.std}}},
            {"incidence", c.incidence},
            {"mean_region_count", c.mean_region_count},
            {"histogram", {{"lower", c.histogram.lower}, {"upper", c.histogram.upper}, {"counts", c.histogram.counts}}},
        });
    }
    return {
        {"schema_version", kSchemaVersion},
        {"family", wearlca::to_string(p.family)},
        {"n_tools", p.n_tools},
        {"image_ids", p.image_ids},
        {"classes", std::move(classes)},
    };
}

ProcessWearProfile profile_from_json(const json& doc)
{
    ProcessWearProfile p;
    p.family = family_from_string(doc.at("family").get<std::string>());
    p.n_tools = doc.at("n_tools").get<std::size_t>();
    p.image_ids = doc.at("image_ids").get<std::vector<std::string>>();
    for (const auto& c : doc.at("classes")) {
        ClassProfile cp;
        cp.class_id = c.at("class_id").get<ClassId>();
        cp.name = c.at("name").get<std::string>();
        const auto& f = c.at("fraction");
        cp.fraction = {f.at("min").get<double>(), f.at("max").get<double>(), f.at("mean").get<double>(),
                       f.at("median").get<double>(), f.at("std").get<double>()};
        cp.incidence = c.at("incidence").get<double>();
        cp.mean_region_count = c.at("mean_region_count").get<double>();
        const auto& h = c.at("histogram");
        cp.histogram = {h.at("lower").get<double>(), h.at("upper").get<double>(), h.at("counts").get<std::vector<std::size_t>>()};
        p.classes.push_back(std::move(cp));
    }
    return p;
}

json to_json(const FocalTrackEstimate& e)
{
    json classes = json::array();
    for (const auto& c : e.classes) {
        classes.push_back({{"class_id", c.class_id},
                           {"sampled_pixels", c.sampled_pixels},
                           {"estimated_pixels", c.estimated_pixels},
                           {"estimated_area", c.estimated_area}});
    }
    return {
        {"sampled_area", e.sampled_area},
        {"coverage_fraction", e.coverage_fraction},
        {"pixel_pitch", e.pixel_pitch},
        {"classes", std::move(classes)},
        {"assumption", e.assumption},
    };
}

json to_json(const Scenario& s)
{
    json inventory = json::array();
    for (const auto& f : s.inventory) {
        inventory.push_back({{"flow_id", f.flow_id}, {"amount", f.amount}, {"unit", wearlca::to_string(f.unit)}, {"source", f.source}});
    }
    json assumptions = json::array();
    for (const auto& a : s.assumptions) {
        assumptions.push_back({{"key", a.key}, {"value", a.value}, {"provenance", a.provenance}});
    }
    return {
        {"scenario_id", s.scenario_id},
        {"functional_unit",
         {{"description", s.functional_unit.description},
          {"quantity", s.functional_unit.quantity},
          {"unit", s.functional_unit.unit}}},
        {"inventory", std::move(inventory)},
        {"assumptions", std::move(assumptions)},
    };
}

json to_json(const ImpactResult& r)
{
    json values = json::object();
    for (std::size_t i = 0; i < r.indicators.size(); ++i) {
        values[r.indicators[i].id] = r.values[i];
    }
    json contributions = json::array();
    for (const auto& c : r.contributions) {
        contributions.push_back({{"flow_id", c.flow_id}, {"amount", c.amount}, {"unit", wearlca::to_string(c.unit)}, {"impacts", c.impacts}});
    }
    return {
        {"scenario_id", r.scenario_id},
        {"indicators", indicators_json(r.indicators)},
        {"values", std::move(values)},
        {"contributions", std::move(contributions)},
    };
}

std::string impacts_csv(std::span<const ImpactResult> results)
{
    std::ostringstream out;
    const auto& inds = midpoint_indicators();
    csv::Row header = {"scenario_id"};
    for (const auto& i : inds) {
        header.push_back(i.id);
    }
    csv::write_row(out, header);
    for (const auto& r : results) {
        csv::Row row = {r.scenario_id};
        for (const auto& i : inds) {
            row.push_back(csv::format_number(r.value(i.id)));
        }
        csv::write_row(out, row);
    }
    return out.str();
}

std::vector<ImpactResult> parse_impacts_csv(std::string_view text)
{
    auto rows = csv::parse(text);
    if (rows.empty()) {
        throw InvalidTable("empty impacts.csv");
    }
    const auto& h = rows.front();
    const auto id = csv::column(h, "scenario_id");
    std::vector<std::pair<std::size_t, Indicator>> columns;
    for (std::size_t c = 0; c < h.size(); ++c) {
        if (c == id) {
            continue;
        }
        auto idx = indicator_index(h[c]);
        if (!idx) {
            throw InvalidTable("impacts.csv: unknown indicator column '{}'", h[c]);
        }
        columns.emplace_back(c, midpoint_indicators()[*idx]);
    }
    std::vector<ImpactResult> out;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& row = rows[r];
        if (row.size() != h.size()) {
            throw InvalidTable("impacts.csv row {} has {} fields, expected {}", r + 1, row.size(), h.size());
        }
        ImpactResult result;
        result.scenario_id = row[id];
        for (const auto& [c, ind] : columns) {
            result.indicators.push_back(ind);
            result.values.push_back(csv::parse_number(row[c]));
        }
        out.push_back(std::move(result));
    }
    return out;
}

json to_json(const ScenarioComparison& cmp)
{
    const auto n = cmp.indicators.size();
    std::vector<double> max_value(n, 0.0);
    for (const auto& s : cmp.scenarios) {
        for (std::size_t i = 0; i < n; ++i) {
            max_value[i] = std::max(max_value[i], std::abs(s.values[i]));
        }
    }
    json scenarios = json::array();
    for (const auto& s : cmp.scenarios) {
        json percent = json::array();
        json normalized = json::array();
        for (std::size_t i = 0; i < n; ++i) {
            percent.push_back(optional_number(s.percent_delta[i]));
            normalized.push_back(max_value[i] == 0.0 ? json(0.0) : json(100.0 * s.values[i] / max_value[i]));
        }
        scenarios.push_back({
            {"scenario_id", s.scenario_id},
            {"values", s.values},
            {"absolute_delta", s.absolute_delta},
            {"percent_delta", std::move(percent)},
            {"rank", s.rank},
            {"impact_transfer", s.impact_transfer},
            {"increased_indicators", s.increased_indicators},
            {"relative_to_max", std::move(normalized)},
        });
    }
    return {
        {"schema_version", kSchemaVersion},
        {"baseline_id", cmp.baseline_id},
        {"indicators", indicators_json(cmp.indicators)},
        {"scenarios", std::move(scenarios)},
    };
}

ScenarioComparison comparison_from_json(const json& doc)
{
    ScenarioComparison cmp;
    cmp.baseline_id = doc.at("baseline_id").get<std::string>();
    cmp.indicators = indicators_from_json(doc.at("indicators"));
    for (const auto& s : doc.at("scenarios")) {
        ScenarioDelta d;
        d.scenario_id = s.at("scenario_id").get<std::string>();
        d.values = s.at("values").get<std::vector<double>>();
        d.absolute_delta = s.at("absolute_delta").get<std::vector<double>>();
        for (const auto& p : s.at("percent_delta")) {
            d.percent_delta.push_back(optional_number(p));
        }
        d.rank = s.at("rank").get<std::vector<std::size_t>>();
        d.impact_transfer = s.at("impact_transfer").get<bool>();
        d.increased_indicators = s.at("increased_indicators").get<std::vector<std::string>>();
        if (d.values.size() != cmp.indicators.size()) {
            throw IndicatorMismatch("scenario {} has {} values for {} indicators", d.scenario_id, d.values.size(), cmp.indicators.size());
        }
        cmp.scenarios.push_back(std::move(d));
    }
    return cmp;
}

}
