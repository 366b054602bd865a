#include "wearlca/reports.hpp"
#include "wearlca/scenarios.hpp"
#include "wearlca/service.hpp"

#include <httplib.h>

#include <fstream>
#include <sstream>

namespace wearlca::service {

namespace {

ApiResponse json_response(int status, const json& body)
{
    return {status, body.dump(), "application/json"};
}

ApiResponse error_response(int status, std::string_view message)
{
    return json_response(status, json{{"error", std::string(message)}});
}

ApiResponse not_found(std::string_view what)
{
    return error_response(404, fmt::format("unknown {}", what));
}

json class_map_json(const ClassMap& map)
{
    json classes = json::array();
    for (const auto& c : map.classes()) {
        classes.push_back({
            {"class_id", c.id},
            {"name", c.name},
            {"color", {c.display_color.r, c.display_color.g, c.display_color.b}},
        });
    }
    return {{"ref", map.ref()}, {"classes", std::move(classes)}};
}

json layer_json(const SegmentationMask& mask)
{
    return {
        {"width", mask.width()},
        {"height", mask.height()},
        {"labels", std::vector<int>(mask.labels().begin(), mask.labels().end())},
    };
}

json splits_json(const SplitCounts& s)
{
    return {{"train", s.train}, {"validation", s.validation}, {"test", s.test}};
}

std::string content_type_for(const fs::path& path)
{
    auto ext = path.extension().string();
    for (auto& ch : ext) {
        ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    }
    if (ext == ".png") {
        return "image/png";
    }
    if (ext == ".jpg" || ext == ".jpeg") {
        return "image/jpeg";
    }
    if (ext == ".tif" || ext == ".tiff") {
        return "image/tiff";
    }
    if (ext == ".pgm") {
        return "image/x-portable-graymap";
    }
    return "application/octet-stream";
}

double number_in_range(const json& params, const char* key, double fallback, double lo, double hi)
{
    if (!params.contains(key)) {
        return fallback;
    }
    const auto& v = params.at(key);
    if (!v.is_number()) {
        throw InvalidArgument("parameter {} must be a number", key);
    }
    const double x = v.get<double>();
    if (!(x >= lo && x <= hi)) {
        throw OutOfRange("parameter {} = {} outside [{}, {}]", key, x, lo, hi);
    }
    return x;
}

bool bool_param(const json& params, const char* key, bool fallback)
{
    if (!params.contains(key)) {
        return fallback;
    }
    if (!params.at(key).is_boolean()) {
        throw InvalidArgument("parameter {} must be a boolean", key);
    }
    return params.at(key).get<bool>();
}

template <typename F>
ApiResponse guarded(F&& body)
{
    try {
        return body();
    } catch (const OutOfRange& e) {
        return error_response(422, e.what());
    } catch (const InvalidArgument& e) {
        return error_response(400, e.what());
    } catch (const InvalidFactor& e) {
        return error_response(422, e.what());
    } catch (const EmptyInput& e) {
        return error_response(409, e.what());
    } catch (const std::exception& e) {
        return error_response(500, e.what());
    }
}

}

json evaluate_whatif(const json& request, const FlowRegistry& registry, const CharacterizationTable& table)
{
    if (!request.is_object() || !request.contains("case") || !request.at("case").is_string()) {
        throw InvalidArgument("request needs a string field 'case'");
    }
    const auto kind = request.at("case").get<std::string>();
    const auto params = request.value("parameters", json::object());
    if (!params.is_object()) {
        throw InvalidArgument("'parameters' must be an object");
    }

    Scenario scenario;
    Scenario baseline;
    if (kind == "machining") {
        MachiningParameters p;
        p.lifespan_factor = number_in_range(params, "lifespan_factor", 1.0, 1.0, 2.0);
        p.speed_factor = number_in_range(params, "speed_factor", 1.0, 1.0, 1.5);
        p.cv_assisted = bool_param(params, "cv_assisted", true);
        scenario = machining_scenario(p);
        baseline = named_scenario("machining:baseline");
    } else if (kind == "anode") {
        AnodeParameters p;
        const auto market = params.value("market", std::string("EU"));
        if (market == "EU" || market == "eu") {
            p.market = Market::EU;
        } else if (market == "NonEU" || market == "noneu" || market == "non-EU") {
            p.market = Market::NonEU;
        } else {
            throw InvalidArgument("unknown market '{}'", market);
        }
        p.remanufacture = bool_param(params, "remanufacture", true);
        p.production_energy_kwh = number_in_range(params, "production_energy_kwh", p.production_energy_kwh, 0.0,
                                                  std::numeric_limits<double>::max());
        p.refurbishment_fraction = number_in_range(params, "refurbishment_fraction", p.refurbishment_fraction, 0.0, 1.0);
        scenario = anode_scenario(p);
        baseline = named_scenario(p.market == Market::EU ? "anode:eu:base" : "anode:noneu:base");
    } else {
        throw InvalidArgument("unknown case '{}'", kind);
    }
    scenario.validate(registry);

    const std::vector<ImpactResult> results{characterize(baseline, table, registry), characterize(scenario, table, registry)};
    const auto comparison = compare(results, baseline.scenario_id);
    return {
        {"scenario", reports::to_json(scenario)},
        {"result", reports::to_json(results[1])},
        {"baseline", reports::to_json(results[0])},
        {"comparison", reports::to_json(comparison)},
    };
}

Api::Api(Workspace& workspace, FlowRegistry registry, CharacterizationTable table)
: workspace_(workspace)
, registry_(std::move(registry))
, table_(std::move(table))
{
}

ApiResponse Api::list_datasets() const
{
    return guarded([&] {
        json out = json::array();
        for (const auto& d : workspace_.datasets()) {
            json item = {{"id", d.id}};
            item["family"] = d.family ? json(std::string(to_string(*d.family))) : json(nullptr);
            item["splits"] = d.splits ? splits_json(*d.splits) : json(nullptr);
            if (d.error) {
                item["error"] = *d.error;
            }
            out.push_back(std::move(item));
        }
        return json_response(200, out);
    });
}

ApiResponse Api::image(const std::string& dataset_id, const std::string& image_id) const
{
    return guarded([&] {
        const auto manifest = workspace_.manifest(dataset_id);
        if (!manifest) {
            return not_found("dataset");
        }
        const auto* rec = manifest->find(image_id);
        if (rec == nullptr) {
            return not_found("image");
        }
        const auto& map = *manifest->class_map;
        const auto gt = load_mask(rec->ground_truth, map);
        std::optional<SegmentationMask> pred;
        if (rec->prediction) {
            pred = load_mask(*rec->prediction, map);
        }
        const auto summary = summarize(pred ? *pred : gt, rec->image_id);

        json layers = {
            {"image",
             rec->image ? json{{"href", fmt::format("/api/datasets/{}/raw/{}", dataset_id, image_id)}} : json(nullptr)},
            {"ground_truth", layer_json(gt)},
            {"prediction", pred ? layer_json(*pred) : json(nullptr)},
        };
        json out = {
            {"dataset_id", dataset_id},
            {"image_id", rec->image_id},
            {"role", std::string(to_string(rec->role))},
            {"layers", std::move(layers)},
            {"summary", reports::to_json(summary)},
            {"class_map", class_map_json(map)},
            {"patch_offset", rec->patch_offset ? json{{"x", rec->patch_offset->x}, {"y", rec->patch_offset->y}} : json(nullptr)},
            {"parent_track_id", rec->parent_track_id ? json(*rec->parent_track_id) : json(nullptr)},
        };
        return json_response(200, out);
    });
}

ApiResponse Api::raw_image(const std::string& dataset_id, const std::string& image_id) const
{
    return guarded([&] {
        const auto manifest = workspace_.manifest(dataset_id);
        if (!manifest) {
            return not_found("dataset");
        }
        const auto* rec = manifest->find(image_id);
        if (rec == nullptr || !rec->image) {
            return not_found("image");
        }
        std::ifstream in(*rec->image, std::ios::binary);
        if (!in) {
            return not_found("image file");
        }
        std::ostringstream buf;
        buf << in.rdbuf();
        return ApiResponse{200, buf.str(), content_type_for(*rec->image)};
    });
}

ApiResponse Api::profile(const std::string& dataset_id) const
{
    return guarded([&] {
        const auto p = workspace_.profile(dataset_id);
        return p ? json_response(200, reports::to_json(*p)) : not_found("dataset");
    });
}

ApiResponse Api::summaries(const std::string& dataset_id) const
{
    return guarded([&] {
        const auto s = workspace_.summaries(dataset_id);
        if (!s) {
            return not_found("dataset");
        }
        json out = json::array();
        for (const auto& item : *s) {
            out.push_back(reports::to_json(item));
        }
        return json_response(200, out);
    });
}

ApiResponse Api::metrics(const std::string& dataset_id) const
{
    return guarded([&] {
        const auto m = workspace_.metrics(dataset_id);
        return m ? json_response(200, reports::to_json(*m)) : not_found("dataset");
    });
}

ApiResponse Api::whatif(const std::string& request_body) const
{
    return guarded([&] {
        json request;
        try {
            request = json::parse(request_body);
        } catch (const json::exception& e) {
            throw InvalidArgument("request body is not JSON: {}", e.what());
        }
        return json_response(200, evaluate_whatif(request, registry_, table_));
    });
}

ApiResponse Api::scenarios() const
{
    return guarded([&] {
        json out = json::array();
        for (const auto& name : named_scenarios()) {
            out.push_back({{"id", name}, {"baseline", baseline_for(name)}});
        }
        return json_response(200, json{
                                          {"scenarios", std::move(out)},
                                          {"ranges",
                                           {{"lifespan_factor", {1.0, 2.0}},
                                            {"speed_factor", {1.0, 1.5}},
                                            {"refurbishment_fraction", {0.0, 1.0}}}},
                                      });
    });
}

namespace {

constexpr const char* kPlaceholderPage =
    "<!doctype html><html><head><meta charset=\"utf-8\"><title>wearlca</title></head>"
    "<body><h1>wearlca service</h1><p>No UI bundle is installed. The JSON API lives under "
    "<code>/api/</code>.</p></body></html>";

void send(httplib::Response& res, const ApiResponse& r)
{
    res.status = r.status;
    res.set_content(r.body, r.content_type);
}

}

Server::Server(Api& api, ServerOptions options)
: api_(api)
, options_(std::move(options))
, http_(std::make_unique<httplib::Server>())
{
    auto& http = *http_;
    http.Get("/api/datasets", [this](const httplib::Request&, httplib::Response& res) { send(res, api_.list_datasets()); });
    http.Get(R"(/api/datasets/([^/]+)/images/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
        send(res, api_.image(req.matches[1], req.matches[2]));
    });
    http.Get(R"(/api/datasets/([^/]+)/raw/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
        send(res, api_.raw_image(req.matches[1], req.matches[2]));
    });
    http.Get(R"(/api/datasets/([^/]+)/profile)", [this](const httplib::Request& req, httplib::Response& res) {
        send(res, api_.profile(req.matches[1]));
    });
    http.Get(R"(/api/datasets/([^/]+)/summaries)", [this](const httplib::Request& req, httplib::Response& res) {
        send(res, api_.summaries(req.matches[1]));
    });
    http.Get(R"(/api/datasets/([^/]+)/metrics)", [this](const httplib::Request& req, httplib::Response& res) {
        send(res, api_.metrics(req.matches[1]));
    });
    http.Get("/api/scenarios", [this](const httplib::Request&, httplib::Response& res) { send(res, api_.scenarios()); });
    http.Post("/api/lca/whatif", [this](const httplib::Request& req, httplib::Response& res) { send(res, api_.whatif(req.body)); });

    if (options_.ui_dir && fs::is_directory(*options_.ui_dir)) {
        http.set_mount_point("/", options_.ui_dir->string());
    } else {
        http.Get("/", [](const httplib::Request&, httplib::Response& res) { res.set_content(kPlaceholderPage, "text/html"); });
    }
}

Server::~Server()
{
    stop();
}

bool Server::listen()
{
    return http_->listen(options_.host, options_.port);
}

int Server::bind_to_any_port()
{
    return http_->bind_to_any_port(options_.host);
}

bool Server::listen_after_bind()
{
    return http_->listen_after_bind();
}

void Server::stop()
{
    if (http_) {
        http_->stop();
    }
}

bool Server::is_running() const
{
    return http_->is_running();
}

void Server::wait_until_ready() const
{
    http_->wait_until_ready();
}

}
