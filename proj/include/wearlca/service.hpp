#pragma once

#include "wearlca/analytics.hpp"
#include "wearlca/error.hpp"
#include "wearlca/lca.hpp"
#include "wearlca/manifest.hpp"
#include "wearlca/metrics.hpp"

#include <json.hpp>

#include <atomic>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

namespace httplib {
class Server;
}

namespace wearlca::service {

using nlohmann::json;

struct DatasetDescriptor
{
    std::string id;
    std::optional<ProductFamily> family;
    std::optional<SplitCounts> splits;
    std::optional<std::string> error;
};

/// Content fingerprint (FNV-1a 64) of a manifest and every file it references.
std::uint64_t dataset_fingerprint(const fs::path& manifest_path, const DatasetManifest& manifest);

/// Datasets found as *.json manifests in one directory, with lazily
/// computed summaries, profiles and metric reports. Cached entries are
/// rebuilt when the content fingerprint of their sources changes. Reads
/// share the workspace lock; reload() takes it exclusively.
class Workspace
{
public:
    explicit Workspace(fs::path root);

    void reload();
    const fs::path& root() const noexcept { return root_; }

    std::vector<DatasetDescriptor> datasets() const;

    /// nullopt when the dataset is unknown; throws the usual wear-core
    /// errors when its manifest is broken.
    std::optional<DatasetManifest> manifest(const std::string& id) const;
    std::optional<std::vector<WearSummary>> summaries(const std::string& id) const;
    std::optional<ProcessWearProfile> profile(const std::string& id) const;
    std::optional<MetricReport> metrics(const std::string& id) const;

    /// Number of cache rebuilds so far (observability for tests).
    std::size_t rebuild_count() const noexcept { return rebuilds_.load(); }

private:
    struct Cache
    {
        std::uint64_t fingerprint = 0;
        DatasetManifest manifest;
        std::vector<WearSummary> summaries;
        std::optional<ProcessWearProfile> profile;
        std::optional<MetricReport> metrics;
        std::optional<std::string> metrics_error;
    };

    struct Entry
    {
        fs::path manifest_path;
        mutable std::mutex mutex;
        mutable std::optional<Cache> cache;
    };

    const Entry* find(const std::string& id) const;
    /// Refreshes the entry's cache if its fingerprint moved; caller holds entry.mutex.
    const Cache& current(const Entry& entry) const;

    fs::path root_;
    mutable std::shared_mutex mutex_;
    std::map<std::string, std::unique_ptr<Entry>> entries_;
    mutable std::atomic<std::size_t> rebuilds_{0};
};

struct ApiResponse
{
    int status = 200;
    std::string body;
    std::string content_type = "application/json";
};

/// Route handlers as pure functions of (workspace content, request). Every
/// JSON body is serialized deterministically.
class Api
{
public:
    Api(Workspace& workspace, FlowRegistry registry, CharacterizationTable table);

    ApiResponse list_datasets() const;
    ApiResponse image(const std::string& dataset_id, const std::string& image_id) const;
    ApiResponse raw_image(const std::string& dataset_id, const std::string& image_id) const;
    ApiResponse profile(const std::string& dataset_id) const;
    ApiResponse summaries(const std::string& dataset_id) const;
    ApiResponse metrics(const std::string& dataset_id) const;
    ApiResponse whatif(const std::string& request_body) const;
    ApiResponse scenarios() const;

    Workspace& workspace() noexcept { return workspace_; }

private:
    Workspace& workspace_;
    FlowRegistry registry_;
    CharacterizationTable table_;
};

/// Validated what-if evaluation shared by the API and tests. Throws
/// InvalidArgument for malformed bodies and OutOfRange for parameters
/// outside lifespan [1, 2] / speed [1, 1.5].
json evaluate_whatif(const json& request, const FlowRegistry& registry, const CharacterizationTable& table);

class OutOfRange : public Error
{
public:
    using Error::Error;
};

struct ServerOptions
{
    std::string host = "0.0.0.0";
    int port = 8080;
    std::optional<fs::path> ui_dir; // static bundle served at "/"
};

/// HTTP front end over Api. Routes live under /api/.
class Server
{
public:
    Server(Api& api, ServerOptions options);
    ~Server();

    /// Blocks until stop().
    bool listen();
    /// Binds to an ephemeral port and returns it; use with listen_after_bind().
    int bind_to_any_port();
    bool listen_after_bind();
    void stop();
    bool is_running() const;
    void wait_until_ready() const;

private:
    Api& api_;
    ServerOptions options_;
    std::unique_ptr<httplib::Server> http_;
};

}
