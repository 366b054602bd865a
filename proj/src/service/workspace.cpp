#include "wearlca/error.hpp"
#include "wearlca/service.hpp"

#include <fstream>

namespace wearlca::service {

namespace {

constexpr std::uint64_t kFnvOffset = 1469598103934665603ull;
constexpr std::uint64_t kFnvPrime = 1099511628211ull;

void fnv_mix(std::uint64_t& h, const char* data, std::size_t n)
{
    for (std::size_t i = 0; i < n; ++i) {
        h ^= static_cast<unsigned char>(data[i]);
        h *= kFnvPrime;
    }
}

void fnv_file(std::uint64_t& h, const fs::path& path)
{
    fnv_mix(h, path.string().data(), path.string().size());
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        fnv_mix(h, "<missing>", 9);
        return;
    }
    char buf[1 << 16];
    while (in) {
        in.read(buf, sizeof(buf));
        fnv_mix(h, buf, static_cast<std::size_t>(in.gcount()));
    }
}

const fs::path& mask_for_summary(const ManifestRecord& rec)
{
    return rec.prediction ? *rec.prediction : rec.ground_truth;
}

}

std::uint64_t dataset_fingerprint(const fs::path& manifest_path, const DatasetManifest& manifest)
{
    std::uint64_t h = kFnvOffset;
    fnv_file(h, manifest_path);
    for (const auto& rec : manifest.records) {
        fnv_file(h, rec.ground_truth);
        if (rec.prediction) {
            fnv_file(h, *rec.prediction);
        }
    }
    return h;
}

Workspace::Workspace(fs::path root)
: root_(std::move(root))
{
    reload();
}

void Workspace::reload()
{
    std::map<std::string, std::unique_ptr<Entry>> fresh;
    if (fs::is_directory(root_)) {
        for (const auto& item : fs::directory_iterator(root_)) {
            if (item.is_regular_file() && item.path().extension() == ".json") {
                auto entry = std::make_unique<Entry>();
                entry->manifest_path = item.path();
                fresh.emplace(item.path().stem().string(), std::move(entry));
            }
        }
    }
    std::unique_lock lock(mutex_);
    entries_ = std::move(fresh);
}

const Workspace::Entry* Workspace::find(const std::string& id) const
{
    auto it = entries_.find(id);
    return it == entries_.end() ? nullptr : it->second.get();
}

const Workspace::Cache& Workspace::current(const Entry& entry) const
{
    auto manifest = load_manifest(entry.manifest_path);
    const auto fingerprint = dataset_fingerprint(entry.manifest_path, manifest);
    if (entry.cache && entry.cache->fingerprint == fingerprint) {
        return *entry.cache;
    }

    validate_manifest(manifest);
    Cache cache;
    cache.fingerprint = fingerprint;
    cache.manifest = std::move(manifest);
    const auto& map = *cache.manifest.class_map;

    std::vector<SegmentationMask> gts;
    std::vector<SegmentationMask> preds;
    for (const auto& rec : cache.manifest.records) {
        cache.summaries.push_back(summarize(load_mask(mask_for_summary(rec), map), rec.image_id));
        if (rec.role == Role::Test && rec.prediction) {
            gts.push_back(load_mask(rec.ground_truth, map));
            preds.push_back(load_mask(*rec.prediction, map));
        }
    }
    if (!cache.summaries.empty()) {
        cache.profile = aggregate(cache.summaries);
    }
    try {
        std::vector<MaskPair> pairs;
        for (std::size_t i = 0; i < gts.size(); ++i) {
            pairs.push_back({preds[i], gts[i]});
        }
        cache.metrics = dataset_metrics(pairs, map);
    } catch (const Error& e) {
        cache.metrics_error = e.what();
    }
    entry.cache = std::move(cache);
    ++rebuilds_;
    return *entry.cache;
}

std::vector<DatasetDescriptor> Workspace::datasets() const
{
    std::shared_lock lock(mutex_);
    std::vector<DatasetDescriptor> out;
    for (const auto& [id, entry] : entries_) {
        DatasetDescriptor d;
        d.id = id;
        try {
            std::lock_guard entry_lock(entry->mutex);
            const auto& cache = current(*entry);
            d.family = cache.manifest.class_map->family();
            d.splits = count_splits(cache.manifest);
        } catch (const Error& e) {
            d.error = e.what();
        }
        out.push_back(std::move(d));
    }
    return out;
}

std::optional<DatasetManifest> Workspace::manifest(const std::string& id) const
{
    std::shared_lock lock(mutex_);
    const auto* entry = find(id);
    if (entry == nullptr) {
        return std::nullopt;
    }
    std::lock_guard entry_lock(entry->mutex);
    return current(*entry).manifest;
}

std::optional<std::vector<WearSummary>> Workspace::summaries(const std::string& id) const
{
    std::shared_lock lock(mutex_);
    const auto* entry = find(id);
    if (entry == nullptr) {
        return std::nullopt;
    }
    std::lock_guard entry_lock(entry->mutex);
    return current(*entry).summaries;
}

std::optional<ProcessWearProfile> Workspace::profile(const std::string& id) const
{
    std::shared_lock lock(mutex_);
    const auto* entry = find(id);
    if (entry == nullptr) {
        return std::nullopt;
    }
    std::lock_guard entry_lock(entry->mutex);
    const auto& cache = current(*entry);
    if (!cache.profile) {
        throw EmptyInput("dataset {} has no records", id);
    }
    return cache.profile;
}

std::optional<MetricReport> Workspace::metrics(const std::string& id) const
{
    std::shared_lock lock(mutex_);
    const auto* entry = find(id);
    if (entry == nullptr) {
        return std::nullopt;
    }
    std::lock_guard entry_lock(entry->mutex);
    const auto& cache = current(*entry);
    if (!cache.metrics) {
        throw EmptyInput("dataset {}: {}", id, cache.metrics_error.value_or("no metrics"));
    }
    return cache.metrics;
}

}
