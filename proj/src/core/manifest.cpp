#include "wearlca/manifest.hpp"
#include "wearlca/error.hpp"

#include <json.hpp>

#include <fstream>
#include <iterator>
#include <set>

namespace wearlca {

using nlohmann::json;

std::string_view to_string(Role role)
{
    switch (role) {
    case Role::Train:
        return "train";
    case Role::Validation:
        return "validation";
    case Role::Test:
        return "test";
    }
    return "train";
}

Role role_from_string(std::string_view text)
{
    if (text == "train") {
        return Role::Train;
    }
    if (text == "validation") {
        return Role::Validation;
    }
    if (text == "test") {
        return Role::Test;
    }
    throw InvalidManifest("unknown role '{}'", text);
}

const ManifestRecord* DatasetManifest::find(std::string_view image_id) const
{
    for (const auto& rec : records) {
        if (rec.image_id == image_id) {
            return &rec;
        }
    }
    return nullptr;
}

namespace {

fs::path resolve(const fs::path& base_dir, const std::string& text)
{
    fs::path p(text);
    return p.is_absolute() ? p : base_dir / p;
}

std::string relativize(const fs::path& base_dir, const fs::path& p)
{
    if (base_dir.empty()) {
        return p.generic_string();
    }
    return p.lexically_relative(base_dir).generic_string();
}

ManifestRecord parse_record(const json& item, const fs::path& base_dir)
{
    if (!item.is_object()) {
        throw InvalidManifest("record is not an object");
    }
    ManifestRecord rec;
    rec.image_id = item.at("image_id").get<std::string>();
    rec.role = role_from_string(item.at("role").get<std::string>());
    rec.ground_truth = resolve(base_dir, item.at("gt").get<std::string>());
    if (auto it = item.find("pred"); it != item.end() && !it->is_null()) {
        rec.prediction = resolve(base_dir, it->get<std::string>());
    }
    if (auto it = item.find("image"); it != item.end() && !it->is_null()) {
        rec.image = resolve(base_dir, it->get<std::string>());
    }
    if (auto it = item.find("patch_offset"); it != item.end() && !it->is_null()) {
        if (!it->is_array() || it->size() != 2) {
            throw InvalidManifest("{}: patch_offset must be [x, y]", rec.image_id);
        }
        rec.patch_offset = PatchOffset{(*it)[0].get<std::size_t>(), (*it)[1].get<std::size_t>()};
    }
    if (auto it = item.find("track_id"); it != item.end() && !it->is_null()) {
        rec.parent_track_id = it->get<std::string>();
    }
    return rec;
}

}

DatasetManifest parse_manifest(std::string_view json_text, const fs::path& base_dir)
{
    DatasetManifest manifest;
    try {
        const auto doc = json::parse(json_text);
        if (!doc.is_object()) {
            throw InvalidManifest("manifest must be a JSON object");
        }
        if (auto version = doc.value("schema_version", 1); version != 1) {
            throw InvalidManifest("unsupported manifest schema_version {}", version);
        }
        manifest.class_map = &ClassMap::from_ref(doc.at("class_map").get<std::string>());
        for (const auto& item : doc.at("records")) {
            if (item.contains("class_map")) {
                const auto& own = ClassMap::from_ref(item.at("class_map").get<std::string>());
                if (own.family() != manifest.class_map->family()) {
                    throw MixedFamilies("record {} is {} in a {} dataset", item.value("image_id", std::string("?")),
                                        to_string(own.family()), to_string(manifest.class_map->family()));
                }
            }
            manifest.records.push_back(parse_record(item, base_dir));
        }
    } catch (const json::exception& e) {
        throw InvalidManifest("malformed manifest: {}", e.what());
    } catch (const InvalidArgument& e) {
        throw InvalidManifest(e.what());
    }
    return manifest;
}

DatasetManifest load_manifest(const fs::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw MissingFile("manifest {} not found", path.string());
    }
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    try {
        return parse_manifest(text, path.parent_path());
    } catch (const InvalidManifest& e) {
        throw InvalidManifest("{}: {}", path.string(), e.what());
    }
}

std::string manifest_to_json(const DatasetManifest& manifest, const fs::path& base_dir)
{
    json records = json::array();
    for (const auto& rec : manifest.records) {
        json item = {
            {"image_id", rec.image_id},
            {"role", to_string(rec.role)},
            {"gt", relativize(base_dir, rec.ground_truth)},
        };
        if (rec.prediction) {
            item["pred"] = relativize(base_dir, *rec.prediction);
        }
        if (rec.image) {
            item["image"] = relativize(base_dir, *rec.image);
        }
        if (rec.patch_offset) {
            item["patch_offset"] = {rec.patch_offset->x, rec.patch_offset->y};
        }
        if (rec.parent_track_id) {
            item["track_id"] = *rec.parent_track_id;
        }
        records.push_back(std::move(item));
    }
    json doc = {{"schema_version", 1}, {"class_map", manifest.class_map->ref()}, {"records", std::move(records)}};
    return doc.dump(1) + "\n";
}

SplitCounts count_splits(const DatasetManifest& manifest)
{
    SplitCounts counts;
    for (const auto& rec : manifest.records) {
        switch (rec.role) {
        case Role::Train:
            ++counts.train;
            break;
        case Role::Validation:
            ++counts.validation;
            break;
        case Role::Test:
            ++counts.test;
            break;
        }
    }
    return counts;
}

SplitCounts validate_manifest(const DatasetManifest& manifest)
{
    std::set<std::string_view> seen;
    for (const auto& rec : manifest.records) {
        if (!seen.insert(rec.image_id).second) {
            throw DuplicateImageId("duplicate image_id '{}'", rec.image_id);
        }
    }
    for (const auto& rec : manifest.records) {
        for (const auto* path : {&rec.ground_truth, rec.prediction ? &*rec.prediction : nullptr}) {
            if (path == nullptr) {
                continue;
            }
            if (!fs::is_regular_file(*path)) {
                throw MissingFile("{}: file {} not found", rec.image_id, path->string());
            }
            load_mask(*path, *manifest.class_map);
        }
    }
    return count_splits(manifest);
}

}
