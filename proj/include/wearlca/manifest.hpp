#pragma once

#include "wearlca/class_map.hpp"
#include "wearlca/mask.hpp"

#include <optional>
#include <string>
#include <vector>

namespace wearlca {

enum class Role
{
    Train,
    Validation,
    Test,
};

std::string_view to_string(Role role);
Role role_from_string(std::string_view text);

struct PatchOffset
{
    std::size_t x = 0;
    std::size_t y = 0;

    bool operator==(const PatchOffset&) const = default;
};

struct ManifestRecord
{
    std::string image_id;
    Role role = Role::Train;
    fs::path ground_truth;
    std::optional<fs::path> prediction;
    std::optional<fs::path> image;     // raw microscope image, served as-is
    std::optional<PatchOffset> patch_offset;
    std::optional<std::string> parent_track_id;
};

/// A dataset: mask records sharing one class map. Relative paths in the
/// JSON document are resolved against the manifest's directory on load.
struct DatasetManifest
{
    const ClassMap* class_map = &ClassMap::machining_tool();
    std::vector<ManifestRecord> records;

    const ManifestRecord* find(std::string_view image_id) const;
};

struct SplitCounts
{
    std::size_t train = 0;
    std::size_t validation = 0;
    std::size_t test = 0;

    std::size_t total() const noexcept { return train + validation + test; }
    bool operator==(const SplitCounts&) const = default;
};

/// Parses a manifest document. Throws InvalidManifest on schema errors.
DatasetManifest load_manifest(const fs::path& path);
DatasetManifest parse_manifest(std::string_view json_text, const fs::path& base_dir);
std::string manifest_to_json(const DatasetManifest& manifest, const fs::path& base_dir);

/// Checks unique ids and that every referenced mask exists and parses under
/// the manifest's class map; returns per-role counts.
/// Errors: DuplicateImageId, MissingFile, ClassMapMismatch (plus the
/// load_mask errors for files that exist but do not parse).
SplitCounts validate_manifest(const DatasetManifest& manifest);

/// Counts roles without touching the filesystem.
SplitCounts count_splits(const DatasetManifest& manifest);

}
