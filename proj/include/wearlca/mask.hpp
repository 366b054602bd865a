#pragma once

#include "wearlca/class_map.hpp"

#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

namespace wearlca {

namespace fs = std::filesystem;

/// Per-pixel class labels, row-major. Immutable once constructed; every
/// label is guaranteed to exist in the referenced class map.
class SegmentationMask
{
public:
    /// Throws DimensionMismatch when width * height != labels.size() and
    /// UnknownClassId on the first label outside the class map.
    SegmentationMask(std::size_t width, std::size_t height, std::vector<ClassId> labels, const ClassMap& class_map);

    std::size_t width() const noexcept { return width_; }
    std::size_t height() const noexcept { return height_; }
    std::size_t pixel_count() const noexcept { return labels_.size(); }
    std::span<const ClassId> labels() const noexcept { return labels_; }
    const ClassMap& class_map() const noexcept { return *class_map_; }

    ClassId at(std::size_t x, std::size_t y) const { return labels_[y * width_ + x]; }

    /// Pixel count per class id.
    std::vector<std::size_t> class_counts() const;

    bool operator==(const SegmentationMask& other) const;

private:
    std::size_t width_;
    std::size_t height_;
    std::vector<ClassId> labels_;
    const ClassMap* class_map_;
};

/// Model scores: one vector of |classes| values per pixel, pixel-major.
/// Scores need not be normalized but must be finite.
class ProbabilityMap
{
public:
    ProbabilityMap(std::size_t width, std::size_t height, std::size_t class_count, std::vector<double> scores);

    std::size_t width() const noexcept { return width_; }
    std::size_t height() const noexcept { return height_; }
    std::size_t class_count() const noexcept { return class_count_; }
    std::span<const double> pixel(std::size_t index) const
    {
        return std::span<const double>(scores_).subspan(index * class_count_, class_count_);
    }

private:
    std::size_t width_;
    std::size_t height_;
    std::size_t class_count_;
    std::vector<double> scores_;
};

/// Ties go to the lowest class id. Throws LengthMismatch when the score
/// vector length differs from the class map size.
SegmentationMask argmax_decode(const ProbabilityMap& probs, const ClassMap& class_map);

enum class MaskFormat
{
    Png,      // 8-bit grayscale
    Pgm,      // binary netpbm P5, maxval <= 255
    TextGrid, // rows of space-separated integers
};

/// Format from the extension: .png, .pgm, anything else is the text grid.
MaskFormat mask_format_for(const fs::path& path);

/// Reads a mask file. A sidecar "<path>.json" naming a different class map
/// raises ClassMapMismatch. Errors: UnreadableFile, UnknownClassId,
/// DimensionMismatch.
SegmentationMask load_mask(const fs::path& path, const ClassMap& class_map);

/// Writes the mask in the format implied by the extension. With
/// `with_sidecar`, also writes "<path>.json" naming the class map.
void write_mask(const fs::path& path, const SegmentationMask& mask, bool with_sidecar = false);

fs::path sidecar_path(const fs::path& mask_path);

}
