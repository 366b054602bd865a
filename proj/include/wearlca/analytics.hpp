#pragma once

#include "wearlca/class_map.hpp"
#include "wearlca/manifest.hpp"
#include "wearlca/mask.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace wearlca {

struct ClassWearStats
{
    ClassId class_id = 0;
    std::size_t pixels = 0;
    double fraction = 0.0;            // of the counted support
    std::size_t region_count = 0;     // 4-connected components
    std::size_t largest_region = 0;   // pixels
};

/// Per-image wear statistics.
///
/// Machining tools: fractions are taken over non-background pixels, so tools
/// imaged at different zoom levels compare; an all-background mask has all
/// fractions 0. Rotating anodes have no background and use all pixels.
struct WearSummary
{
    std::string image_id;
    ProductFamily family = ProductFamily::MachiningTool;
    std::size_t width = 0;
    std::size_t height = 0;
    std::size_t support_pixels = 0;
    std::vector<ClassWearStats> classes;  // one entry per class id
    std::optional<std::size_t> wear_extent; // machining only: longest vertical wear run

    const ClassWearStats& at(ClassId c) const { return classes.at(c); }
};

WearSummary summarize(const SegmentationMask& mask, std::string image_id = {});

/// Labels 4-connected components of one class; returns component sizes.
std::vector<std::size_t> component_sizes(const SegmentationMask& mask, ClassId c);

struct Distribution
{
    double min = 0.0;
    double max = 0.0;
    double mean = 0.0;
    double median = 0.0; // lower median for even counts
    double std = 0.0;    // population standard deviation
};

struct Histogram
{
    double lower = 0.0;
    double upper = 1.0;
    std::vector<std::size_t> counts; // equal-width bins, last bin closed
};

struct ClassProfile
{
    ClassId class_id = 0;
    std::string name;
    Distribution fraction;
    double incidence = 0.0; // share of tools where the class is present
    Histogram histogram;
    double mean_region_count = 0.0;
};

/// Cross-tool aggregate of wear summaries (classes counted in the support
/// only, i.e. background excluded for machining tools).
struct ProcessWearProfile
{
    ProductFamily family = ProductFamily::MachiningTool;
    std::size_t n_tools = 0;
    std::vector<std::string> image_ids; // sorted
    std::vector<ClassProfile> classes;
};

inline constexpr std::size_t kHistogramBins = 10;

Distribution describe(std::vector<double> values);
Histogram histogram(std::span<const double> values, std::size_t bins = kHistogramBins);

/// Order-invariant. Errors: EmptyInput, MixedFamilies, DuplicateImageId.
ProcessWearProfile aggregate(std::span<const WearSummary> summaries);

struct PlacedPatch
{
    std::reference_wrapper<const SegmentationMask> mask;
    PatchOffset offset;
};

struct StitchResult
{
    SegmentationMask mask;
    std::size_t uncovered_pixels = 0;
    std::size_t overlap_pixels = 0;    // canvas pixels written more than once
    std::size_t conflict_pixels = 0;   // overlaps where a later patch changed the label
};

/// Canvas starts as class 0; patches are written in list order, so the last
/// patch wins on overlap. Errors: PatchOutOfBounds, DimensionMismatch
/// (mixed class maps), EmptyInput (no patches).
StitchResult stitch(std::span<const PlacedPatch> patches, std::size_t canvas_width, std::size_t canvas_height);

struct ClassAreaEstimate
{
    ClassId class_id = 0;
    std::size_t sampled_pixels = 0;
    double estimated_pixels = 0.0;
    double estimated_area = 0.0; // pixel_pitch^2 units (e.g. um^2 for pitch in um)
};

struct FocalTrackEstimate
{
    std::size_t sampled_area = 0; // pixels
    double coverage_fraction = 1.0;
    double pixel_pitch = 1.0;
    std::vector<ClassAreaEstimate> classes;
    std::string assumption;
};

/// Linear scale-up of sampled class areas by 1 / coverage_fraction.
/// Errors: NonPositiveCoverage (coverage outside (0, 1]), InvalidArgument
/// (pixel_pitch not positive).
FocalTrackEstimate extrapolate(const WearSummary& sample, double coverage_fraction, double pixel_pitch);

}
