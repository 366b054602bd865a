#pragma once

#include "wearlca/class_map.hpp"
#include "wearlca/mask.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <span>
#include <vector>

namespace wearlca {

/// Confusion counts, rows = ground truth, columns = prediction.
class ConfusionMatrix
{
public:
    explicit ConfusionMatrix(std::size_t classes = 0)
    : n_(classes)
    , counts_(classes * classes, 0)
    {
    }

    std::size_t classes() const noexcept { return n_; }
    std::uint64_t at(std::size_t gt, std::size_t pred) const { return counts_[gt * n_ + pred]; }
    std::uint64_t& at(std::size_t gt, std::size_t pred) { return counts_[gt * n_ + pred]; }

    std::uint64_t trace() const;
    std::uint64_t total() const;
    std::uint64_t gt_total(std::size_t c) const;   // row sum
    std::uint64_t pred_total(std::size_t c) const; // column sum

    ConfusionMatrix& operator+=(const ConfusionMatrix& other);
    bool operator==(const ConfusionMatrix&) const = default;

private:
    std::size_t n_;
    std::vector<std::uint64_t> counts_;
};

enum class Aggregation
{
    Pooled,   // counts summed over every pixel of every pair, then Dice per class
    PerImage, // Dice per image, averaged over the images where the class occurs
};

struct ClassScore
{
    ClassId class_id = 0;
    double dice = 0.0;
    bool absent = false; // in neither prediction nor ground truth anywhere
    std::uint64_t predicted_pixels = 0;
    std::uint64_t ground_truth_pixels = 0;
};

struct MetricReport
{
    std::string class_map_ref;
    Aggregation aggregation = Aggregation::Pooled;
    std::size_t image_count = 0;
    std::vector<ClassScore> per_class;
    double mean_dsc = 0.0;
    double pixel_accuracy = 0.0;                 // trace / sum of the pooled confusion matrix
    std::optional<double> image_mean_accuracy;   // PerImage mode only
    ConfusionMatrix confusion;
};

struct MaskPair
{
    std::reference_wrapper<const SegmentationMask> pred;
    std::reference_wrapper<const SegmentationMask> gt;
};

/// Throws DimensionMismatch when sizes or class maps differ.
ConfusionMatrix confusion_matrix(const SegmentationMask& pred, const SegmentationMask& gt);

/// 2|P ∩ G| / (|P| + |G|) for class c; 1 when c is in neither mask.
/// Errors: DimensionMismatch, UnknownClass.
double class_dice(const SegmentationMask& pred, const SegmentationMask& gt, ClassId c);

/// Dice for class c straight from confusion counts (1 when c is absent).
double dice_from_confusion(const ConfusionMatrix& confusion, std::size_t c);

/// Errors: EmptyInput, DimensionMismatch.
MetricReport dataset_metrics(std::span<const MaskPair> pairs, const ClassMap& class_map,
                             Aggregation mode = Aggregation::Pooled);

/// Pooled fraction of pixels where prediction equals ground truth.
double pixel_accuracy(std::span<const MaskPair> pairs);

}
