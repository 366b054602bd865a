#include "wearlca/metrics.hpp"
#include "wearlca/error.hpp"

#include <numeric>

namespace wearlca {

std::uint64_t ConfusionMatrix::trace() const
{
    std::uint64_t sum = 0;
    for (std::size_t c = 0; c < n_; ++c) {
        sum += at(c, c);
    }
    return sum;
}

std::uint64_t ConfusionMatrix::total() const
{
    return std::accumulate(counts_.begin(), counts_.end(), std::uint64_t{0});
}

std::uint64_t ConfusionMatrix::gt_total(std::size_t c) const
{
    std::uint64_t sum = 0;
    for (std::size_t p = 0; p < n_; ++p) {
        sum += at(c, p);
    }
    return sum;
}

std::uint64_t ConfusionMatrix::pred_total(std::size_t c) const
{
    std::uint64_t sum = 0;
    for (std::size_t g = 0; g < n_; ++g) {
        sum += at(g, c);
    }
    return sum;
}

ConfusionMatrix& ConfusionMatrix::operator+=(const ConfusionMatrix& other)
{
    if (other.n_ != n_) {
        throw DimensionMismatch("confusion matrices of {} and {} classes", n_, other.n_);
    }
    for (std::size_t i = 0; i < counts_.size(); ++i) {
        counts_[i] += other.counts_[i];
    }
    return *this;
}

namespace {

void check_pair(const SegmentationMask& pred, const SegmentationMask& gt)
{
    if (pred.width() != gt.width() || pred.height() != gt.height()) {
        throw DimensionMismatch("prediction is {}x{}, ground truth is {}x{}", pred.width(), pred.height(), gt.width(), gt.height());
    }
    if (!(pred.class_map() == gt.class_map())) {
        throw DimensionMismatch("prediction uses class map {}, ground truth uses {}", pred.class_map().ref(), gt.class_map().ref());
    }
}

}

ConfusionMatrix confusion_matrix(const SegmentationMask& pred, const SegmentationMask& gt)
{
    check_pair(pred, gt);
    const auto n = gt.class_map().size();
    ConfusionMatrix m(n);
    auto p = pred.labels();
    auto g = gt.labels();
    for (std::size_t i = 0; i < g.size(); ++i) {
        ++m.at(g[i], p[i]);
    }
    return m;
}

double dice_from_confusion(const ConfusionMatrix& confusion, std::size_t c)
{
    const auto denom = confusion.gt_total(c) + confusion.pred_total(c);
    if (denom == 0) {
        return 1.0;
    }
    return 2.0 * static_cast<double>(confusion.at(c, c)) / static_cast<double>(denom);
}

double class_dice(const SegmentationMask& pred, const SegmentationMask& gt, ClassId c)
{
    check_pair(pred, gt);
    if (!gt.class_map().contains(c)) {
        throw UnknownClass("class {} not in class map {}", c, gt.class_map().ref());
    }
    std::uint64_t inter = 0;
    std::uint64_t in_pred = 0;
    std::uint64_t in_gt = 0;
    auto p = pred.labels();
    auto g = gt.labels();
    for (std::size_t i = 0; i < g.size(); ++i) {
        const bool a = p[i] == c;
        const bool b = g[i] == c;
        inter += a && b;
        in_pred += a;
        in_gt += b;
    }
    if (in_pred + in_gt == 0) {
        return 1.0;
    }
    return 2.0 * static_cast<double>(inter) / static_cast<double>(in_pred + in_gt);
}

MetricReport dataset_metrics(std::span<const MaskPair> pairs, const ClassMap& class_map, Aggregation mode)
{
    if (pairs.empty()) {
        throw EmptyInput("no prediction/ground-truth pairs");
    }
    const auto n = class_map.size();
    MetricReport report;
    report.class_map_ref = class_map.ref();
    report.aggregation = mode;
    report.image_count = pairs.size();
    report.confusion = ConfusionMatrix(n);

    std::vector<ConfusionMatrix> per_image;
    per_image.reserve(pairs.size());
    for (const auto& pair : pairs) {
        if (!(pair.gt.get().class_map() == class_map)) {
            throw DimensionMismatch("pair uses class map {}, expected {}", pair.gt.get().class_map().ref(), class_map.ref());
        }
        per_image.push_back(confusion_matrix(pair.pred, pair.gt));
        report.confusion += per_image.back();
    }

    report.per_class.resize(n);
    for (std::size_t c = 0; c < n; ++c) {
        auto& score = report.per_class[c];
        score.class_id = static_cast<ClassId>(c);
        score.predicted_pixels = report.confusion.pred_total(c);
        score.ground_truth_pixels = report.confusion.gt_total(c);
        score.absent = score.predicted_pixels + score.ground_truth_pixels == 0;
        if (mode == Aggregation::Pooled || score.absent) {
            score.dice = dice_from_confusion(report.confusion, c);
            continue;
        }
        double sum = 0.0;
        std::size_t images = 0;
        for (const auto& m : per_image) {
            if (m.gt_total(c) + m.pred_total(c) == 0) {
                continue;
            }
            sum += dice_from_confusion(m, c);
            ++images;
        }
        score.dice = sum / static_cast<double>(images);
    }

    double dice_sum = 0.0;
    for (const auto& score : report.per_class) {
        dice_sum += score.dice;
    }
    report.mean_dsc = dice_sum / static_cast<double>(n);
    report.pixel_accuracy = static_cast<double>(report.confusion.trace()) / static_cast<double>(report.confusion.total());

    if (mode == Aggregation::PerImage) {
        double acc = 0.0;
        for (const auto& m : per_image) {
            acc += m.total() == 0 ? 1.0 : static_cast<double>(m.trace()) / static_cast<double>(m.total());
        }
        report.image_mean_accuracy = acc / static_cast<double>(per_image.size());
    }
    return report;
}

double pixel_accuracy(std::span<const MaskPair> pairs)
{
    if (pairs.empty()) {
        throw EmptyInput("no prediction/ground-truth pairs");
    }
    std::uint64_t equal = 0;
    std::uint64_t total = 0;
    for (const auto& pair : pairs) {
        check_pair(pair.pred, pair.gt);
        auto p = pair.pred.get().labels();
        auto g = pair.gt.get().labels();
        for (std::size_t i = 0; i < g.size(); ++i) {
            equal += p[i] == g[i];
        }
        total += g.size();
    }
    if (total == 0) {
        throw EmptyInput("pairs contain no pixels");
    }
    return static_cast<double>(equal) / static_cast<double>(total);
}

}
