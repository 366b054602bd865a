#include "wearlca/analytics.hpp"
#include "wearlca/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace wearlca {

namespace {

struct Run
{
    std::size_t x0;
    std::size_t x1; // exclusive
    ClassId label;
};

std::size_t find_root(std::vector<std::size_t>& parent, std::size_t i)
{
    while (parent[i] != i) {
        parent[i] = parent[parent[i]];
        i = parent[i];
    }
    return i;
}

// Run-length union-find labelling with 4-connectivity: runs join only when
// they share a column in adjacent rows. Returns (label, size) per component.
std::vector<std::pair<ClassId, std::size_t>> label_components(const SegmentationMask& mask)
{
    std::vector<Run> runs;
    std::vector<std::size_t> parent;
    std::size_t prev_begin = 0;
    std::size_t prev_end = 0;
    for (std::size_t y = 0; y < mask.height(); ++y) {
        const std::size_t row_begin = runs.size();
        std::size_t x = 0;
        while (x < mask.width()) {
            const ClassId label = mask.at(x, y);
            std::size_t end = x + 1;
            while (end < mask.width() && mask.at(end, y) == label) {
                ++end;
            }
            runs.push_back({x, end, label});
            parent.push_back(runs.size() - 1);
            x = end;
        }
        std::size_t p = prev_begin;
        for (std::size_t r = row_begin; r < runs.size(); ++r) {
            while (p < prev_end && runs[p].x1 <= runs[r].x0) {
                ++p;
            }
            for (std::size_t q = p; q < prev_end && runs[q].x0 < runs[r].x1; ++q) {
                if (runs[q].label == runs[r].label) {
                    auto a = find_root(parent, q);
                    auto b = find_root(parent, r);
                    if (a != b) {
                        parent[std::max(a, b)] = std::min(a, b);
                    }
                }
            }
        }
        prev_begin = row_begin;
        prev_end = runs.size();
    }

    std::vector<std::size_t> size(runs.size(), 0);
    for (std::size_t r = 0; r < runs.size(); ++r) {
        size[find_root(parent, r)] += runs[r].x1 - runs[r].x0;
    }
    std::vector<std::pair<ClassId, std::size_t>> components;
    for (std::size_t r = 0; r < runs.size(); ++r) {
        if (parent[r] == r) {
            components.emplace_back(runs[r].label, size[r]);
        }
    }
    return components;
}

std::size_t longest_vertical_wear_run(const SegmentationMask& mask)
{
    std::vector<std::size_t> current(mask.width(), 0);
    std::size_t best = 0;
    for (std::size_t y = 0; y < mask.height(); ++y) {
        for (std::size_t x = 0; x < mask.width(); ++x) {
            if (mask.at(x, y) != 0) {
                best = std::max(best, ++current[x]);
            } else {
                current[x] = 0;
            }
        }
    }
    return best;
}

}

std::vector<std::size_t> component_sizes(const SegmentationMask& mask, ClassId c)
{
    std::vector<std::size_t> sizes;
    for (const auto& [label, size] : label_components(mask)) {
        if (label == c) {
            sizes.push_back(size);
        }
    }
    return sizes;
}

WearSummary summarize(const SegmentationMask& mask, std::string image_id)
{
    const auto& map = mask.class_map();
    WearSummary summary;
    summary.image_id = std::move(image_id);
    summary.family = map.family();
    summary.width = mask.width();
    summary.height = mask.height();

    const auto counts = mask.class_counts();
    summary.support_pixels = mask.pixel_count() - (map.has_background() ? counts[0] : 0);

    summary.classes.resize(map.size());
    for (std::size_t c = 0; c < map.size(); ++c) {
        auto& stats = summary.classes[c];
        stats.class_id = static_cast<ClassId>(c);
        stats.pixels = counts[c];
        const bool counted = !(map.has_background() && c == 0);
        if (counted && summary.support_pixels > 0) {
            stats.fraction = static_cast<double>(counts[c]) / static_cast<double>(summary.support_pixels);
        }
    }
    for (const auto& [label, size] : label_components(mask)) {
        auto& stats = summary.classes[label];
        ++stats.region_count;
        stats.largest_region = std::max(stats.largest_region, size);
    }
    if (map.has_background()) {
        summary.wear_extent = longest_vertical_wear_run(mask);
    }
    return summary;
}

Distribution describe(std::vector<double> values)
{
    if (values.empty()) {
        throw EmptyInput("no values to describe");
    }
    std::sort(values.begin(), values.end());
    Distribution d;
    const auto n = static_cast<double>(values.size());
    d.min = values.front();
    d.max = values.back();
    d.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
    d.median = values[(values.size() - 1) / 2];
    double ss = 0.0;
    for (double v : values) {
        ss += (v - d.mean) * (v - d.mean);
    }
    d.std = std::sqrt(ss / n);
    return d;
}

Histogram histogram(std::span<const double> values, std::size_t bins)
{
    Histogram h;
    h.counts.assign(bins, 0);
    for (double v : values) {
        auto bin = static_cast<std::size_t>(std::floor((v - h.lower) / (h.upper - h.lower) * static_cast<double>(bins)));
        ++h.counts[std::min(bin, bins - 1)];
    }
    return h;
}

ProcessWearProfile aggregate(std::span<const WearSummary> summaries)
{
    if (summaries.empty()) {
        throw EmptyInput("no wear summaries to aggregate");
    }
    const auto family = summaries.front().family;
    std::set<std::string> ids;
    for (const auto& s : summaries) {
        if (s.family != family) {
            throw MixedFamilies("summaries mix {} and {}", to_string(family), to_string(s.family));
        }
        if (!ids.insert(s.image_id).second) {
            throw DuplicateImageId("duplicate image_id '{}' in summaries", s.image_id);
        }
    }

    const auto& map = ClassMap::for_family(family);
    ProcessWearProfile profile;
    profile.family = family;
    profile.n_tools = summaries.size();
    profile.image_ids.assign(ids.begin(), ids.end());

    for (const auto& cls : map.classes()) {
        if (map.has_background() && cls.id == 0) {
            continue;
        }
        std::vector<double> fractions;
        fractions.reserve(summaries.size());
        std::size_t present = 0;
        std::size_t regions = 0;
        for (const auto& s : summaries) {
            const auto& stats = s.at(cls.id);
            fractions.push_back(stats.fraction);
            present += stats.pixels > 0;
            regions += stats.region_count;
        }
        ClassProfile cp;
        cp.class_id = cls.id;
        cp.name = cls.name;
        // histogram before describe() sorts; bin counts do not depend on order either way
        cp.histogram = histogram(fractions);
        cp.fraction = describe(std::move(fractions));
        cp.incidence = static_cast<double>(present) / static_cast<double>(summaries.size());
        cp.mean_region_count = static_cast<double>(regions) / static_cast<double>(summaries.size());
        profile.classes.push_back(std::move(cp));
    }
    return profile;
}

StitchResult stitch(std::span<const PlacedPatch> patches, std::size_t canvas_width, std::size_t canvas_height)
{
    if (patches.empty()) {
        throw EmptyInput("no patches to stitch");
    }
    const auto& map = patches.front().mask.get().class_map();
    std::vector<ClassId> labels(canvas_width * canvas_height, 0);
    std::vector<std::uint8_t> writes(labels.size(), 0);
    std::size_t conflicts = 0;

    for (std::size_t k = 0; k < patches.size(); ++k) {
        const auto& patch = patches[k].mask.get();
        const auto [ox, oy] = patches[k].offset;
        if (!(patch.class_map() == map)) {
            throw DimensionMismatch("patch {} uses class map {}, expected {}", k, patch.class_map().ref(), map.ref());
        }
        if (ox + patch.width() > canvas_width || oy + patch.height() > canvas_height) {
            throw PatchOutOfBounds("patch {} ({}x{} at {},{}) exceeds canvas {}x{}", k, patch.width(), patch.height(), ox, oy,
                                   canvas_width, canvas_height);
        }
        for (std::size_t y = 0; y < patch.height(); ++y) {
            for (std::size_t x = 0; x < patch.width(); ++x) {
                const auto i = (oy + y) * canvas_width + ox + x;
                const auto label = patch.at(x, y);
                if (writes[i] != 0 && labels[i] != label) {
                    ++conflicts;
                }
                labels[i] = label;
                writes[i] = static_cast<std::uint8_t>(std::min(writes[i] + 1, 2));
            }
        }
    }

    std::size_t uncovered = 0;
    std::size_t overlap = 0;
    for (auto w : writes) {
        uncovered += w == 0;
        overlap += w > 1;
    }
    return StitchResult{SegmentationMask(canvas_width, canvas_height, std::move(labels), map), uncovered, overlap, conflicts};
}

FocalTrackEstimate extrapolate(const WearSummary& sample, double coverage_fraction, double pixel_pitch)
{
    if (!(coverage_fraction > 0.0 && coverage_fraction <= 1.0)) {
        throw NonPositiveCoverage("coverage fraction must be in (0, 1], got {}", coverage_fraction);
    }
    if (!(pixel_pitch > 0.0) || !std::isfinite(pixel_pitch)) {
        throw InvalidArgument("pixel pitch must be positive, got {}", pixel_pitch);
    }
    FocalTrackEstimate est;
    est.sampled_area = sample.width * sample.height;
    est.coverage_fraction = coverage_fraction;
    est.pixel_pitch = pixel_pitch;
    est.assumption = fmt::format(
        "linear extrapolation: sampled patches assumed representative of the full track; "
        "sample covers {} of the track, areas scaled by 1/{}",
        coverage_fraction, coverage_fraction);
    for (const auto& stats : sample.classes) {
        ClassAreaEstimate c;
        c.class_id = stats.class_id;
        c.sampled_pixels = stats.pixels;
        c.estimated_pixels = static_cast<double>(stats.pixels) / coverage_fraction;
        c.estimated_area = c.estimated_pixels * pixel_pitch * pixel_pitch;
        est.classes.push_back(c);
    }
    return est;
}

}
