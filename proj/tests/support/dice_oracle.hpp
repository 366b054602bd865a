#pragma once

#include "wearlca/mask.hpp"

#include <vector>

namespace wearlca::test {

struct OracleResult
{
    std::vector<double> dice;
    double mean = 0.0;
    double accuracy = 0.0;
};

/// Direct per-pixel transcription of the pooled Dice definition: for each
/// class, twice the matching pixels over predicted plus true pixels, summed
/// over every pixel of every pair. Deliberately shares no code with the
/// library (no confusion matrix).
inline OracleResult brute_force_dice(const std::vector<SegmentationMask>& preds, const std::vector<SegmentationMask>& gts,
                                     std::size_t classes)
{
    OracleResult out;
    double correct = 0.0;
    double total = 0.0;
    for (std::size_t i = 0; i < preds.size(); ++i) {
        for (std::size_t y = 0; y < preds[i].height(); ++y) {
            for (std::size_t x = 0; x < preds[i].width(); ++x) {
                total += 1.0;
                if (preds[i].at(x, y) == gts[i].at(x, y)) {
                    correct += 1.0;
                }
            }
        }
    }
    for (std::size_t c = 0; c < classes; ++c) {
        double inter = 0.0;
        double p = 0.0;
        double g = 0.0;
        for (std::size_t i = 0; i < preds.size(); ++i) {
            for (std::size_t y = 0; y < preds[i].height(); ++y) {
                for (std::size_t x = 0; x < preds[i].width(); ++x) {
                    const bool in_p = preds[i].at(x, y) == c;
                    const bool in_g = gts[i].at(x, y) == c;
                    inter += (in_p && in_g) ? 1.0 : 0.0;
                    p += in_p ? 1.0 : 0.0;
                    g += in_g ? 1.0 : 0.0;
                }
            }
        }
        out.dice.push_back(p + g == 0.0 ? 1.0 : 2.0 * inter / (p + g));
    }
    double sum = 0.0;
    for (double d : out.dice) {
        sum += d;
    }
    out.mean = sum / static_cast<double>(classes);
    out.accuracy = correct / total;
    return out;
}

}
