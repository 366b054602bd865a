#include "wearlca/mask.hpp"
#include "wearlca/error.hpp"

#include <json.hpp>
#include <png.h>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace wearlca {

SegmentationMask::SegmentationMask(std::size_t width, std::size_t height, std::vector<ClassId> labels, const ClassMap& class_map)
: width_(width)
, height_(height)
, labels_(std::move(labels))
, class_map_(&class_map)
{
    if (width_ * height_ != labels_.size()) {
        throw DimensionMismatch("mask is {}x{} but has {} labels", width_, height_, labels_.size());
    }
    const auto limit = class_map.size();
    for (std::size_t i = 0; i < labels_.size(); ++i) {
        if (labels_[i] >= limit) {
            throw UnknownClassId(labels_[i], i % width_, i / width_, class_map.ref());
        }
    }
}

std::vector<std::size_t> SegmentationMask::class_counts() const
{
    std::vector<std::size_t> counts(class_map_->size(), 0);
    for (auto label : labels_) {
        ++counts[label];
    }
    return counts;
}

bool SegmentationMask::operator==(const SegmentationMask& other) const
{
    return width_ == other.width_ && height_ == other.height_ && *class_map_ == *other.class_map_ && labels_ == other.labels_;
}

ProbabilityMap::ProbabilityMap(std::size_t width, std::size_t height, std::size_t class_count, std::vector<double> scores)
: width_(width)
, height_(height)
, class_count_(class_count)
, scores_(std::move(scores))
{
    if (class_count_ == 0 || width_ * height_ * class_count_ != scores_.size()) {
        throw DimensionMismatch("probability map {}x{}x{} but has {} scores", width_, height_, class_count_, scores_.size());
    }
    auto bad = std::find_if(scores_.begin(), scores_.end(), [](double v) { return !std::isfinite(v); });
    if (bad != scores_.end()) {
        throw InvalidArgument("non-finite score at index {}", std::distance(scores_.begin(), bad));
    }
}

SegmentationMask argmax_decode(const ProbabilityMap& probs, const ClassMap& class_map)
{
    if (probs.class_count() != class_map.size()) {
        throw LengthMismatch("score vectors have {} entries, class map {} has {} classes",
                             probs.class_count(), class_map.ref(), class_map.size());
    }
    const auto n = probs.width() * probs.height();
    std::vector<ClassId> labels(n);
    for (std::size_t i = 0; i < n; ++i) {
        auto scores = probs.pixel(i);
        // max_element returns the first maximum, i.e. the lowest class id on ties
        labels[i] = static_cast<ClassId>(std::distance(scores.begin(), std::max_element(scores.begin(), scores.end())));
    }
    return SegmentationMask(probs.width(), probs.height(), std::move(labels), class_map);
}

MaskFormat mask_format_for(const fs::path& path)
{
    auto ext = path.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (ext == ".png") {
        return MaskFormat::Png;
    }
    if (ext == ".pgm") {
        return MaskFormat::Pgm;
    }
    return MaskFormat::TextGrid;
}

fs::path sidecar_path(const fs::path& mask_path)
{
    return fs::path(mask_path.string() + ".json");
}

namespace {

struct RawMask
{
    std::size_t width = 0;
    std::size_t height = 0;
    std::vector<int> values;
};

// Widened to int so out-of-range text values are reported rather than truncated.
SegmentationMask to_mask(RawMask raw, const ClassMap& class_map, const fs::path& path)
{
    if (raw.width * raw.height != raw.values.size()) {
        throw DimensionMismatch("{}: header says {}x{} but found {} values", path.string(), raw.width, raw.height, raw.values.size());
    }
    std::vector<ClassId> labels(raw.values.size());
    for (std::size_t i = 0; i < raw.values.size(); ++i) {
        const int v = raw.values[i];
        if (!class_map.contains(v)) {
            throw UnknownClassId(v, i % raw.width, i / raw.width, path.string());
        }
        labels[i] = static_cast<ClassId>(v);
    }
    return SegmentationMask(raw.width, raw.height, std::move(labels), class_map);
}

SegmentationMask read_png(const fs::path& path, const ClassMap& class_map)
{
    png_image image{};
    image.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_file(&image, path.c_str())) {
        throw UnreadableFile("{}: {}", path.string(), image.message);
    }
    if ((image.format & (PNG_FORMAT_FLAG_COLOR | PNG_FORMAT_FLAG_ALPHA | PNG_FORMAT_FLAG_LINEAR)) != 0) {
        png_image_free(&image);
        throw UnreadableFile("{}: not an 8-bit single-channel image", path.string());
    }
    image.format = PNG_FORMAT_GRAY;
    std::vector<ClassId> labels(PNG_IMAGE_SIZE(image));
    if (!png_image_finish_read(&image, nullptr, labels.data(), 0, nullptr)) {
        throw UnreadableFile("{}: {}", path.string(), image.message);
    }
    const auto width = static_cast<std::size_t>(image.width);
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (!class_map.contains(labels[i])) {
            throw UnknownClassId(labels[i], i % width, i / width, path.string());
        }
    }
    return SegmentationMask(width, image.height, std::move(labels), class_map);
}

void write_png(const fs::path& path, const SegmentationMask& mask)
{
    png_image image{};
    image.version = PNG_IMAGE_VERSION;
    image.width = static_cast<png_uint_32>(mask.width());
    image.height = static_cast<png_uint_32>(mask.height());
    image.format = PNG_FORMAT_GRAY;
    if (!png_image_write_to_file(&image, path.c_str(), 0, mask.labels().data(), 0, nullptr)) {
        throw UnreadableFile("{}: cannot write png: {}", path.string(), image.message);
    }
}

std::string read_token(std::istream& in)
{
    std::string token;
    char c = 0;
    while (in.get(c)) {
        if (c == '#') {
            std::string skip;
            std::getline(in, skip);
            continue;
        }
        if (std::isspace(static_cast<unsigned char>(c))) {
            if (!token.empty()) {
                break;
            }
            continue;
        }
        token.push_back(c);
    }
    return token;
}

std::size_t parse_size(const std::string& token, const fs::path& path)
{
    std::size_t value = 0;
    auto [end, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc() || end != token.data() + token.size()) {
        throw UnreadableFile("{}: bad header field '{}'", path.string(), token);
    }
    return value;
}

SegmentationMask read_pgm(const fs::path& path, const ClassMap& class_map)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw UnreadableFile("{}: cannot open", path.string());
    }
    if (read_token(in) != "P5") {
        throw UnreadableFile("{}: not a binary PGM (P5) file", path.string());
    }
    const auto width = parse_size(read_token(in), path);
    const auto height = parse_size(read_token(in), path);
    const auto maxval = parse_size(read_token(in), path);
    if (maxval == 0 || maxval > 255) {
        throw UnreadableFile("{}: only 8-bit PGM is supported (maxval {})", path.string(), maxval);
    }
    std::vector<ClassId> labels(width * height);
    in.read(reinterpret_cast<char*>(labels.data()), static_cast<std::streamsize>(labels.size()));
    if (static_cast<std::size_t>(in.gcount()) != labels.size()) {
        throw DimensionMismatch("{}: header says {}x{} but pixel data is short", path.string(), width, height);
    }
    if (in.peek() != std::char_traits<char>::eof()) {
        throw DimensionMismatch("{}: trailing data after {}x{} pixels", path.string(), width, height);
    }
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (!class_map.contains(labels[i])) {
            throw UnknownClassId(labels[i], i % width, i / width, path.string());
        }
    }
    return SegmentationMask(width, height, std::move(labels), class_map);
}

void write_pgm(const fs::path& path, const SegmentationMask& mask)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw UnreadableFile("{}: cannot open for writing", path.string());
    }
    out << "P5\n" << mask.width() << ' ' << mask.height() << "\n255\n";
    out.write(reinterpret_cast<const char*>(mask.labels().data()), static_cast<std::streamsize>(mask.pixel_count()));
}

SegmentationMask read_text_grid(const fs::path& path, const ClassMap& class_map)
{
    std::ifstream in(path);
    if (!in) {
        throw UnreadableFile("{}: cannot open", path.string());
    }
    RawMask raw;
    std::string line;
    while (std::getline(in, line)) {
        std::istringstream row(line);
        std::size_t columns = 0;
        std::string token;
        while (row >> token) {
            int value = 0;
            auto [end, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
            if (ec != std::errc() || end != token.data() + token.size()) {
                throw UnreadableFile("{}: non-integer label '{}' on row {}", path.string(), token, raw.height);
            }
            raw.values.push_back(value);
            ++columns;
        }
        if (columns == 0) {
            continue;
        }
        if (raw.height == 0) {
            raw.width = columns;
        } else if (columns != raw.width) {
            throw DimensionMismatch("{}: row {} has {} values, expected {}", path.string(), raw.height, columns, raw.width);
        }
        ++raw.height;
    }
    if (raw.height == 0) {
        throw UnreadableFile("{}: empty mask", path.string());
    }
    return to_mask(std::move(raw), class_map, path);
}

void write_text_grid(const fs::path& path, const SegmentationMask& mask)
{
    std::ofstream out(path);
    if (!out) {
        throw UnreadableFile("{}: cannot open for writing", path.string());
    }
    for (std::size_t y = 0; y < mask.height(); ++y) {
        for (std::size_t x = 0; x < mask.width(); ++x) {
            if (x != 0) {
                out << ' ';
            }
            out << static_cast<int>(mask.at(x, y));
        }
        out << '\n';
    }
}

void check_sidecar(const fs::path& path, const ClassMap& class_map)
{
    const auto sidecar = sidecar_path(path);
    if (!fs::exists(sidecar)) {
        return;
    }
    std::ifstream in(sidecar);
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw UnreadableFile("{}: {}", sidecar.string(), e.what());
    }
    const auto ref = doc.value("class_map", std::string());
    if (ref != class_map.ref()) {
        throw ClassMapMismatch("{}: mask declares class map '{}', expected '{}'", path.string(), ref, class_map.ref());
    }
}

}

SegmentationMask load_mask(const fs::path& path, const ClassMap& class_map)
{
    if (!fs::is_regular_file(path)) {
        throw UnreadableFile("{}: no such file", path.string());
    }
    check_sidecar(path, class_map);
    switch (mask_format_for(path)) {
    case MaskFormat::Png:
        return read_png(path, class_map);
    case MaskFormat::Pgm:
        return read_pgm(path, class_map);
    case MaskFormat::TextGrid:
        break;
    }
    return read_text_grid(path, class_map);
}

void write_mask(const fs::path& path, const SegmentationMask& mask, bool with_sidecar)
{
    switch (mask_format_for(path)) {
    case MaskFormat::Png:
        write_png(path, mask);
        break;
    case MaskFormat::Pgm:
        write_pgm(path, mask);
        break;
    case MaskFormat::TextGrid:
        write_text_grid(path, mask);
        break;
    }
    if (with_sidecar) {
        std::ofstream out(sidecar_path(path));
        nlohmann::json doc = {{"class_map", mask.class_map().ref()}, {"width", mask.width()}, {"height", mask.height()}};
        out << doc.dump(1) << '\n';
    }
}

}
