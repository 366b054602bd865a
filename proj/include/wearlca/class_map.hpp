#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace wearlca {

using ClassId = std::uint8_t;

enum class ProductFamily
{
    MachiningTool,
    RotatingAnode,
};

struct Rgb
{
    std::uint8_t r = 0;
    std::uint8_t g = 0;
    std::uint8_t b = 0;

    bool operator==(const Rgb&) const = default;
};

struct WearClass
{
    ClassId id = 0;
    std::string name;
    Rgb display_color;
};

/// Ordered wear taxonomy of one product family.
///
/// Class maps are fixed per family: machining tools carry background,
/// flank_wear, chipping and built_up_edge (ids 0..3); rotating anodes carry
/// normal_surface, cracks and molten_area (ids 0..2). Ids are contiguous
/// from 0.
class ClassMap
{
public:
    static const ClassMap& machining_tool();
    static const ClassMap& rotating_anode();
    static const ClassMap& for_family(ProductFamily family);

    /// Looks up by reference id ("machining_tool" / "rotating_anode").
    /// Throws InvalidArgument on an unknown id.
    static const ClassMap& from_ref(std::string_view ref);

    ProductFamily family() const noexcept { return family_; }
    const std::string& ref() const noexcept { return ref_; }
    const std::vector<WearClass>& classes() const noexcept { return classes_; }
    std::size_t size() const noexcept { return classes_.size(); }
    bool contains(int id) const noexcept { return id >= 0 && static_cast<std::size_t>(id) < classes_.size(); }
    const WearClass& at(ClassId id) const;

    /// True when class 0 is an image background excluded from wear fractions.
    bool has_background() const noexcept { return family_ == ProductFamily::MachiningTool; }

    bool operator==(const ClassMap& other) const noexcept { return ref_ == other.ref_; }

private:
    ClassMap(ProductFamily family, std::string ref, std::vector<WearClass> classes);

    ProductFamily family_;
    std::string ref_;
    std::vector<WearClass> classes_;
};

std::string_view to_string(ProductFamily family);

}
