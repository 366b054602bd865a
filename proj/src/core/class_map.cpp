#include "wearlca/class_map.hpp"
#include "wearlca/error.hpp"

namespace wearlca {

ClassMap::ClassMap(ProductFamily family, std::string ref, std::vector<WearClass> classes)
: family_(family)
, ref_(std::move(ref))
, classes_(std::move(classes))
{
    for (std::size_t i = 0; i < classes_.size(); ++i) {
        if (classes_[i].id != i) {
            throw InvalidArgument("class map {}: ids must be contiguous from 0", ref_);
        }
    }
}

// Colors follow the figure coding: flank wear red, chipping green, built-up edge blue.
const ClassMap& ClassMap::machining_tool()
{
    static const ClassMap map(ProductFamily::MachiningTool,
                              "machining_tool",
                              {
                                  {0, "background", {0, 0, 0}},
                                  {1, "flank_wear", {220, 40, 40}},
                                  {2, "chipping", {40, 180, 60}},
                                  {3, "built_up_edge", {40, 90, 220}},
                              });
    return map;
}

const ClassMap& ClassMap::rotating_anode()
{
    static const ClassMap map(ProductFamily::RotatingAnode,
                              "rotating_anode",
                              {
                                  {0, "normal_surface", {150, 150, 150}},
                                  {1, "cracks", {250, 200, 30}},
                                  {2, "molten_area", {200, 60, 200}},
                              });
    return map;
}

const ClassMap& ClassMap::for_family(ProductFamily family)
{
    return family == ProductFamily::MachiningTool ? machining_tool() : rotating_anode();
}

const ClassMap& ClassMap::from_ref(std::string_view ref)
{
    if (ref == machining_tool().ref()) {
        return machining_tool();
    }
    if (ref == rotating_anode().ref()) {
        return rotating_anode();
    }
    throw InvalidArgument("unknown class map '{}'", ref);
}

const WearClass& ClassMap::at(ClassId id) const
{
    if (!contains(id)) {
        throw UnknownClass("class {} not in class map {}", id, ref_);
    }
    return classes_[id];
}

std::string_view to_string(ProductFamily family)
{
    return family == ProductFamily::MachiningTool ? "MachiningTool" : "RotatingAnode";
}

}
