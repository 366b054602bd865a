#pragma once

#include <fmt/format.h>

#include <stdexcept>
#include <string>

namespace wearlca {

class Error : public std::runtime_error
{
public:
    explicit Error(const std::string& msg)
    : std::runtime_error(msg)
    {
    }

    template <typename... Args>
    Error(fmt::format_string<Args...> fmt, Args&&... args)
    : std::runtime_error(fmt::format(fmt, std::forward<Args>(args)...))
    {
    }
};

#define WEARLCA_ERROR(Name)                \
    class Name : public Error              \
    {                                      \
    public:                                \
        using Error::Error;                \
    };

// wear-core
WEARLCA_ERROR(UnreadableFile)
WEARLCA_ERROR(DimensionMismatch)
WEARLCA_ERROR(InvalidManifest)
WEARLCA_ERROR(DuplicateImageId)
WEARLCA_ERROR(MissingFile)
WEARLCA_ERROR(ClassMapMismatch)
WEARLCA_ERROR(LengthMismatch)

// seg-metrics / wear-analytics
WEARLCA_ERROR(UnknownClass)
WEARLCA_ERROR(EmptyInput)
WEARLCA_ERROR(MixedFamilies)
WEARLCA_ERROR(PatchOutOfBounds)
WEARLCA_ERROR(NonPositiveCoverage)
WEARLCA_ERROR(InvalidArgument)

// lca-engine
WEARLCA_ERROR(InvalidFactor)
WEARLCA_ERROR(UnknownFlow)
WEARLCA_ERROR(UnitMismatch)
WEARLCA_ERROR(InvalidTable)
WEARLCA_ERROR(MissingBaseline)
WEARLCA_ERROR(IndicatorMismatch)
WEARLCA_ERROR(UnknownScenario)

#undef WEARLCA_ERROR

/// Label value outside the class map; carries the offending value and pixel.
class UnknownClassId : public Error
{
public:
    UnknownClassId(int value, std::size_t x, std::size_t y, const std::string& where)
    : Error("unknown class id {} at ({}, {}) in {}", value, x, y, where)
    , value_(value)
    , x_(x)
    , y_(y)
    {
    }

    int value() const noexcept { return value_; }
    std::size_t x() const noexcept { return x_; }
    std::size_t y() const noexcept { return y_; }

private:
    int value_;
    std::size_t x_;
    std::size_t y_;
};

}
