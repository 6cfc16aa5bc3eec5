#pragma once

#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace vdt::aero {

/// Dense lookup table over 1 to 3 named axes. Values are stored row-major:
/// the last axis varies fastest.
struct AeroTable {
    std::vector<std::string> axis_names;
    std::vector<std::vector<double>> axis_grids;
    std::vector<double> values;

    std::size_t dimensions() const { return axis_names.size(); }

    /// Index of a named axis; throws ArgumentError if absent.
    std::size_t axis_index(std::string_view name) const;

    /// Throws ArgumentError naming the offending axis if the table is
    /// malformed (axis count, grid monotonicity, value count, finiteness).
    void validate() const;

    /// A table whose every value equals `value`.
    static AeroTable constant(std::vector<std::string> names, std::vector<std::vector<double>> grids,
                              double value);

    bool operator==(const AeroTable&) const = default;
};

struct Lookup {
    double value = 0.0;
    /// At least one coordinate was outside its grid and the edge cell was
    /// linearly extended.
    bool extrapolated = false;
};

/// Multilinear interpolation; coordinates are given in axis order. Outside
/// the grid the edge cell's gradient is continued linearly.
Lookup interpolate(const AeroTable& table, std::span<const double> coords);

/// Same, with coordinates looked up by axis name. Throws ArgumentError when
/// the point does not supply every axis of the table.
Lookup interpolate(const AeroTable& table, const std::map<std::string, double>& point);

} // namespace vdt::aero
