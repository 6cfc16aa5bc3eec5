#include <vdt/aero/table.hpp>

#include <vdt/common/errors.hpp>

#include <algorithm>
#include <array>
#include <cmath>

namespace vdt::aero {

std::size_t AeroTable::axis_index(std::string_view name) const {
    for (std::size_t i = 0; i < axis_names.size(); ++i) {
        if (axis_names[i] == name) {
            return i;
        }
    }
    throw ArgumentError("table has no axis '" + std::string(name) + "'");
}

void AeroTable::validate() const {
    if (axis_names.empty() || axis_names.size() > 3) {
        throw ArgumentError("table must have 1 to 3 axes, got " + std::to_string(axis_names.size()));
    }
    if (axis_grids.size() != axis_names.size()) {
        throw ArgumentError("table axis name/grid count mismatch");
    }
    std::size_t expected = 1;
    for (std::size_t k = 0; k < axis_grids.size(); ++k) {
        const auto& grid = axis_grids[k];
        if (grid.size() < 2) {
            throw ArgumentError("axis '" + axis_names[k] + "' needs at least 2 grid points");
        }
        for (std::size_t i = 0; i < grid.size(); ++i) {
            if (!std::isfinite(grid[i])) {
                throw ArgumentError("axis '" + axis_names[k] + "' has a non-finite grid value");
            }
            if (i > 0 && !(grid[i] > grid[i - 1])) {
                throw ArgumentError("axis '" + axis_names[k] + "' grid is not strictly increasing");
            }
        }
        expected *= grid.size();
    }
    if (values.size() != expected) {
        throw ArgumentError("value count " + std::to_string(values.size()) + " does not match grid product " +
                            std::to_string(expected));
    }
    for (double v : values) {
        if (!std::isfinite(v)) {
            throw ArgumentError("table contains a non-finite value");
        }
    }
}

AeroTable AeroTable::constant(std::vector<std::string> names, std::vector<std::vector<double>> grids,
                              double value) {
    std::size_t count = 1;
    for (const auto& g : grids) {
        count *= g.size();
    }
    return AeroTable{std::move(names), std::move(grids), std::vector<double>(count, value)};
}

namespace {

struct CellCoord {
    std::size_t lower = 0;
    double t = 0.0;
    bool outside = false;
};

CellCoord locate(const std::vector<double>& grid, double x) {
    const std::size_t n = grid.size();
    CellCoord c;
    if (x < grid.front()) {
        c.lower = 0;
        c.outside = true;
    } else if (x > grid.back()) {
        c.lower = n - 2;
        c.outside = true;
    } else {
        auto it = std::upper_bound(grid.begin(), grid.end(), x);
        std::size_t hi = static_cast<std::size_t>(it - grid.begin());
        hi = std::clamp<std::size_t>(hi, 1, n - 1);
        c.lower = hi - 1;
    }
    c.t = (x - grid[c.lower]) / (grid[c.lower + 1] - grid[c.lower]);
    return c;
}

} // namespace

Lookup interpolate(const AeroTable& table, std::span<const double> coords) {
    const std::size_t dims = table.axis_grids.size();
    if (coords.size() != dims) {
        throw ArgumentError("expected " + std::to_string(dims) + " coordinates, got " +
                            std::to_string(coords.size()));
    }
    std::array<CellCoord, 3> cell{};
    std::array<std::size_t, 3> stride{};
    Lookup out;
    std::size_t s = 1;
    for (std::size_t k = dims; k-- > 0;) {
        stride[k] = s;
        s *= table.axis_grids[k].size();
        cell[k] = locate(table.axis_grids[k], coords[k]);
        out.extrapolated = out.extrapolated || cell[k].outside;
    }
    double acc = 0.0;
    const std::size_t corners = std::size_t{1} << dims;
    for (std::size_t corner = 0; corner < corners; ++corner) {
        double weight = 1.0;
        std::size_t index = 0;
        for (std::size_t k = 0; k < dims; ++k) {
            const bool upper = ((corner >> k) & 1U) != 0;
            weight *= upper ? cell[k].t : 1.0 - cell[k].t;
            index += (cell[k].lower + (upper ? 1 : 0)) * stride[k];
        }
        acc += weight * table.values[index];
    }
    out.value = acc;
    return out;
}

Lookup interpolate(const AeroTable& table, const std::map<std::string, double>& point) {
    std::array<double, 3> coords{};
    for (std::size_t k = 0; k < table.axis_names.size(); ++k) {
        auto it = point.find(table.axis_names[k]);
        if (it == point.end()) {
            throw ArgumentError("interpolation point is missing axis '" + table.axis_names[k] + "'");
        }
        coords[k] = it->second;
    }
    return interpolate(table, std::span<const double>(coords.data(), table.axis_names.size()));
}

} // namespace vdt::aero
