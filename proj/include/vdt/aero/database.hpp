#pragma once

#include <vdt/aero/table.hpp>

#include <array>
#include <map>
#include <string>
#include <string_view>

namespace vdt::aero {

enum class Coefficient { CL, CD, Cm, CY, Cl, Cn };

inline constexpr std::array<Coefficient, 6> kAllCoefficients{
    Coefficient::CL, Coefficient::CD, Coefficient::Cm, Coefficient::CY, Coefficient::Cl, Coefficient::Cn};

std::string_view to_string(Coefficient c);
/// Throws ArgumentError for unknown names.
Coefficient coefficient_from_string(std::string_view name);

/// Longitudinal coefficients (CL, CD, Cm) take pitch-rate increments; lateral
/// ones (CY, Cl, Cn) take roll- and yaw-rate increments.
bool is_longitudinal(Coefficient c);

/// Tables contributing to one coefficient.
struct CoefficientTables {
    AeroTable baseline;                               // (alpha, beta)
    std::map<std::string, AeroTable> rate_increments;    // "p" | "q" | "r" -> (alpha, rate)
    std::map<std::string, AeroTable> control_increments; // surface -> (alpha, delta_<surface>)

    bool operator==(const CoefficientTables&) const = default;
};

struct GeometryRef {
    double wingspan = 2.0;     // m
    double mean_chord = 0.2995; // m
    double wing_area = 0.8544;  // m^2

    bool operator==(const GeometryRef&) const = default;
};

struct CoefficientSet {
    double CL = 0, CD = 0, Cm = 0, CY = 0, Cl = 0, Cn = 0;

    double& operator[](Coefficient c);
    double operator[](Coefficient c) const;
    bool operator==(const CoefficientSet&) const = default;
};

/// Baseline and increment tables for all six coefficients. Immutable once
/// built; lookups are const and thread-safe.
struct AeroDatabase {
    std::array<CoefficientTables, 6> tables;
    GeometryRef geometry;
    /// The database holds a single Mach station; lookups are Mach-constant.
    double mach = 0.0735;

    CoefficientTables& operator[](Coefficient c) { return tables[static_cast<std::size_t>(c)]; }
    const CoefficientTables& operator[](Coefficient c) const { return tables[static_cast<std::size_t>(c)]; }

    /// Throws ArgumentError with a "<coefficient>/<table>: ..." message when a
    /// table is malformed or an increment is attached to the wrong axis set.
    void validate() const;

    bool operator==(const AeroDatabase&) const = default;
};

/// Axis name used for a control surface deflection table.
std::string deflection_axis(std::string_view surface);

} // namespace vdt::aero
