#include <vdt/aero/database.hpp>

#include <vdt/common/errors.hpp>

namespace vdt::aero {

std::string_view to_string(Coefficient c) {
    switch (c) {
    case Coefficient::CL:
        return "CL";
    case Coefficient::CD:
        return "CD";
    case Coefficient::Cm:
        return "Cm";
    case Coefficient::CY:
        return "CY";
    case Coefficient::Cl:
        return "Cl";
    case Coefficient::Cn:
        return "Cn";
    }
    return "?";
}

Coefficient coefficient_from_string(std::string_view name) {
    for (Coefficient c : kAllCoefficients) {
        if (to_string(c) == name) {
            return c;
        }
    }
    throw ArgumentError("unknown coefficient '" + std::string(name) + "'");
}

bool is_longitudinal(Coefficient c) {
    return c == Coefficient::CL || c == Coefficient::CD || c == Coefficient::Cm;
}

double& CoefficientSet::operator[](Coefficient c) {
    switch (c) {
    case Coefficient::CL:
        return CL;
    case Coefficient::CD:
        return CD;
    case Coefficient::Cm:
        return Cm;
    case Coefficient::CY:
        return CY;
    case Coefficient::Cl:
        return Cl;
    case Coefficient::Cn:
        break;
    }
    return Cn;
}

double CoefficientSet::operator[](Coefficient c) const {
    return const_cast<CoefficientSet&>(*this)[c];
}

std::string deflection_axis(std::string_view surface) { return "delta_" + std::string(surface); }

namespace {

void check_table(const AeroTable& t, const std::string& where, const std::vector<std::string>& axes) {
    try {
        t.validate();
    } catch (const ArgumentError& e) {
        throw ArgumentError(where + ": " + e.what());
    }
    if (t.axis_names != axes) {
        std::string want;
        for (const auto& a : axes) {
            want += (want.empty() ? "" : ",") + a;
        }
        throw ArgumentError(where + ": expected axes (" + want + ")");
    }
}

} // namespace

void AeroDatabase::validate() const {
    if (!(geometry.wingspan > 0 && geometry.mean_chord > 0 && geometry.wing_area > 0)) {
        throw ArgumentError("geometry reference values must be positive");
    }
    for (Coefficient c : kAllCoefficients) {
        const auto& ct = (*this)[c];
        const std::string name(to_string(c));
        check_table(ct.baseline, name + "/baseline", {"alpha", "beta"});
        for (const auto& [rate, table] : ct.rate_increments) {
            const bool allowed = is_longitudinal(c) ? rate == "q" : (rate == "p" || rate == "r");
            if (!allowed) {
                throw ArgumentError(name + "/" + rate + ": rate increment not valid for this coefficient");
            }
            check_table(table, name + "/" + rate, {"alpha", rate});
        }
        for (const auto& [surface, table] : ct.control_increments) {
            check_table(table, name + "/" + surface, {"alpha", deflection_axis(surface)});
        }
    }
}

} // namespace vdt::aero
