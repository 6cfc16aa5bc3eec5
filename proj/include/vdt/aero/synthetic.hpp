#pragma once

#include <vdt/aero/database.hpp>

#include <functional>
#include <vector>

namespace vdt::aero {

/// Analytic stand-in for the airframe's true clean-configuration
/// coefficients, used as ground truth by the tool emulators and the
/// reference database. Longitudinal coefficients are even in beta, lateral
/// ones odd.
CoefficientSet reference_coefficients(double alpha_deg, double beta_deg);

/// alpha in [-20, 30] deg at 2.5 deg spacing.
std::vector<double> default_alpha_grid();
/// beta in [-20, 20] deg at 2.5 deg spacing.
std::vector<double> default_beta_grid();

/// Tabulates f(alpha, beta) on the given grids as an (alpha, beta) table.
AeroTable tabulate(const std::function<double(double, double)>& f, const std::vector<double>& alpha_grid,
                   const std::vector<double>& beta_grid);

/// Configured rate and control increments (elevator, aileron, rudder with
/// +-25 deg deflection grids). Replaces any increments already present.
void install_default_increments(AeroDatabase& db);

/// Reference coefficients tabulated on the default grids plus the default
/// increments.
AeroDatabase make_reference_database();

} // namespace vdt::aero
