#pragma once

#include <vdt/aero/database.hpp>

#include <filesystem>

namespace vdt::aero {

/// Writes `dir/manifest.json` plus one CSV per table. Values are printed in
/// shortest round-trip form, so save/load is bit-exact.
void save_database(const AeroDatabase& db, const std::filesystem::path& dir);

/// Reads a database from a directory containing `manifest.json` or from the
/// manifest path itself. Throws LoadError naming the file (and axis) on any
/// schema, monotonicity or value-count violation.
AeroDatabase load_database(const std::filesystem::path& path);

/// Table CSV: header of axis names then "value"; one row per grid tuple in
/// row-major order.
void write_table_csv(const AeroTable& table, const std::filesystem::path& file);
AeroTable read_table_csv(const std::filesystem::path& file);

} // namespace vdt::aero
