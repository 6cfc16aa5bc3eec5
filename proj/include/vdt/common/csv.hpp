#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace vdt::csv {

/// Numeric CSV: one header row of column names and rows of doubles.
struct NumericTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;

    /// Throws LoadError if the column is absent.
    std::size_t column(std::string_view name) const;
};

/// Throws LoadError (naming the file and line) on unreadable files, ragged
/// rows or unparsable numbers.
NumericTable read_numeric(const std::filesystem::path& file);

void write_numeric(const NumericTable& table, const std::filesystem::path& file);

/// Shortest text that parses back to exactly `value`.
std::string format_double(double value);

} // namespace vdt::csv
