#include <vdt/common/csv.hpp>

#include <vdt/common/errors.hpp>

#include <array>
#include <charconv>
#include <fstream>
#include <sstream>

namespace vdt::csv {

std::size_t NumericTable::column(std::string_view name) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == name) {
            return i;
        }
    }
    throw LoadError("missing column '" + std::string(name) + "'");
}

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    return s;
}

std::vector<std::string_view> split(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        out.push_back(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
        if (comma == std::string_view::npos) {
            break;
        }
        start = comma + 1;
    }
    return out;
}

} // namespace

NumericTable read_numeric(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) {
        throw LoadError("cannot open " + file.string());
    }
    NumericTable t;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) {
            continue;
        }
        auto fields = split(line);
        if (t.header.empty()) {
            for (auto f : fields) {
                t.header.emplace_back(f);
            }
            continue;
        }
        if (fields.size() != t.header.size()) {
            throw LoadError(file.string() + ":" + std::to_string(line_no) + ": expected " +
                            std::to_string(t.header.size()) + " fields, got " + std::to_string(fields.size()));
        }
        std::vector<double> row(fields.size());
        for (std::size_t i = 0; i < fields.size(); ++i) {
            const auto f = fields[i];
            auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), row[i]);
            if (ec != std::errc{} || ptr != f.data() + f.size()) {
                throw LoadError(file.string() + ":" + std::to_string(line_no) + ": cannot parse '" +
                                std::string(f) + "' in column '" + t.header[i] + "'");
            }
        }
        t.rows.push_back(std::move(row));
    }
    if (t.header.empty()) {
        throw LoadError(file.string() + ": empty file");
    }
    return t;
}

std::string format_double(double value) {
    std::array<char, 32> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    return std::string(buf.data(), ptr);
}

void write_numeric(const NumericTable& table, const std::filesystem::path& file) {
    std::ostringstream os;
    for (std::size_t i = 0; i < table.header.size(); ++i) {
        os << (i ? "," : "") << table.header[i];
    }
    os << '\n';
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            os << (i ? "," : "") << format_double(row[i]);
        }
        os << '\n';
    }
    std::ofstream out(file, std::ios::binary);
    if (!out) {
        throw Error("cannot write " + file.string());
    }
    out << os.str();
}

} // namespace vdt::csv
