#include <vdt/aero/io.hpp>

#include <vdt/common/csv.hpp>
#include <vdt/common/errors.hpp>

#include <nlohmann/json.hpp>

#include <fstream>

namespace vdt::aero {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kFormat = "vdt-aerodb";
constexpr int kVersion = 1;

std::string unit_of(const std::string& axis) {
    if (axis == "alpha" || axis == "beta" || axis.rfind("delta_", 0) == 0) {
        return "deg";
    }
    if (axis == "p" || axis == "q" || axis == "r") {
        return "rad/s";
    }
    return "1";
}

json table_entry(const AeroTable& t, const std::string& file) {
    json units = json::object();
    for (const auto& a : t.axis_names) {
        units[a] = unit_of(a);
    }
    return json{{"file", file}, {"axes", t.axis_names}, {"units", units}};
}

} // namespace

void write_table_csv(const AeroTable& table, const fs::path& file) {
    csv::NumericTable out;
    out.header = table.axis_names;
    out.header.push_back("value");
    const std::size_t dims = table.dimensions();
    std::vector<std::size_t> idx(dims, 0);
    for (double value : table.values) {
        std::vector<double> row(dims + 1);
        for (std::size_t k = 0; k < dims; ++k) {
            row[k] = table.axis_grids[k][idx[k]];
        }
        row[dims] = value;
        out.rows.push_back(std::move(row));
        for (std::size_t k = dims; k-- > 0;) {
            if (++idx[k] < table.axis_grids[k].size()) {
                break;
            }
            idx[k] = 0;
        }
    }
    csv::write_numeric(out, file);
}

AeroTable read_table_csv(const fs::path& file) {
    const csv::NumericTable raw = csv::read_numeric(file);
    const std::string where = file.string();
    if (raw.header.size() < 2 || raw.header.back() != "value") {
        throw LoadError(where + ": header must list axis names followed by 'value'");
    }
    const std::size_t dims = raw.header.size() - 1;
    if (dims > 3) {
        throw LoadError(where + ": at most 3 axes supported");
    }
    if (raw.rows.empty()) {
        throw LoadError(where + ": no rows");
    }
    AeroTable t;
    t.axis_names.assign(raw.header.begin(), raw.header.end() - 1);
    t.axis_grids.resize(dims);

    // Recover each grid from the row-major layout, fastest axis first: an axis
    // spans as many blocks of `stride` rows as keep all slower axes fixed.
    std::size_t stride = 1;
    for (std::size_t k = dims; k-- > 0;) {
        std::size_t blocks = 0;
        for (std::size_t row = 0; row < raw.rows.size(); row += stride) {
            bool slower_fixed = true;
            for (std::size_t j = 0; j < k; ++j) {
                slower_fixed = slower_fixed && raw.rows[row][j] == raw.rows[0][j];
            }
            if (!slower_fixed) {
                break;
            }
            t.axis_grids[k].push_back(raw.rows[row][k]);
            ++blocks;
        }
        stride *= blocks;
    }
    for (std::size_t k = 0; k < dims; ++k) {
        const auto& g = t.axis_grids[k];
        for (std::size_t i = 1; i < g.size(); ++i) {
            if (!(g[i] > g[i - 1])) {
                throw LoadError(where + ": axis '" + t.axis_names[k] + "' grid is not strictly increasing");
            }
        }
        if (g.size() < 2) {
            throw LoadError(where + ": axis '" + t.axis_names[k] + "' needs at least 2 grid points");
        }
    }
    if (raw.rows.size() != stride) {
        throw LoadError(where + ": value count " + std::to_string(raw.rows.size()) +
                        " does not match grid product " + std::to_string(stride));
    }
    std::vector<std::size_t> idx(dims, 0);
    for (std::size_t row = 0; row < raw.rows.size(); ++row) {
        for (std::size_t k = 0; k < dims; ++k) {
            if (raw.rows[row][k] != t.axis_grids[k][idx[k]]) {
                throw LoadError(where + ": row " + std::to_string(row + 2) + " breaks row-major order on axis '" +
                                t.axis_names[k] + "'");
            }
        }
        t.values.push_back(raw.rows[row][dims]);
        for (std::size_t k = dims; k-- > 0;) {
            if (++idx[k] < t.axis_grids[k].size()) {
                break;
            }
            idx[k] = 0;
        }
    }
    try {
        t.validate();
    } catch (const ArgumentError& e) {
        throw LoadError(where + ": " + e.what());
    }
    return t;
}

void save_database(const AeroDatabase& db, const fs::path& dir) {
    db.validate();
    fs::create_directories(dir);
    json coeffs = json::object();
    for (Coefficient c : kAllCoefficients) {
        const std::string name(to_string(c));
        const auto& ct = db[c];
        json entry;
        const std::string base_file = name + "_baseline.csv";
        write_table_csv(ct.baseline, dir / base_file);
        entry["baseline"] = table_entry(ct.baseline, base_file);
        entry["rate_increments"] = json::object();
        for (const auto& [rate, table] : ct.rate_increments) {
            const std::string file = name + "_rate_" + rate + ".csv";
            write_table_csv(table, dir / file);
            entry["rate_increments"][rate] = table_entry(table, file);
        }
        entry["control_increments"] = json::object();
        for (const auto& [surface, table] : ct.control_increments) {
            const std::string file = name + "_control_" + surface + ".csv";
            write_table_csv(table, dir / file);
            entry["control_increments"][surface] = table_entry(table, file);
        }
        coeffs[name] = std::move(entry);
    }
    json manifest{{"format", kFormat},
                  {"version", kVersion},
                  {"geometry",
                   {{"wingspan", db.geometry.wingspan},
                    {"mean_chord", db.geometry.mean_chord},
                    {"wing_area", db.geometry.wing_area}}},
                  {"mach", db.mach},
                  {"coefficients", coeffs}};
    std::ofstream out(dir / "manifest.json", std::ios::binary);
    if (!out) {
        throw Error("cannot write " + (dir / "manifest.json").string());
    }
    out << manifest.dump(2) << '\n';
}

namespace {

AeroTable load_entry(const json& entry, const fs::path& dir, const std::string& where) {
    if (!entry.is_object() || !entry.contains("file") || !entry.contains("axes")) {
        throw LoadError(where + ": table entry needs 'file' and 'axes'");
    }
    const fs::path file = dir / entry.at("file").get<std::string>();
    AeroTable t = read_table_csv(file);
    const auto axes = entry.at("axes").get<std::vector<std::string>>();
    if (axes != t.axis_names) {
        throw LoadError(file.string() + ": header axes disagree with manifest");
    }
    return t;
}

} // namespace

AeroDatabase load_database(const fs::path& path) {
    const fs::path manifest_path = fs::is_directory(path) ? path / "manifest.json" : path;
    const fs::path dir = manifest_path.parent_path();
    const std::string where = manifest_path.string();
    std::ifstream in(manifest_path);
    if (!in) {
        throw LoadError("cannot open database manifest " + where);
    }
    json m;
    try {
        m = json::parse(in);
    } catch (const json::exception& e) {
        throw LoadError(where + ": " + e.what());
    }
    AeroDatabase db;
    try {
        if (m.value("format", std::string{}) != kFormat) {
            throw LoadError(where + ": not a " + std::string(kFormat) + " manifest");
        }
        const auto& g = m.at("geometry");
        db.geometry.wingspan = g.at("wingspan").get<double>();
        db.geometry.mean_chord = g.at("mean_chord").get<double>();
        db.geometry.wing_area = g.at("wing_area").get<double>();
        db.mach = m.value("mach", db.mach);
        const auto& coeffs = m.at("coefficients");
        for (Coefficient c : kAllCoefficients) {
            const std::string name(to_string(c));
            if (!coeffs.contains(name)) {
                throw LoadError(where + ": missing coefficient " + name);
            }
            const auto& entry = coeffs.at(name);
            auto& ct = db[c];
            ct.baseline = load_entry(entry.at("baseline"), dir, where);
            if (entry.contains("rate_increments")) {
                for (const auto& [rate, e] : entry.at("rate_increments").items()) {
                    ct.rate_increments[rate] = load_entry(e, dir, where);
                }
            }
            if (entry.contains("control_increments")) {
                for (const auto& [surface, e] : entry.at("control_increments").items()) {
                    ct.control_increments[surface] = load_entry(e, dir, where);
                }
            }
        }
    } catch (const json::exception& e) {
        throw LoadError(where + ": " + e.what());
    }
    try {
        db.validate();
    } catch (const ArgumentError& e) {
        throw LoadError(where + ": " + e.what());
    }
    return db;
}

} // namespace vdt::aero
