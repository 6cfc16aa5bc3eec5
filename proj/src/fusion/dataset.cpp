#include <vdt/fusion/dataset.hpp>

#include <vdt/common/csv.hpp>
#include <vdt/common/errors.hpp>

#include <nlohmann/json.hpp>

#include <cmath>
#include <fstream>

namespace vdt::fusion {

namespace fs = std::filesystem;
using nlohmann::json;

void Bounds::validate() const {
    if (ranges.empty()) {
        throw DomainError("bounds have no dimensions");
    }
    for (std::size_t k = 0; k < ranges.size(); ++k) {
        const auto [lo, hi] = ranges[k];
        if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi)) {
            throw DomainError("degenerate bounds in dimension " + std::to_string(k) + ": [" +
                              std::to_string(lo) + ", " + std::to_string(hi) + "]");
        }
    }
}

bool Bounds::contains(const Eigen::VectorXd& x, double tol) const {
    if (static_cast<std::size_t>(x.size()) != ranges.size()) {
        return false;
    }
    for (std::size_t k = 0; k < ranges.size(); ++k) {
        const double span = ranges[k].second - ranges[k].first;
        if (x[k] < ranges[k].first - tol * span || x[k] > ranges[k].second + tol * span) {
            return false;
        }
    }
    return true;
}

Eigen::VectorXd Dataset::response(const std::string& name) const {
    for (std::size_t i = 0; i < response_names.size(); ++i) {
        if (response_names[i] == name) {
            return outputs.col(static_cast<Eigen::Index>(i));
        }
    }
    throw ArgumentError("dataset '" + tool + "' has no response '" + name + "'");
}

void Dataset::validate() const {
    const auto n = inputs.rows();
    const auto m = inputs.cols();
    if (static_cast<std::size_t>(m) != input_names.size()) {
        throw ArgumentError("dataset '" + tool + "': input names do not match input columns");
    }
    if (outputs.rows() != n || static_cast<std::size_t>(outputs.cols()) != response_names.size()) {
        throw ArgumentError("dataset '" + tool + "': output shape does not match inputs");
    }
    if (n < m + 1) {
        throw ArgumentError("dataset '" + tool + "': need at least " + std::to_string(m + 1) + " samples, got " +
                            std::to_string(n));
    }
    bounds.validate();
    if (bounds.dimensions() != static_cast<std::size_t>(m)) {
        throw ArgumentError("dataset '" + tool + "': bounds dimension does not match inputs");
    }
    if (!inputs.allFinite() || !outputs.allFinite()) {
        throw ArgumentError("dataset '" + tool + "': non-finite sample values");
    }
    for (Eigen::Index i = 0; i < n; ++i) {
        if (!bounds.contains(inputs.row(i).transpose())) {
            throw ArgumentError("dataset '" + tool + "': sample " + std::to_string(i) + " lies outside the bounds");
        }
    }
    // Sort row indices lexicographically so duplicates end up adjacent.
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
        order[static_cast<std::size_t>(i)] = i;
    }
    std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
        for (Eigen::Index k = 0; k < m; ++k) {
            if (inputs(a, k) != inputs(b, k)) {
                return inputs(a, k) < inputs(b, k);
            }
        }
        return false;
    });
    for (std::size_t i = 1; i < order.size(); ++i) {
        if ((inputs.row(order[i]) - inputs.row(order[i - 1])).cwiseAbs().maxCoeff() <= 1e-12) {
            throw ArgumentError("dataset '" + tool + "': duplicate input rows " + std::to_string(order[i - 1]) +
                                " and " + std::to_string(order[i]));
        }
    }
}

fs::path sidecar_path(const fs::path& csv_path) {
    fs::path p = csv_path;
    p.replace_extension(".json");
    return p;
}

Dataset load_dataset(const fs::path& csv_path) {
    if (!fs::is_regular_file(csv_path)) {
        throw LoadError("dataset file not found: " + csv_path.string());
    }
    const fs::path meta_path = sidecar_path(csv_path);
    std::ifstream meta_in(meta_path);
    if (!meta_in) {
        throw LoadError("cannot open dataset sidecar " + meta_path.string());
    }
    json meta;
    try {
        meta = json::parse(meta_in);
    } catch (const json::exception& e) {
        throw LoadError(meta_path.string() + ": " + e.what());
    }

    Dataset ds;
    ds.fidelity_tag = meta.value("fidelity", "");
    ds.tool = meta.value("tool", csv_path.stem().string());
    ds.input_names = meta.value("inputs", std::vector<std::string>{"alpha", "beta"});
    if (ds.fidelity_tag != "HF" && ds.fidelity_tag != "LF") {
        throw LoadError(meta_path.string() + ": fidelity must be \"HF\" or \"LF\"");
    }
    if (!meta.contains("bounds") || !meta["bounds"].is_object()) {
        throw LoadError(meta_path.string() + ": missing bounds");
    }
    for (const auto& name : ds.input_names) {
        const auto it = meta["bounds"].find(name);
        if (it == meta["bounds"].end() || !it->is_array() || it->size() != 2) {
            throw LoadError(meta_path.string() + ": bounds for '" + name + "' must be [lo, hi]");
        }
        ds.bounds.ranges.emplace_back((*it)[0].get<double>(), (*it)[1].get<double>());
    }

    const csv::NumericTable table = csv::read_numeric(csv_path);
    std::vector<std::size_t> input_cols;
    std::vector<std::size_t> output_cols;
    try {
        for (const auto& name : ds.input_names) {
            input_cols.push_back(table.column(name));
        }
    } catch (const LoadError& e) {
        throw LoadError(csv_path.string() + ": " + e.what());
    }
    for (std::size_t c = 0; c < table.header.size(); ++c) {
        if (std::find(input_cols.begin(), input_cols.end(), c) == input_cols.end()) {
            output_cols.push_back(c);
            ds.response_names.push_back(table.header[c]);
        }
    }
    const auto n = static_cast<Eigen::Index>(table.rows.size());
    ds.inputs.resize(n, static_cast<Eigen::Index>(input_cols.size()));
    ds.outputs.resize(n, static_cast<Eigen::Index>(output_cols.size()));
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& row = table.rows[static_cast<std::size_t>(i)];
        for (std::size_t k = 0; k < input_cols.size(); ++k) {
            ds.inputs(i, static_cast<Eigen::Index>(k)) = row[input_cols[k]];
        }
        for (std::size_t k = 0; k < output_cols.size(); ++k) {
            ds.outputs(i, static_cast<Eigen::Index>(k)) = row[output_cols[k]];
        }
    }
    try {
        ds.validate();
    } catch (const Error& e) {
        throw LoadError(csv_path.string() + ": " + e.what());
    }
    return ds;
}

void save_dataset(const Dataset& ds, const fs::path& csv_path) {
    ds.validate();
    csv::NumericTable table;
    table.header = ds.input_names;
    table.header.insert(table.header.end(), ds.response_names.begin(), ds.response_names.end());
    for (Eigen::Index i = 0; i < ds.inputs.rows(); ++i) {
        std::vector<double> row;
        row.reserve(table.header.size());
        for (Eigen::Index k = 0; k < ds.inputs.cols(); ++k) {
            row.push_back(ds.inputs(i, k));
        }
        for (Eigen::Index k = 0; k < ds.outputs.cols(); ++k) {
            row.push_back(ds.outputs(i, k));
        }
        table.rows.push_back(std::move(row));
    }
    csv::write_numeric(table, csv_path);

    json bounds = json::object();
    for (std::size_t k = 0; k < ds.input_names.size(); ++k) {
        bounds[ds.input_names[k]] = {ds.bounds.ranges[k].first, ds.bounds.ranges[k].second};
    }
    const json meta{{"fidelity", ds.fidelity_tag}, {"tool", ds.tool}, {"inputs", ds.input_names}, {"bounds", bounds}};
    std::ofstream out(sidecar_path(csv_path));
    if (!out) {
        throw Error("cannot write " + sidecar_path(csv_path).string());
    }
    out << meta.dump(2) << '\n';
}

} // namespace vdt::fusion
