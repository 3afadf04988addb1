#pragma once

// Result tables and their CSV form: `#`-prefixed metadata lines, one header
// row, then numeric rows with 17 significant digits and `\n` line endings.
//
// Metadata line kinds:
//   # config: key = value     resolved run configuration
//   # meta: key = value       code version, observable flags, wall time
//   # result: key = value     derived scalars (fit slopes, ...)

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "qdcav/config.hpp"
#include "qdcav/errors.hpp"

#ifndef QDCAV_VERSION
#define QDCAV_VERSION "unknown"
#endif

namespace qdcav {

inline std::string version() { return QDCAV_VERSION; }

struct ResultTable {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
    std::vector<std::string> config;  // "key = value"
    std::vector<std::string> meta;
    std::vector<std::string> results;

    void add_row(std::vector<double> r) {
        if (r.size() != columns.size()) {
            std::ostringstream os;
            os << "result table: row has " << r.size() << " values for " << columns.size() << " columns";
            throw DimensionError(os.str());
        }
        rows.push_back(std::move(r));
    }

    std::size_t column_index(std::string_view name) const {
        for (std::size_t i = 0; i < columns.size(); ++i)
            if (columns[i] == name) return i;
        throw DimensionError("result table: no column '" + std::string(name) + "'");
    }

    std::vector<double> column(std::string_view name) const {
        const std::size_t k = column_index(name);
        std::vector<double> out;
        out.reserve(rows.size());
        for (const auto& r : rows) out.push_back(r[k]);
        return out;
    }

    void add_result(const std::string& key, double v) { results.push_back(key + " = " + cfg::fmt(v)); }
    void add_result(const std::string& key, const std::string& v) { results.push_back(key + " = " + v); }
};

inline std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return cfg::fmt(v);
}

inline std::string to_csv(const ResultTable& t) {
    std::string s;
    for (const auto& l : t.config) s += "# config: " + l + "\n";
    for (const auto& l : t.meta) s += "# meta: " + l + "\n";
    for (const auto& l : t.results) s += "# result: " + l + "\n";
    for (std::size_t i = 0; i < t.columns.size(); ++i) s += (i ? "," : "") + t.columns[i];
    s += "\n";
    for (const auto& r : t.rows) {
        for (std::size_t i = 0; i < r.size(); ++i) s += (i ? "," : "") + format_number(r[i]);
        s += "\n";
    }
    return s;
}

// Recovers the run configuration from a CSV's `# config:` lines.
inline RunConfig config_from_csv(std::string_view csv) {
    std::istringstream in{std::string(csv)};
    std::string line, doc;
    const std::string tag = "# config: ";
    while (std::getline(in, line))
        if (line.rfind(tag, 0) == 0) doc += line.substr(tag.size()) + "\n";
    return parse_config(doc);
}

// Reads the header and numeric rows of a CSV written by to_csv.
inline ResultTable table_from_csv(std::string_view csv) {
    ResultTable t;
    std::istringstream in{std::string(csv)};
    std::string line;
    bool header = false;
    while (std::getline(in, line)) {
        if (line.rfind("# config: ", 0) == 0) {
            t.config.push_back(line.substr(10));
            continue;
        }
        if (line.rfind("# meta: ", 0) == 0) {
            t.meta.push_back(line.substr(8));
            continue;
        }
        if (line.rfind("# result: ", 0) == 0) {
            t.results.push_back(line.substr(10));
            continue;
        }
        if (line.empty() || line[0] == '#') continue;
        std::stringstream ss(line);
        std::string cell;
        if (!header) {
            while (std::getline(ss, cell, ',')) t.columns.push_back(cell);
            header = true;
            continue;
        }
        std::vector<double> row;
        while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
        t.add_row(std::move(row));
    }
    return t;
}

// Writes `content` to `path` through a sibling temporary file and a rename,
// so readers never see a half-written file.
inline void write_atomic(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open '" + tmp.string() + "' for writing");
        out << content;
        out.flush();
        if (!out) throw IoError("write to '" + tmp.string() + "' failed");
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw IoError("cannot move output into place at '" + path + "'");
    }
}

inline void write_csv(const ResultTable& t, const std::string& path) { write_atomic(path, to_csv(t)); }

inline std::string partial_path(const std::string& path) { return path + ".partial"; }

}  // namespace qdcav
