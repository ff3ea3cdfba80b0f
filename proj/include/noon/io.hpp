#pragma once

// Delimited tables and key-value manifests. Output is byte-deterministic:
// numbers are printed with a fixed "%.12g" format and rows keep sweep order.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "noon/errors.hpp"

namespace noon::io {

inline constexpr const char* kUnitStamp =
    "# units: couplings and fields are X/hbar in rad/s (angular frequency); times in s; E/J dimensionless";

enum class Format { csv, tsv };

inline Format parse_format(const std::string& s) {
    if (s == "csv") return Format::csv;
    if (s == "tsv") return Format::tsv;
    throw ValidationError("unknown format '" + s + "' (expected csv or tsv)");
}

inline const char* extension(Format f) { return f == Format::csv ? ".csv" : ".tsv"; }

inline std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

inline std::string num(int v) { return std::to_string(v); }

class Table {
public:
    explicit Table(std::vector<std::string> header) : header_(std::move(header)) {}

    void add(std::vector<std::string> row) {
        if (row.size() != header_.size()) throw ValidationError("table row width does not match header");
        rows_.push_back(std::move(row));
    }

    const std::vector<std::string>& header() const { return header_; }
    const std::vector<std::vector<std::string>>& rows() const { return rows_; }

    void write(std::ostream& os, Format f) const {
        const char sep = f == Format::csv ? ',' : '\t';
        os << kUnitStamp << '\n';
        write_row(os, header_, sep);
        for (const auto& r : rows_) write_row(os, r, sep);
    }

    std::string str(Format f) const {
        std::ostringstream os;
        write(os, f);
        return os.str();
    }

private:
    static void write_row(std::ostream& os, const std::vector<std::string>& r, char sep) {
        for (std::size_t k = 0; k < r.size(); ++k) {
            if (k) os << sep;
            os << r[k];
        }
        os << '\n';
    }

    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

/// Ordered key = value listing of the resolved configuration and derived scales.
class Manifest {
public:
    void set(std::string key, std::string value) { entries_.emplace_back(std::move(key), std::move(value)); }
    void set(std::string key, double value) { set(std::move(key), num(value)); }
    void set(std::string key, int value) { set(std::move(key), num(value)); }

    const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }

    void write(std::ostream& os) const {
        os << kUnitStamp << '\n';
        for (const auto& [k, v] : entries_) os << k << " = " << v << '\n';
    }

private:
    std::vector<std::pair<std::string, std::string>> entries_;
};

inline void write_file(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write " + path.string());
    out << content;
}

}  // namespace noon::io
