#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace emhash {

inline constexpr int csv_schema_version = 1;

std::string format_number(double x);

// RFC 4180 field quoting: fields with commas, quotes or newlines are quoted.
std::string csv_escape(const std::string& field);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    // Emitted after the rows as '#' lines; excluded from determinism checks.
    std::vector<std::string> comments;

    void write(std::ostream& out) const;
    std::string str() const;
};

// Drops '#' comment lines, for byte-level comparison of reruns.
std::string strip_csv_comments(const std::string& text);

} // namespace emhash
