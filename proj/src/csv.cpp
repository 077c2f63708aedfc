#include <emhash/csv.hpp>

#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

namespace emhash {

std::string format_number(double x) {
    if (std::isnan(x))
        return "nan";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", x);
    return buf;
}

std::string csv_escape(const std::string& field) {
    if (field.find_first_of(",\"\r\n") == std::string::npos)
        return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"')
            out += '"';
        out += c;
    }
    out += '"';
    return out;
}

namespace {

void write_line(std::ostream& out, const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i)
            out << ',';
        out << csv_escape(fields[i]);
    }
    out << '\n';
}

} // namespace

void CsvTable::write(std::ostream& out) const {
    write_line(out, header);
    for (const auto& row : rows)
        write_line(out, row);
    for (const auto& c : comments)
        out << "# " << c << '\n';
}

std::string CsvTable::str() const {
    std::ostringstream out;
    write(out);
    return out.str();
}

std::string strip_csv_comments(const std::string& text) {
    std::istringstream in(text);
    std::string line, out;
    while (std::getline(in, line)) {
        if (!line.empty() && line.front() == '#')
            continue;
        out += line;
        out += '\n';
    }
    return out;
}

} // namespace emhash
