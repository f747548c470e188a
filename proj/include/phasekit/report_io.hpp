#pragma once

#include <charconv>
#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace phasekit {

// Round-trip-exact decimal rendering: 17 significant digits, locale-free.
inline std::string fmt17(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

// Tabular report shared by every subcommand; rendered as CSV (default) or as
// a JSON document with the same content.  Byte output is a pure function of
// the report, so identical runs produce identical files.
struct Report {
    std::string command;
    std::string config_echo;
    std::vector<std::string> warnings;
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows; // cells pre-rendered
    std::vector<std::pair<std::string, std::string>> footer;

    void add_row(std::vector<std::string> cells) { rows.push_back(std::move(cells)); }
};

inline std::string render_csv(const Report& r) {
    std::ostringstream os;
    os << "# phasekit " << r.command << "\n";
    os << "# config: " << r.config_echo << "\n";
    for (const auto& w : r.warnings) os << "# warning: " << w << "\n";
    for (std::size_t i = 0; i < r.columns.size(); ++i) {
        if (i) os << ",";
        os << r.columns[i];
    }
    os << "\n";
    for (const auto& row : r.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) os << ",";
            os << row[i];
        }
        os << "\n";
    }
    for (const auto& [key, value] : r.footer) os << "# " << key << " = " << value << "\n";
    return os.str();
}

namespace detail {

inline std::string json_escape(const std::string& s) {
    std::string out;
    out.reserve(s.size() + 2);
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            default: out += c;
        }
    }
    return out;
}

// Report cells are either numbers already rendered by fmt17, plain integers,
// or words; quote anything that does not parse as a JSON number.
inline bool looks_numeric(const std::string& s) {
    if (s.empty()) return false;
    char* end = nullptr;
    (void)std::strtod(s.c_str(), &end);
    return end == s.c_str() + s.size();
}

inline std::string json_cell(const std::string& s) {
    if (looks_numeric(s)) return s;
    return "\"" + json_escape(s) + "\"";
}

} // namespace detail

inline std::string render_json(const Report& r) {
    std::ostringstream os;
    os << "{\n";
    os << "  \"command\": \"" << detail::json_escape(r.command) << "\",\n";
    os << "  \"config\": " << r.config_echo << ",\n";
    os << "  \"warnings\": [";
    for (std::size_t i = 0; i < r.warnings.size(); ++i) {
        if (i) os << ", ";
        os << "\"" << detail::json_escape(r.warnings[i]) << "\"";
    }
    os << "],\n";
    os << "  \"columns\": [";
    for (std::size_t i = 0; i < r.columns.size(); ++i) {
        if (i) os << ", ";
        os << "\"" << detail::json_escape(r.columns[i]) << "\"";
    }
    os << "],\n";
    os << "  \"rows\": [";
    for (std::size_t i = 0; i < r.rows.size(); ++i) {
        os << (i ? ",\n    [" : "\n    [");
        for (std::size_t j = 0; j < r.rows[i].size(); ++j) {
            if (j) os << ", ";
            os << detail::json_cell(r.rows[i][j]);
        }
        os << "]";
    }
    os << (r.rows.empty() ? "],\n" : "\n  ],\n");
    os << "  \"footer\": {";
    for (std::size_t i = 0; i < r.footer.size(); ++i) {
        if (i) os << ", ";
        os << "\"" << detail::json_escape(r.footer[i].first)
           << "\": " << detail::json_cell(r.footer[i].second);
    }
    os << "}\n}\n";
    return os.str();
}

inline std::string render_report(const Report& r, const std::string& format) {
    if (format == "csv") return render_csv(r);
    if (format == "json") return render_json(r);
    throw std::invalid_argument("render_report: unknown format '" + format + "'");
}

} // namespace phasekit
