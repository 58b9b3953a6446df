#pragma once

#include <charconv>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "gpr/errors.hpp"
#include "gpr/style.hpp"

namespace gpr {

// Shortest round-trip decimal form; the same string is used everywhere a
// value appears (CSV and SVG), so emitted artifacts are byte-stable.
inline std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline double parse_double(const std::string& text, const std::string& where) {
    double v = 0.0;
    auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc{} || res.ptr != text.data() + text.size())
        raise(ErrorKind::format_error, where + ": bad number: " + text);
    return v;
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
        std::size_t comma = line.find(',', start);
        if (comma == std::string::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    return fields;
}

inline std::string loss_table_to_csv(const LossTable& table) {
    std::string out = "dimension,value,loss,samples\n";
    for (Dimension d : kAllDimensions) {
        for (const auto& e : table.entries(d)) {
            out += dimension_name(d);
            out += ',';
            out += e.value;
            out += ',';
            if (!e.absent) out += format_double(e.loss);
            out += ',';
            out += std::to_string(e.samples);
            out += '\n';
        }
    }
    return out;
}

inline void write_loss_table_csv(const LossTable& table, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) raise(ErrorKind::io_error, "cannot open for writing: " + path);
    std::string text = loss_table_to_csv(table);
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) raise(ErrorKind::io_error, "write failed: " + path);
}

inline LossTable read_loss_table_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(ErrorKind::io_error, "cannot open for reading: " + path);
    std::string line;
    if (!std::getline(in, line)) raise(ErrorKind::format_error, path + ": missing header");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "dimension,value,loss,samples")
        raise(ErrorKind::format_error, path + ": unexpected header: " + line);

    LossTable table;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto fields = split_csv_line(line);
        if (fields.size() != 4)
            raise(ErrorKind::format_error,
                  path + ": line " + std::to_string(line_no) + ": expected 4 fields");
        Dimension d;
        if (fields[0] == "background") d = Dimension::background;
        else if (fields[0] == "weather") d = Dimension::weather;
        else if (fields[0] == "illumination") d = Dimension::illumination;
        else if (fields[0] == "viewpoint") d = Dimension::viewpoint;
        else {
            raise(ErrorKind::format_error,
                  path + ": line " + std::to_string(line_no) + ": unknown dimension " + fields[0]);
        }
        LossEntry e;
        e.value = fields[1];
        if (fields[2].empty()) {
            e.absent = true;
        } else {
            e.loss = parse_double(fields[2], path + ": line " + std::to_string(line_no));
        }
        e.samples = static_cast<int>(parse_double(fields[3], path));
        table.entries(d).push_back(std::move(e));
    }
    return table;
}

} // namespace gpr
