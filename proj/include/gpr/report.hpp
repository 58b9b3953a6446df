#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "gpr/errors.hpp"
#include "gpr/eval.hpp"
#include "gpr/format.hpp"
#include "gpr/style.hpp"

namespace gpr {

// Free-form run provenance (seeds, configs, version); emitted as key,value
// rows. Never put wall-clock values here: report bundles must be
// byte-identical across reruns.
struct RunMetadata {
    std::vector<std::pair<std::string, std::string>> entries;

    void add(const std::string& key, const std::string& value) { entries.emplace_back(key, value); }
};

struct ReportBundle {
    std::string loss_table_csv;
    std::vector<std::string> chart_svgs; // one per attribute dimension
    std::string eval_report_csv;
    std::string metadata_csv;
};

namespace detail {

// Indices of the k smallest present entries, the same tie-break as
// select_attributes (schema order wins).
inline std::vector<std::size_t> k_smallest(const std::vector<LossEntry>& entries, int k) {
    std::vector<std::size_t> order;
    for (std::size_t i = 0; i < entries.size(); ++i)
        if (!entries[i].absent) order.push_back(i);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return entries[a].loss < entries[b].loss; });
    if (static_cast<int>(order.size()) > k) order.resize(static_cast<std::size_t>(std::max(k, 0)));
    return order;
}

} // namespace detail

// Bar chart of one dimension's losses, bars in schema order, heights linear
// in loss, the k minimum-loss bars highlighted. Each bar carries its value
// as a text label using exactly the string written to the CSV.
inline std::string bar_chart_svg(const std::string& dimension, const std::vector<LossEntry>& entries,
                                 int k_marked) {
    const int bar_w = 46, gap = 14, margin = 40;
    const int plot_h = 200, top = 50, label_h = 40;
    const int width = margin * 2 + static_cast<int>(entries.size()) * (bar_w + gap) - gap;
    const int height = top + plot_h + label_h;

    double max_loss = 0.0;
    for (const auto& e : entries)
        if (!e.absent) max_loss = std::max(max_loss, e.loss);

    auto marked = detail::k_smallest(entries, k_marked);
    auto is_marked = [&](std::size_t i) {
        return std::find(marked.begin(), marked.end(), i) != marked.end();
    };

    std::string svg;
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(width) +
           "\" height=\"" + std::to_string(height) + "\">\n";
    svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg += "<text x=\"" + std::to_string(margin) + "\" y=\"24\" font-size=\"16\" "
           "font-family=\"sans-serif\">attribute-style loss by " + dimension + "</text>\n";

    for (std::size_t i = 0; i < entries.size(); ++i) {
        const auto& e = entries[i];
        int x = margin + static_cast<int>(i) * (bar_w + gap);
        int base_y = top + plot_h;
        if (!e.absent) {
            double frac = max_loss > 0.0 ? e.loss / max_loss : 0.0;
            int h = static_cast<int>(std::lround(frac * plot_h));
            int y = base_y - h;
            const char* fill = is_marked(i) ? "#ff8c00" : "#4a7fb5";
            svg += "<rect x=\"" + std::to_string(x) + "\" y=\"" + std::to_string(y) + "\" width=\"" +
                   std::to_string(bar_w) + "\" height=\"" + std::to_string(h) + "\" fill=\"" + fill +
                   "\"/>\n";
            svg += "<text class=\"value\" x=\"" + std::to_string(x + bar_w / 2) + "\" y=\"" +
                   std::to_string(y - 4) + "\" font-size=\"8\" text-anchor=\"middle\" "
                   "font-family=\"sans-serif\">" + format_double(e.loss) + "</text>\n";
        } else {
            svg += "<text class=\"value\" x=\"" + std::to_string(x + bar_w / 2) + "\" y=\"" +
                   std::to_string(base_y - 4) + "\" font-size=\"8\" text-anchor=\"middle\" "
                   "font-family=\"sans-serif\">n/a</text>\n";
        }
        svg += "<text class=\"label\" x=\"" + std::to_string(x + bar_w / 2) + "\" y=\"" +
               std::to_string(base_y + 16) + "\" font-size=\"10\" text-anchor=\"middle\" "
               "font-family=\"sans-serif\">" + entries[i].value + "</text>\n";
    }
    svg += "<line x1=\"" + std::to_string(margin - 6) + "\" y1=\"" + std::to_string(top + plot_h) +
           "\" x2=\"" + std::to_string(width - margin + 6) + "\" y2=\"" +
           std::to_string(top + plot_h) + "\" stroke=\"black\"/>\n";
    svg += "</svg>\n";
    return svg;
}

inline void write_text_file(const std::string& text, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) raise(ErrorKind::io_error, "cannot open for writing: " + path);
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) raise(ErrorKind::io_error, "write failed: " + path);
}

// Writes the loss-table CSV, one SVG chart per dimension, the eval CSV
// (or a no_eval marker when eval was not run), and the run metadata.
inline ReportBundle emit_report(const LossTable& table, const std::optional<EvalReport>& eval,
                                const KConfig& k, const RunMetadata& metadata,
                                const std::string& out_dir) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) raise(ErrorKind::io_error, "cannot create directory: " + out_dir);

    ReportBundle bundle;
    bundle.loss_table_csv = out_dir + "/loss_table.csv";
    write_loss_table_csv(table, bundle.loss_table_csv);

    for (Dimension d : kAllDimensions) {
        std::string path = out_dir + "/chart_" + dimension_name(d) + ".svg";
        write_text_file(bar_chart_svg(dimension_name(d), table.entries(d), k.get(d)), path);
        bundle.chart_svgs.push_back(path);
    }

    bundle.eval_report_csv = out_dir + "/eval_report.csv";
    if (eval.has_value()) {
        write_eval_report_csv(*eval, bundle.eval_report_csv);
    } else {
        write_text_file("metric,value\nno_eval,1\n", bundle.eval_report_csv);
    }

    bundle.metadata_csv = out_dir + "/run_metadata.csv";
    std::string meta = "key,value\n";
    for (const auto& [key, value] : metadata.entries) meta += key + "," + value + "\n";
    write_text_file(meta, bundle.metadata_csv);
    return bundle;
}

} // namespace gpr
