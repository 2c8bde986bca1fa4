#include "drsplit/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "drsplit/errors.hpp"

namespace drsplit {

namespace {

constexpr int kWidth = 720;
constexpr int kHeight = 420;
constexpr int kMarginLeft = 70;
constexpr int kMarginRight = 20;
constexpr int kMarginTop = 40;
constexpr int kMarginBottom = 45;

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

std::ofstream open_svg(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw UsageError("cannot open for writing: " + path);
    return out;
}

}  // namespace

void write_line_chart_svg(const std::string& path, const std::string& title,
                          const std::string& y_label, const std::vector<PlotSeries>& series,
                          bool log_y) {
    double y_min = std::numeric_limits<double>::infinity();
    double y_max = -std::numeric_limits<double>::infinity();
    std::size_t n_max = 0;
    for (const auto& s : series) {
        n_max = std::max(n_max, s.y.size());
        for (double v : s.y) {
            if (log_y && v <= 0.0) continue;
            const double t = log_y ? std::log10(v) : v;
            y_min = std::min(y_min, t);
            y_max = std::max(y_max, t);
        }
    }
    if (!(y_min <= y_max)) {  // nothing plottable
        y_min = 0.0;
        y_max = 1.0;
    }
    if (y_max - y_min < 1e-12) {
        y_min -= 0.5;
        y_max += 0.5;
    }

    const double plot_w = kWidth - kMarginLeft - kMarginRight;
    const double plot_h = kHeight - kMarginTop - kMarginBottom;
    const double x_span = n_max > 1 ? static_cast<double>(n_max - 1) : 1.0;
    auto px = [&](std::size_t i) {
        return kMarginLeft + plot_w * static_cast<double>(i) / x_span;
    };
    auto py = [&](double t) {
        return kMarginTop + plot_h * (1.0 - (t - y_min) / (y_max - y_min));
    };

    std::ofstream out = open_svg(path);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
        << kHeight << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << kWidth / 2 << "\" y=\"22\" text-anchor=\"middle\" "
        << "font-family=\"sans-serif\" font-size=\"15\">" << title << "</text>\n";

    // frame and horizontal grid
    out << "<rect x=\"" << kMarginLeft << "\" y=\"" << kMarginTop << "\" width=\"" << plot_w
        << "\" height=\"" << plot_h << "\" fill=\"none\" stroke=\"#444\"/>\n";
    const int n_ticks = 5;
    for (int t = 0; t <= n_ticks; ++t) {
        const double val = y_min + (y_max - y_min) * t / n_ticks;
        const double y = py(val);
        out << "<line x1=\"" << kMarginLeft << "\" y1=\"" << y << "\" x2=\""
            << kMarginLeft + plot_w << "\" y2=\"" << y
            << "\" stroke=\"#ddd\" stroke-width=\"0.5\"/>\n";
        out << "<text x=\"" << kMarginLeft - 6 << "\" y=\"" << y + 4
            << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
            << (log_y ? "1e" + num(val) : num(val)) << "</text>\n";
    }
    out << "<text x=\"" << kWidth / 2 << "\" y=\"" << kHeight - 10
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">k</text>\n";
    out << "<text x=\"16\" y=\"" << kHeight / 2
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" "
        << "transform=\"rotate(-90 16 " << kHeight / 2 << ")\">" << y_label << "</text>\n";

    for (std::size_t si = 0; si < series.size(); ++si) {
        const auto& s = series[si];
        const char* color = kPalette[si % (sizeof(kPalette) / sizeof(kPalette[0]))];
        std::string points;
        bool open = false;
        auto flush = [&]() {
            if (open && !points.empty()) {
                out << "<polyline fill=\"none\" stroke=\"" << color
                    << "\" stroke-width=\"1.5\" points=\"" << points << "\"/>\n";
            }
            points.clear();
            open = false;
        };
        for (std::size_t i = 0; i < s.y.size(); ++i) {
            const double v = s.y[i];
            if (log_y && v <= 0.0) {
                flush();
                continue;
            }
            const double t = log_y ? std::log10(v) : v;
            points += num(px(i)) + "," + num(py(t)) + " ";
            open = true;
        }
        flush();
        out << "<text x=\"" << kMarginLeft + 10 << "\" y=\"" << kMarginTop + 16 + 16 * si
            << "\" font-family=\"sans-serif\" font-size=\"12\" fill=\"" << color << "\">"
            << s.label << "</text>\n";
    }
    out << "</svg>\n";
}

void write_heatmap_svg(const std::string& path, const std::string& title,
                       const std::vector<std::string>& col_labels,
                       const std::vector<std::string>& row_labels,
                       const std::vector<double>& values) {
    const std::size_t cols = col_labels.size();
    const std::size_t rows = row_labels.size();
    if (cols == 0 || rows == 0 || values.size() != rows * cols) {
        throw UsageError("write_heatmap_svg: inconsistent grid shape");
    }
    double v_min = std::numeric_limits<double>::infinity();
    double v_max = -std::numeric_limits<double>::infinity();
    for (double v : values) {
        if (std::isnan(v)) continue;
        v_min = std::min(v_min, v);
        v_max = std::max(v_max, v);
    }
    if (!(v_min <= v_max)) {
        v_min = 0.0;
        v_max = 1.0;
    }
    const double span = v_max - v_min > 0 ? v_max - v_min : 1.0;

    const double cell_w = (kWidth - kMarginLeft - kMarginRight) / static_cast<double>(cols);
    const double cell_h = (kHeight - kMarginTop - kMarginBottom) / static_cast<double>(rows);

    std::ofstream out = open_svg(path);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
        << kHeight << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << kWidth / 2 << "\" y=\"22\" text-anchor=\"middle\" "
        << "font-family=\"sans-serif\" font-size=\"15\">" << title << "</text>\n";

    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
            const double v = values[r * cols + c];
            const double x = kMarginLeft + c * cell_w;
            const double y = kMarginTop + r * cell_h;
            if (std::isnan(v)) {
                out << "<rect x=\"" << num(x) << "\" y=\"" << num(y) << "\" width=\""
                    << num(cell_w) << "\" height=\"" << num(cell_h)
                    << "\" fill=\"none\" stroke=\"#999\"/>\n";
                continue;
            }
            const double t = (v - v_min) / span;  // 0 light, 1 dark
            const int shade = static_cast<int>(245 - 180 * t);
            out << "<rect x=\"" << num(x) << "\" y=\"" << num(y) << "\" width=\""
                << num(cell_w) << "\" height=\"" << num(cell_h) << "\" fill=\"rgb(" << shade
                << ',' << shade << ",255)\" stroke=\"#999\"/>\n";
            out << "<text x=\"" << num(x + cell_w / 2) << "\" y=\"" << num(y + cell_h / 2 + 4)
                << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
                << num(v) << "</text>\n";
        }
    }
    for (std::size_t c = 0; c < cols; ++c) {
        out << "<text x=\"" << num(kMarginLeft + (c + 0.5) * cell_w) << "\" y=\""
            << kHeight - kMarginBottom + 18
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
            << col_labels[c] << "</text>\n";
    }
    for (std::size_t r = 0; r < rows; ++r) {
        out << "<text x=\"" << kMarginLeft - 6 << "\" y=\""
            << num(kMarginTop + (r + 0.5) * cell_h + 4)
            << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
            << row_labels[r] << "</text>\n";
    }
    out << "</svg>\n";
}

}  // namespace drsplit
