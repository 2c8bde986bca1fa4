#pragma once

#include <string>
#include <vector>

namespace drsplit {

struct PlotSeries {
    std::string label;
    std::vector<double> y;  // plotted against the 1-based index
};

/// Static line chart. With log_y, non-positive samples are skipped (the
/// polyline breaks around them).
void write_line_chart_svg(const std::string& path, const std::string& title,
                          const std::string& y_label, const std::vector<PlotSeries>& series,
                          bool log_y);

/// Grid heatmap; values laid out row-major, NaN cells drawn hollow.
void write_heatmap_svg(const std::string& path, const std::string& title,
                       const std::vector<std::string>& col_labels,
                       const std::vector<std::string>& row_labels,
                       const std::vector<double>& values);

}  // namespace drsplit
