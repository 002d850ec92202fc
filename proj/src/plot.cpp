#include "pmdp/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "pmdp/errors.hpp"

namespace pmdp {

namespace {

constexpr int kWidth = 860;
constexpr int kHeight = 520;
constexpr int kMarginLeft = 90;
constexpr int kMarginRight = 30;
constexpr int kMarginTop = 50;
constexpr int kMarginBottom = 60;

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

std::string fmt(double v) {
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%.17g", v);
    return buffer;
}

std::string fmt_tick(double v) {
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%.4g", v);
    return buffer;
}

std::string xml_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            default: out += c;
        }
    }
    return out;
}

} // namespace

void write_line_chart_svg(const std::filesystem::path& path, const std::string& title,
                          const std::string& y_label, const std::vector<ChartSeries>& series) {
    if (series.empty()) throw ConfigError("write_line_chart_svg: no series");
    std::size_t points = 0;
    double lo = 0.0, hi = 1.0;
    bool first = true;
    for (const ChartSeries& s : series) {
        points = std::max(points, s.values.size());
        for (double v : s.values) {
            if (first) {
                lo = hi = v;
                first = false;
            }
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    }
    if (points == 0) throw ConfigError("write_line_chart_svg: empty series");
    if (hi == lo) hi = lo + 1.0;

    const double plot_w = kWidth - kMarginLeft - kMarginRight;
    const double plot_h = kHeight - kMarginTop - kMarginBottom;
    const auto x_of = [&](std::size_t i) {
        return kMarginLeft + plot_w * (points > 1 ? static_cast<double>(i) / (points - 1) : 0.5);
    };
    const auto y_of = [&](double v) { return kMarginTop + plot_h * (1.0 - (v - lo) / (hi - lo)); };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
        << kHeight << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg << "<text x=\"" << kWidth / 2 << "\" y=\"28\" text-anchor=\"middle\" font-size=\"17\" "
           "font-family=\"sans-serif\">"
        << xml_escape(title) << "</text>\n";

    // axes
    svg << "<line x1=\"" << kMarginLeft << "\" y1=\"" << kMarginTop << "\" x2=\"" << kMarginLeft
        << "\" y2=\"" << kMarginTop + plot_h << "\" stroke=\"black\"/>\n";
    svg << "<line x1=\"" << kMarginLeft << "\" y1=\"" << kMarginTop + plot_h << "\" x2=\""
        << kMarginLeft + plot_w << "\" y2=\"" << kMarginTop + plot_h << "\" stroke=\"black\"/>\n";
    for (int tick = 0; tick <= 4; ++tick) {
        const double v = lo + (hi - lo) * tick / 4.0;
        const double y = y_of(v);
        svg << "<line x1=\"" << kMarginLeft - 4 << "\" y1=\"" << y << "\" x2=\"" << kMarginLeft
            << "\" y2=\"" << y << "\" stroke=\"black\"/>\n";
        svg << "<text x=\"" << kMarginLeft - 8 << "\" y=\"" << y + 4
            << "\" text-anchor=\"end\" font-size=\"12\" font-family=\"sans-serif\">" << fmt_tick(v)
            << "</text>\n";
        const std::size_t idx =
            static_cast<std::size_t>(std::llround((points - 1) * tick / 4.0));
        svg << "<text x=\"" << x_of(idx) << "\" y=\"" << kMarginTop + plot_h + 20
            << "\" text-anchor=\"middle\" font-size=\"12\" font-family=\"sans-serif\">"
            << (idx + 1) << "</text>\n";
    }
    svg << "<text x=\"" << kWidth / 2 << "\" y=\"" << kHeight - 14
        << "\" text-anchor=\"middle\" font-size=\"13\" font-family=\"sans-serif\">episode</text>\n";
    svg << "<text x=\"20\" y=\"" << kMarginTop + plot_h / 2
        << "\" text-anchor=\"middle\" font-size=\"13\" font-family=\"sans-serif\" "
           "transform=\"rotate(-90 20 "
        << kMarginTop + plot_h / 2 << ")\">" << xml_escape(y_label) << "</text>\n";

    for (std::size_t k = 0; k < series.size(); ++k) {
        const char* color = kPalette[k % 6];
        svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.7\" points=\"";
        for (std::size_t i = 0; i < series[k].values.size(); ++i)
            svg << x_of(i) << "," << y_of(series[k].values[i]) << " ";
        svg << "\"/>\n";
        const double ly = kMarginTop + 16.0 * static_cast<double>(k);
        svg << "<line x1=\"" << kMarginLeft + plot_w - 150 << "\" y1=\"" << ly + 8 << "\" x2=\""
            << kMarginLeft + plot_w - 128 << "\" y2=\"" << ly + 8 << "\" stroke=\"" << color
            << "\" stroke-width=\"2\"/>\n";
        svg << "<text x=\"" << kMarginLeft + plot_w - 122 << "\" y=\"" << ly + 12
            << "\" font-size=\"12\" font-family=\"sans-serif\">" << xml_escape(series[k].name)
            << "</text>\n";
    }

    svg << "<metadata id=\"series-data\">\n";
    svg << "episode";
    for (const ChartSeries& s : series) svg << "," << xml_escape(s.name);
    svg << "\n";
    for (std::size_t i = 0; i < points; ++i) {
        svg << (i + 1);
        for (const ChartSeries& s : series)
            svg << "," << (i < s.values.size() ? fmt(s.values[i]) : "");
        svg << "\n";
    }
    svg << "</metadata>\n</svg>\n";

    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write chart: " + path.string());
    out << svg.str();
}

std::vector<ChartSeries> read_chart_series(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open chart: " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    const std::string text = buffer.str();

    const auto begin = text.find("<metadata id=\"series-data\">");
    const auto end = text.find("</metadata>");
    if (begin == std::string::npos || end == std::string::npos)
        throw ConfigError("chart has no embedded data block: " + path.string());
    std::istringstream block(text.substr(begin, end - begin));
    std::string line;
    std::getline(block, line); // the metadata tag

    std::getline(block, line); // header
    std::vector<ChartSeries> series;
    {
        std::istringstream header(line);
        std::string column;
        bool first_column = true;
        while (std::getline(header, column, ',')) {
            if (first_column) {
                if (column != "episode")
                    throw ConfigError("chart data block: expected 'episode', found '" + column +
                                      "'");
                first_column = false;
                continue;
            }
            series.push_back({column, {}});
        }
    }
    while (std::getline(block, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string cell;
        std::size_t column = 0;
        while (std::getline(row, cell, ',')) {
            if (column > 0 && column - 1 < series.size() && !cell.empty())
                series[column - 1].values.push_back(std::stod(cell));
            ++column;
        }
    }
    return series;
}

void write_heatmap_svg(const std::filesystem::path& path, const std::string& title,
                       const GridSpec& grid, const std::vector<double>& cell_mass) {
    if (static_cast<int>(cell_mass.size()) != grid.num_cells())
        throw ConfigError("write_heatmap_svg: mass vector does not match the grid");
    const int cell_px = std::max(12, 440 / std::max(grid.width, grid.height));
    const int width = grid.width * cell_px + 40;
    const int height = grid.height * cell_px + 70;
    double peak = 0.0;
    for (double v : cell_mass) peak = std::max(peak, v);
    if (peak <= 0.0) peak = 1.0;

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height << "\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\" "
           "font-family=\"sans-serif\">"
        << xml_escape(title) << "</text>\n";
    for (int r = 0; r < grid.height; ++r)
        for (int c = 0; c < grid.width; ++c) {
            const int cell = grid.cell(r, c);
            std::string fill;
            if (grid.is_wall(cell)) {
                fill = "#30303a";
            } else {
                // square-root scale so small masses remain visible
                const double u = std::sqrt(cell_mass[static_cast<std::size_t>(cell)] / peak);
                const int red = static_cast<int>(255 * u);
                const int green = static_cast<int>(235 * (1.0 - 0.55 * u));
                const int blue = static_cast<int>(255 * (1.0 - u));
                char buffer[16];
                std::snprintf(buffer, sizeof(buffer), "#%02x%02x%02x", red, green, blue);
                fill = buffer;
            }
            svg << "<rect x=\"" << 20 + c * cell_px << "\" y=\"" << 40 + r * cell_px
                << "\" width=\"" << cell_px << "\" height=\"" << cell_px << "\" fill=\"" << fill
                << "\" stroke=\"#d0d0d0\"/>\n";
        }
    svg << "<metadata id=\"series-data\">\ncell,mass\n";
    for (int cell = 0; cell < grid.num_cells(); ++cell)
        svg << cell << "," << fmt(cell_mass[static_cast<std::size_t>(cell)]) << "\n";
    svg << "</metadata>\n</svg>\n";

    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write heatmap: " + path.string());
    out << svg.str();
}

} // namespace pmdp
