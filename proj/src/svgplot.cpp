#include "lmpsim/svgplot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace lmpsim::svgplot {

namespace {

constexpr double kWidth = 800.0, kHeight = 450.0;
constexpr double kLeft = 62.0, kRight = 20.0, kTop = 34.0, kBottom = 42.0;
constexpr double kPlotW = kWidth - kLeft - kRight;
constexpr double kPlotH = kHeight - kTop - kBottom;

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                          "#9467bd", "#8c564b", "#17becf", "#7f7f7f"};
constexpr std::size_t kPaletteN = sizeof kPalette / sizeof *kPalette;

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '&') out += "&amp;";
        else if (c == '<') out += "&lt;";
        else if (c == '>') out += "&gt;";
        else out += c;
    }
    return out;
}

struct Range {
    double lo = 0.0, hi = 1.0;
    double map(double v, double px_lo, double px_hi) const {
        return px_lo + (v - lo) / (hi - lo) * (px_hi - px_lo);
    }
};

Range y_range(double lo, double hi) {
    if (!(lo < hi)) {
        lo -= 1.0;
        hi += 1.0;
    }
    const double pad = 0.05 * (hi - lo);
    return {lo - pad, hi + pad};
}

std::string header(const std::string& title) {
    std::string svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" "
                      "height=\"450\" viewBox=\"0 0 800 450\">\n";
    svg += "<rect width=\"800\" height=\"450\" fill=\"white\"/>\n";
    svg += "<text class=\"title\" x=\"" + fmt(kWidth / 2) +
           "\" y=\"20\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"14\">" +
           escape(title) + "</text>\n";
    return svg;
}

std::string axes(const Range& yr) {
    std::string svg;
    const double x0 = kLeft, x1 = kLeft + kPlotW;
    const double y0 = kTop + kPlotH, y1 = kTop;
    svg += "<line x1=\"" + fmt(x0) + "\" y1=\"" + fmt(y0) + "\" x2=\"" + fmt(x1) +
           "\" y2=\"" + fmt(y0) + "\" stroke=\"black\"/>\n";
    svg += "<line x1=\"" + fmt(x0) + "\" y1=\"" + fmt(y0) + "\" x2=\"" + fmt(x0) +
           "\" y2=\"" + fmt(y1) + "\" stroke=\"black\"/>\n";
    // min / zero / max labels on the y axis
    for (double v : {yr.lo, 0.0, yr.hi}) {
        if (v < yr.lo || v > yr.hi) continue;
        const double py = yr.map(v, y0, y1);
        svg += "<line x1=\"" + fmt(x0 - 4) + "\" y1=\"" + fmt(py) + "\" x2=\"" +
               fmt(x0) + "\" y2=\"" + fmt(py) + "\" stroke=\"black\"/>\n";
        svg += "<text x=\"" + fmt(x0 - 8) + "\" y=\"" + fmt(py + 4) +
               "\" text-anchor=\"end\" font-family=\"sans-serif\" "
               "font-size=\"11\">" +
               fmt(v) + "</text>\n";
        if (v == 0.0 && yr.lo < 0.0)
            svg += "<line x1=\"" + fmt(x0) + "\" y1=\"" + fmt(py) + "\" x2=\"" +
                   fmt(x1) + "\" y2=\"" + fmt(py) +
                   "\" stroke=\"#cccccc\" stroke-dasharray=\"4 3\"/>\n";
    }
    return svg;
}

} // namespace

std::string line_chart(const std::string& title,
                       const std::vector<Series>& series) {
    if (series.empty()) throw PlotError("line chart needs at least one series");
    std::size_t n = 0;
    double lo = 1e300, hi = -1e300;
    for (const auto& s : series) {
        n = std::max(n, s.y.size());
        for (double v : s.y)
            if (std::isfinite(v)) {
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
    }
    if (n == 0 || lo > hi) throw PlotError("line chart has no finite samples");
    const Range yr = y_range(lo, hi);

    std::string svg = header(title) + axes(yr);
    const double y0 = kTop + kPlotH, y1 = kTop;
    for (std::size_t si = 0; si < series.size(); ++si) {
        const auto& s = series[si];
        std::string pts;
        for (std::size_t i = 0; i < s.y.size(); ++i) {
            if (!std::isfinite(s.y[i])) continue;
            const double px =
                s.y.size() > 1 ? kLeft + kPlotW * double(i) / double(s.y.size() - 1)
                               : kLeft + kPlotW / 2;
            if (!pts.empty()) pts += ' ';
            pts += fmt(px) + "," + fmt(yr.map(s.y[i], y0, y1));
        }
        svg += "<polyline class=\"series\" fill=\"none\" stroke=\"";
        svg += kPalette[si % kPaletteN];
        svg += "\" stroke-width=\"1.2\" points=\"" + pts + "\"/>\n";
    }
    // legend, top-right, one row per series
    for (std::size_t si = 0; si < series.size(); ++si) {
        const double ly = kTop + 14.0 * double(si + 1);
        const double lx = kLeft + kPlotW - 130.0;
        svg += "<line x1=\"" + fmt(lx) + "\" y1=\"" + fmt(ly - 4) + "\" x2=\"" +
               fmt(lx + 18) + "\" y2=\"" + fmt(ly - 4) + "\" stroke=\"";
        svg += kPalette[si % kPaletteN];
        svg += "\" stroke-width=\"2\"/>\n";
        svg += "<text class=\"legend\" x=\"" + fmt(lx + 24) + "\" y=\"" + fmt(ly) +
               "\" font-family=\"sans-serif\" font-size=\"11\">" +
               escape(series[si].label) + "</text>\n";
    }
    svg += "</svg>\n";
    return svg;
}

std::string bar_chart(const std::string& title,
                      const std::vector<std::string>& labels,
                      const std::vector<double>& values) {
    if (labels.size() != values.size() || labels.empty())
        throw PlotError("bar chart needs matching non-empty labels and values");
    double lo = 0.0, hi = 0.0;
    for (double v : values) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    const Range yr = y_range(lo, hi);
    std::string svg = header(title) + axes(yr);
    const double y0 = kTop + kPlotH, y1 = kTop;
    const double slot = kPlotW / double(labels.size());
    const double bw = slot * 0.6;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const double cx = kLeft + slot * (double(i) + 0.5);
        const double py_v = yr.map(values[i], y0, y1);
        const double py_0 = yr.map(0.0, y0, y1);
        const double top = std::min(py_v, py_0);
        const double h = std::fabs(py_v - py_0);
        svg += "<rect class=\"bar\" x=\"" + fmt(cx - bw / 2) + "\" y=\"" + fmt(top) +
               "\" width=\"" + fmt(bw) + "\" height=\"" + fmt(h) +
               "\" fill=\"#1f77b4\"/>\n";
        svg += "<text x=\"" + fmt(cx) + "\" y=\"" + fmt(top - 5) +
               "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
               "font-size=\"11\">" +
               fmt(values[i]) + "</text>\n";
        svg += "<text x=\"" + fmt(cx) + "\" y=\"" + fmt(y0 + 16) +
               "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
               "font-size=\"11\">" +
               escape(labels[i]) + "</text>\n";
    }
    svg += "</svg>\n";
    return svg;
}

} // namespace lmpsim::svgplot
