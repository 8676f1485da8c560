#pragma once

#include <stdexcept>
#include <string>
#include <vector>

// Minimal self-contained SVG charts. Output is deterministic: fixed canvas,
// fixed palette, every coordinate printed with two decimals, no timestamps.

namespace lmpsim::svgplot {

struct PlotError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Series {
    std::string label;
    std::vector<double> y; // non-finite samples are skipped
};

// one <polyline class="series"> per entry plus a legend of the labels;
// x is the sample index
std::string line_chart(const std::string& title, const std::vector<Series>& series);

// one <rect class="bar"> per label/value pair, values printed above the bars
std::string bar_chart(const std::string& title,
                      const std::vector<std::string>& labels,
                      const std::vector<double>& values);

} // namespace lmpsim::svgplot
