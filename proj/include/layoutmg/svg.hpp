#pragma once

#include "layoutmg/driver.hpp"

#include <string>
#include <vector>

namespace layoutmg {

struct RenderOptions {
    /// Pixels per layout unit.
    double scale = 20.0;
    bool show_edges = true;
    /// Squares per side of the overlay grid; 0 draws none.
    int grid = 0;
};

/// Domain frame, then edges, then one rectangle per vertex, in input order.
/// Layout +y points up in the picture. Numbers use six fixed decimals, so equal
/// inputs give byte-identical documents.
std::string render_svg(const Graph& graph, const Layout& layout, const RenderOptions& options = {});

/// Line chart of energy over the trace records, one marker per record and a
/// dashed vertical rule at every outer step boundary.
std::string trace_plot_svg(const std::vector<TraceRecord>& trace, double width = 640.0, double height = 360.0);

}  // namespace layoutmg
