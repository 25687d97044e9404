#include "layoutmg/svg.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

namespace layoutmg {

namespace {

class Writer {
public:
    Writer() { out_ << std::fixed << std::setprecision(6); }

    template <class T>
    Writer& operator<<(const T& v) {
        out_ << v;
        return *this;
    }

    std::string str() const { return out_.str(); }

private:
    std::ostringstream out_;
};

void header(Writer& w, double width, double height) {
    w << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
}

}  // namespace

std::string render_svg(const Graph& graph, const Layout& layout, const RenderOptions& options) {
    const Rect& dom = layout.domain;
    const double s = options.scale;
    const double pad = 10.0;
    auto px = [&](double x) { return pad + (x - dom.x0) * s; };
    auto py = [&](double y) { return pad + (dom.y1() - y) * s; };

    Writer w;
    header(w, dom.width * s + 2 * pad, dom.height * s + 2 * pad);
    // A path rather than a rect, so rect elements are exactly the vertices.
    w << "<path class=\"domain\" d=\"M " << px(dom.x0) << ' ' << py(dom.y1()) << " H " << px(dom.x1()) << " V "
      << py(dom.y0) << " H " << px(dom.x0) << " Z\" fill=\"none\" stroke=\"black\" stroke-width=\"1.000000\"/>\n";

    if (options.grid > 0) {
        const Grid grid(dom, options.grid, options.grid);
        w << "<g class=\"grid\" stroke=\"#bbbbbb\" stroke-width=\"0.500000\">\n";
        for (int i = 1; i < grid.nx; ++i) {
            const double x = dom.x0 + i * grid.hx();
            w << "<line x1=\"" << px(x) << "\" y1=\"" << py(dom.y0) << "\" x2=\"" << px(x) << "\" y2=\"" << py(dom.y1())
              << "\"/>\n";
        }
        for (int j = 1; j < grid.ny; ++j) {
            const double y = dom.y0 + j * grid.hy();
            w << "<line x1=\"" << px(dom.x0) << "\" y1=\"" << py(y) << "\" x2=\"" << px(dom.x1()) << "\" y2=\"" << py(y)
              << "\"/>\n";
        }
        w << "</g>\n";
    }

    if (options.show_edges && !graph.edges().empty()) {
        w << "<g class=\"edges\" stroke=\"#1f4e99\" stroke-width=\"1.000000\">\n";
        for (const auto& e : graph.edges()) {
            const Point& a = layout.positions[e.i];
            const Point& b = layout.positions[e.j];
            w << "<line x1=\"" << px(a.x) << "\" y1=\"" << py(a.y) << "\" x2=\"" << px(b.x) << "\" y2=\"" << py(b.y)
              << "\"/>\n";
        }
        w << "</g>\n";
    }

    if (!graph.empty()) {
        w << "<g class=\"vertices\" fill=\"#f2c14e\" fill-opacity=\"0.600000\" stroke=\"#7a5b00\" "
             "stroke-width=\"0.500000\">\n";
        for (std::size_t i = 0; i < graph.size(); ++i) {
            const Rect r = vertex_rect(graph, layout, i);
            w << "<rect x=\"" << px(r.x0) << "\" y=\"" << py(r.y1()) << "\" width=\"" << r.width * s << "\" height=\""
              << r.height * s << "\"/>\n";
        }
        w << "</g>\n";
    }
    w << "</svg>\n";
    return w.str();
}

std::string trace_plot_svg(const std::vector<TraceRecord>& trace, double width, double height) {
    const double left = 70.0, right = 20.0, top = 20.0, bottom = 40.0;
    const double pw = width - left - right;
    const double ph = height - top - bottom;

    double lo = 0.0, hi = 1.0;
    if (!trace.empty()) {
        const auto [mn, mx] = std::minmax_element(trace.begin(), trace.end(),
                                                  [](const auto& a, const auto& b) { return a.energy < b.energy; });
        lo = mn->energy;
        hi = mx->energy;
    }
    if (!(hi > lo)) {
        lo -= 0.5;
        hi += 0.5;
    }
    const std::size_t n = trace.size();
    auto px = [&](std::size_t k) { return left + (n > 1 ? pw * static_cast<double>(k) / static_cast<double>(n - 1) : pw / 2); };
    auto py = [&](double e) { return top + ph * (hi - e) / (hi - lo); };

    Writer w;
    header(w, width, height);
    w << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
      << "\" fill=\"none\" stroke=\"black\" stroke-width=\"1.000000\"/>\n";
    w << "<text x=\"" << left - 6 << "\" y=\"" << top + 4 << "\" font-size=\"11\" text-anchor=\"end\">" << hi
      << "</text>\n";
    w << "<text x=\"" << left - 6 << "\" y=\"" << top + ph << "\" font-size=\"11\" text-anchor=\"end\">" << lo
      << "</text>\n";
    w << "<text x=\"" << left + pw / 2 << "\" y=\"" << height - 10 << "\" font-size=\"12\" text-anchor=\"middle\">"
      << "cycle</text>\n";

    for (std::size_t k = 1; k < n; ++k)
        if (trace[k].step != trace[k - 1].step)
            w << "<line x1=\"" << px(k) << "\" y1=\"" << top << "\" x2=\"" << px(k) << "\" y2=\"" << top + ph
              << "\" stroke=\"#cccccc\" stroke-dasharray=\"3,3\"/>\n";

    if (n > 0) {
        w << "<polyline fill=\"none\" stroke=\"#c0392b\" stroke-width=\"1.500000\" points=\"";
        for (std::size_t k = 0; k < n; ++k) w << (k ? " " : "") << px(k) << ',' << py(trace[k].energy);
        w << "\"/>\n";
        for (std::size_t k = 0; k < n; ++k)
            w << "<circle cx=\"" << px(k) << "\" cy=\"" << py(trace[k].energy) << "\" r=\"2.500000\" fill=\""
              << (trace[k].grid == trace.front().grid ? "#c0392b" : "#2c3e50") << "\"/>\n";
    }
    w << "</svg>\n";
    return w.str();
}

}  // namespace layoutmg
