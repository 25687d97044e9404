#include "layoutmg/grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace layoutmg {

Grid::Grid(const Rect& domain_, int nx_, int ny_) : nx(nx_), ny(ny_), domain(domain_) {
    if (nx < 1 || ny < 1) throw std::invalid_argument("grid needs at least one square per direction");
    if (!(domain.width > 0.0) || !(domain.height > 0.0))
        throw std::invalid_argument("grid domain must have positive extent");
}

Rect Grid::square_rect(int i, int j) const {
    return {domain.x0 + i * hx(), domain.y0 + j * hy(), hx(), hy()};
}

Grid coarsen_grid(const Grid& grid) {
    if (grid.nx % 2 != 0 || grid.ny % 2 != 0)
        throw std::invalid_argument("cannot coarsen a " + std::to_string(grid.nx) + "x" + std::to_string(grid.ny) +
                                    " grid: dimensions must be even");
    return Grid(grid.domain, grid.nx / 2, grid.ny / 2);
}

namespace {

// Cell index and local coordinate in [0, 1] along one axis.
std::pair<int, double> locate(double coord, double origin, double h, int n) {
    const double f = std::clamp((coord - origin) / h, 0.0, static_cast<double>(n));
    int cell = static_cast<int>(std::floor(f));
    if (cell > 0 && static_cast<double>(cell) == f) --cell;
    cell = std::min(cell, n - 1);
    return {cell, f - cell};
}

}  // namespace

Stencil stencil_of(const Grid& grid, Point p) {
    const auto [i, t] = locate(p.x, grid.domain.x0, grid.hx(), grid.nx);
    const auto [j, s] = locate(p.y, grid.domain.y0, grid.hy(), grid.ny);
    Stencil st;
    st.corners = {grid.point(i, j), grid.point(i + 1, j), grid.point(i, j + 1), grid.point(i + 1, j + 1)};
    st.weights = {(1.0 - t) * (1.0 - s), t * (1.0 - s), (1.0 - t) * s, t * s};
    return st;
}

std::vector<double> density(const Grid& grid, const Graph& graph, const Layout& layout) {
    std::vector<double> upsilon(grid.num_squares(), 0.0);
    const Rect& d = grid.domain;
    const double hx = grid.hx();
    const double hy = grid.hy();
    for (std::size_t k = 0; k < graph.size(); ++k) {
        const Rect r = vertex_rect(graph, layout, k);
        const double lx = std::max(r.x0, d.x0), hxr = std::min(r.x1(), d.x1());
        const double ly = std::max(r.y0, d.y0), hyr = std::min(r.y1(), d.y1());
        if (!(lx < hxr) || !(ly < hyr)) continue;
        const int i0 = std::clamp(static_cast<int>(std::floor((lx - d.x0) / hx)), 0, grid.nx - 1);
        const int i1 = std::clamp(static_cast<int>(std::ceil((hxr - d.x0) / hx)) - 1, i0, grid.nx - 1);
        const int j0 = std::clamp(static_cast<int>(std::floor((ly - d.y0) / hy)), 0, grid.ny - 1);
        const int j1 = std::clamp(static_cast<int>(std::ceil((hyr - d.y0) / hy)) - 1, j0, grid.ny - 1);
        for (int j = j0; j <= j1; ++j) {
            const double sy0 = d.y0 + j * hy;
            const double oy = std::min(hyr, sy0 + hy) - std::max(ly, sy0);
            if (oy <= 0.0) continue;
            for (int i = i0; i <= i1; ++i) {
                const double sx0 = d.x0 + i * hx;
                const double ox = std::min(hxr, sx0 + hx) - std::max(lx, sx0);
                if (ox > 0.0) upsilon[grid.square(i, j)] += ox * oy;
            }
        }
    }
    return upsilon;
}

double fill_factor(const Graph& graph, const Rect& domain, double slack) {
    return std::max(1.0, graph.total_area() / domain.area()) * (1.0 + slack);
}

DensityField density_field(const Grid& grid, const Graph& graph, const Layout& layout, double slack) {
    DensityField field;
    field.upsilon = density(grid, graph, layout);
    field.capacity.assign(grid.num_squares(), fill_factor(graph, grid.domain, slack) * grid.square_area());
    return field;
}

double max_violation(const DensityField& field) {
    double worst = 0.0;
    for (std::size_t s = 0; s < field.upsilon.size(); ++s)
        worst = std::max(worst, field.upsilon[s] - field.capacity[s]);
    return worst;
}

DofMap::DofMap(const Grid& grid) : grid_(grid) {
    const std::size_t np = grid.num_points();
    u_.assign(np, -1);
    v_.assign(np, -1);
    for (int j = 0; j <= grid.ny; ++j)
        for (int i = 1; i < grid.nx; ++i) {
            u_[grid.point(i, j)] = static_cast<long>(owner_.size());
            owner_.push_back(grid.point(i, j));
        }
    num_u_ = owner_.size();
    for (int j = 1; j < grid.ny; ++j)
        for (int i = 0; i <= grid.nx; ++i) {
            v_[grid.point(i, j)] = static_cast<long>(owner_.size());
            owner_.push_back(grid.point(i, j));
        }
}

DisplacementField DisplacementField::zero(const Grid& grid) {
    return {std::vector<double>(grid.num_points(), 0.0), std::vector<double>(grid.num_points(), 0.0)};
}

DisplacementField DisplacementField::from_dofs(const DofMap& dofs, std::span<const double> values) {
    if (values.size() != dofs.size()) throw std::invalid_argument("displacement vector has wrong size");
    DisplacementField f = zero(dofs.grid());
    for (std::size_t k = 0; k < values.size(); ++k) {
        if (dofs.is_u(k))
            f.u[dofs.point_of(k)] = values[k];
        else
            f.v[dofs.point_of(k)] = values[k];
    }
    return f;
}

Layout apply_displacement(const Layout& layout, const Grid& grid, const DisplacementField& disp, double sigma) {
    Layout out = layout;
    for (auto& p : out.positions) {
        const Stencil st = stencil_of(grid, p);
        double dx = 0.0, dy = 0.0;
        for (int c = 0; c < 4; ++c) {
            dx += st.weights[c] * disp.u[st.corners[c]];
            dy += st.weights[c] * disp.v[st.corners[c]];
        }
        p.x += sigma * dx;
        p.y += sigma * dy;
    }
    out.clamp_to_domain();
    return out;
}

}  // namespace layoutmg
