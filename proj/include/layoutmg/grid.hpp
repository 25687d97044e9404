#pragma once

#include "layoutmg/graph.hpp"

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace layoutmg {

/// Uniform nx x ny grid of squares over a rectangular domain.
///
/// Grid points are numbered row-major from the bottom-left corner,
/// p = j * (nx + 1) + i for column i and row j; squares likewise,
/// s = j * nx + i. Square (i, j) has corners (i, j), (i+1, j), (i, j+1),
/// (i+1, j+1).
struct Grid {
    int nx = 1;
    int ny = 1;
    Rect domain;

    Grid() = default;
    Grid(const Rect& domain, int nx, int ny);

    double hx() const { return domain.width / nx; }
    double hy() const { return domain.height / ny; }
    double square_area() const { return hx() * hy(); }

    std::size_t num_points() const { return static_cast<std::size_t>(nx + 1) * static_cast<std::size_t>(ny + 1); }
    std::size_t num_squares() const { return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny); }
    std::size_t point(int i, int j) const { return static_cast<std::size_t>(j) * (nx + 1) + static_cast<std::size_t>(i); }
    std::size_t square(int i, int j) const { return static_cast<std::size_t>(j) * nx + static_cast<std::size_t>(i); }
    int square_col(std::size_t s) const { return static_cast<int>(s % static_cast<std::size_t>(nx)); }
    int square_row(std::size_t s) const { return static_cast<int>(s / static_cast<std::size_t>(nx)); }

    Rect square_rect(int i, int j) const;

    bool operator==(const Grid&) const = default;
};

/// Halves the square counts; both must be even.
Grid coarsen_grid(const Grid& grid);

/// Bilinear interpolation weights of a point w.r.t. the corners of the square
/// containing it, ordered (lower-left, lower-right, upper-left, upper-right).
struct Stencil {
    std::array<std::size_t, 4> corners{};
    std::array<double, 4> weights{};
};

/// Points outside the domain are clamped first. A point on a shared square
/// edge is assigned to the lower-index square.
Stencil stencil_of(const Grid& grid, Point p);

/// Per-square vertex area Υ(s) and allowed area M(s).
struct DensityField {
    std::vector<double> upsilon;
    std::vector<double> capacity;
};

/// Exact overlap area of every vertex rectangle (clipped to the domain) with
/// every square.
std::vector<double> density(const Grid& grid, const Graph& graph, const Layout& layout);

/// Fill factor rho = max(1, total vertex area / domain area) * (1 + slack).
double fill_factor(const Graph& graph, const Rect& domain, double slack);

/// Density plus uniform capacities M(s) = rho * square area.
DensityField density_field(const Grid& grid, const Graph& graph, const Layout& layout, double slack);

/// max_s (Υ(s) - M(s))_+
double max_violation(const DensityField& field);

/// Numbering of the free displacement variables on a grid.
///
/// The concatenated vector is [u | v]: first the horizontal displacement of
/// every point not on the left/right boundary columns, then the vertical
/// displacement of every point not on the bottom/top rows, each in point order.
/// Eliminated (boundary-perpendicular) entries map to -1.
class DofMap {
public:
    DofMap() = default;
    explicit DofMap(const Grid& grid);

    std::size_t size() const { return owner_.size(); }
    std::size_t num_u() const { return num_u_; }

    long u(std::size_t point) const { return u_[point]; }
    long v(std::size_t point) const { return v_[point]; }
    long u(int i, int j) const { return u_[grid_.point(i, j)]; }
    long v(int i, int j) const { return v_[grid_.point(i, j)]; }

    /// Grid point carrying variable `dof`.
    std::size_t point_of(std::size_t dof) const { return owner_[dof]; }
    bool is_u(std::size_t dof) const { return dof < num_u_; }

    const Grid& grid() const { return grid_; }

private:
    Grid grid_;
    std::vector<long> u_;
    std::vector<long> v_;
    std::vector<std::size_t> owner_;
    std::size_t num_u_ = 0;
};

/// Displacements per grid point; boundary-perpendicular entries stay zero.
struct DisplacementField {
    std::vector<double> u;
    std::vector<double> v;

    static DisplacementField zero(const Grid& grid);
    static DisplacementField from_dofs(const DofMap& dofs, std::span<const double> values);
};

/// x_i += sigma * sum_p alpha_pi u_p and y_i += sigma * sum_p alpha_pi v_p with
/// the stencil of each vertex's current center; centers are then clamped
/// into the domain.
Layout apply_displacement(const Layout& layout, const Grid& grid, const DisplacementField& disp, double sigma);

}  // namespace layoutmg
