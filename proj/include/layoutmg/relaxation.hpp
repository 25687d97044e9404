#pragma once

#include "layoutmg/assembly.hpp"

#include <cstddef>
#include <vector>

namespace layoutmg {

/// Block of squares [sx, sx + mx) x [sy, sy + my) on a problem's grid, with
/// the displacement variables it may change.
///
/// Free variables are the horizontal displacements strictly inside the block
/// horizontally (top and bottom edges included) and the vertical ones strictly
/// inside vertically (left and right edges included). Everything else stays
/// frozen during a window solve.
struct Window {
    int sx = 0;
    int sy = 0;
    int mx = 0;
    int my = 0;
    std::vector<std::size_t> dofs;
    std::vector<std::size_t> squares;
    /// Squares outside the block whose rows involve free variables.
    std::vector<std::size_t> ring;

    bool contains_square(int i, int j) const { return i >= sx && i < sx + mx && j >= sy && j < sy + my; }
};

/// Window clipped to the grid; an empty window when nothing remains. A closed
/// window also frees the displacements on its boundary normal to it (those on
/// the domain boundary stay eliminated).
Window make_window(const CorrectionProblem& problem, int sx, int sy, int mx, int my, bool closed = false);

enum class WindowOrdering {
    /// Windows of one color see each other's updates (Gauss-Seidel order).
    sequential,
    /// Windows of one color all start from the same snapshot; may run on threads.
    colored,
};

struct RelaxOptions {
    int window = 4;
    int max_iters = 6;
    /// Active-set tolerance as a fraction of the square area.
    double eps_factor = 1e-4;
    /// Weight of the proximal term |delta|^2 added to inequality window solves.
    double proximal = 1.0;
    /// Equality mode: proximal weight relative to the mean diagonal of the
    /// window Hessian. Every window row is active there, so the term only
    /// guards against a singular Hessian.
    double equality_proximal = 1e-2;
    /// Equality mode: also free the window-boundary displacements normal to
    /// the boundary, so every window square has all four faces free.
    bool closed_equality_windows = true;
    double step_tol = 1e-10;
    /// Inequality mode: negative diagonal on the active rows, relative to the
    /// window Hessian, so dependent or inconsistent active sets stay solvable.
    double dual_reg = 1e-3;
    WindowOrdering ordering = WindowOrdering::colored;
    int threads = 1;
};

/// One iteration of the window active-set loop, for diagnostics.
struct WindowIteration {
    std::vector<std::size_t> active;
    std::vector<double> lambda;
    std::vector<std::size_t> dropped;
    double theta = 1.0;
    double step_norm = 0.0;
};

struct WindowReport {
    int iterations = 0;
    bool skipped = false;
    std::vector<WindowIteration> log;
};

/// Approximate constrained minimization over one window by a simplified
/// active-set method. Only `state.u` entries in window.dofs and multipliers of
/// window squares change.
WindowReport single_window_solve(const Window& window, const CorrectionProblem& problem, SolverState& state,
                                 const RelaxOptions& options, bool keep_log = false);

struct RelaxStats {
    std::size_t windows = 0;
    std::size_t iterations = 0;
    std::size_t skipped = 0;

    RelaxStats& operator+=(const RelaxStats& o) {
        windows += o.windows;
        iterations += o.iterations;
        skipped += o.skipped;
        return *this;
    }
};

/// `sweeps` relaxation sweeps. Each sweep covers the domain three times in
/// red-black window order: unshifted, shifted by half a window horizontally,
/// then shifted by half a window vertically. Closed equality windows use four
/// colors instead of two.
RelaxStats window_sweep(const CorrectionProblem& problem, SolverState& state, const RelaxOptions& options,
                        int sweeps = 1);

/// Energy E(u) before and after each of `count` sweeps.
std::vector<double> energy_trace_sweeps(const CorrectionProblem& problem, SolverState& state,
                                        const RelaxOptions& options, int count);

/// Thread count from LAYOUTMG_THREADS (default 1).
int threads_from_env();

}  // namespace layoutmg
