#pragma once

#include "layoutmg/multigrid.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace layoutmg {

enum class ScheduleKind { fmg, alternating, fixed };

ScheduleKind parse_schedule_kind(const std::string& name);
std::string to_string(ScheduleKind kind);

struct ScheduleStep {
    int grid = 2;
    int cycles = 1;
};

struct Schedule {
    std::vector<ScheduleStep> steps;
};

/// Unset fields fall back to the kind's defaults.
struct ScheduleOverrides {
    /// fmg: ascending sizes (each visited twice); alternating: the pair; fixed: one size.
    std::vector<int> sizes;
    int repeats = 2;
    /// V-cycles per step.
    int cycles = 1;
    /// alternating: total number of steps.
    int count = 10;
};

bool is_power_of_two(int n);

/// Smallest power of two n with n * n >= num_vertices (at least 2).
int grid_cap(std::size_t num_vertices);

/// Throws std::invalid_argument on sizes that are not powers of two or on
/// non-positive counts.
Schedule make_schedule(ScheduleKind kind, std::size_t num_vertices, const ScheduleOverrides& overrides = {});

struct DriverParams {
    MultigridOptions multigrid;
    double slack = 0.05;
    /// sigma: fraction of the computed displacement applied per step.
    double damping = 1.0;
    ConstraintMode mode = ConstraintMode::inequality;
    /// Negative selects the default scaled to the energy Hessian.
    double beta = -1.0;
    /// Replace each V-cycle by nu1 + nu2 finest-level sweeps.
    bool relax_only = false;
};

struct TraceRecord {
    int step = 0;
    int grid = 0;
    /// baseline, vcycle, direct or relax.
    std::string phase;
    int cycle = 0;
    double energy = 0.0;
    double max_violation = 0.0;
    double wall_ms = 0.0;
};

struct CorrectionResult {
    Layout layout;
    std::vector<TraceRecord> trace;
};

/// Outer nonlinear loop. Each step linearizes around the current layout on an
/// n x n grid, runs its V-cycles from a zero correction and applies the
/// result. Energy and violation are recorded for the layout the correction
/// would give after every cycle.
CorrectionResult correct_layout(const Graph& graph, const Layout& layout, const Schedule& schedule,
                                const DriverParams& params);

/// max_s (Υ(s) - M(s))_+ on an n x n grid over the layout's domain.
double layout_violation(const Graph& graph, const Layout& layout, int n, double slack);

void write_trace_csv(std::ostream& out, const std::vector<TraceRecord>& trace);
std::vector<TraceRecord> read_trace_csv(std::istream& in);

}  // namespace layoutmg
