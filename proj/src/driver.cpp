#include "layoutmg/driver.hpp"

#include <chrono>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace layoutmg {

ScheduleKind parse_schedule_kind(const std::string& name) {
    if (name == "fmg") return ScheduleKind::fmg;
    if (name == "alternating") return ScheduleKind::alternating;
    if (name == "fixed") return ScheduleKind::fixed;
    throw std::invalid_argument("unknown schedule kind '" + name + "'");
}

std::string to_string(ScheduleKind kind) {
    switch (kind) {
        case ScheduleKind::fmg: return "fmg";
        case ScheduleKind::alternating: return "alternating";
        case ScheduleKind::fixed: return "fixed";
    }
    return "?";
}

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

int grid_cap(std::size_t num_vertices) {
    int n = 2;
    while (static_cast<std::size_t>(n) * static_cast<std::size_t>(n) < num_vertices) n *= 2;
    return n;
}

Schedule make_schedule(ScheduleKind kind, std::size_t num_vertices, const ScheduleOverrides& overrides) {
    for (int n : overrides.sizes)
        if (!is_power_of_two(n)) throw std::invalid_argument("grid size " + std::to_string(n) + " is not a power of two");
    if (overrides.cycles < 1) throw std::invalid_argument("cycles per step must be at least 1");
    if (overrides.repeats < 0) throw std::invalid_argument("repeats must be non-negative");
    if (overrides.count < 0) throw std::invalid_argument("count must be non-negative");

    Schedule schedule;
    switch (kind) {
        case ScheduleKind::fmg: {
            std::vector<int> sizes = overrides.sizes;
            if (sizes.empty())
                for (int n = 2; n <= grid_cap(num_vertices); n *= 2) sizes.push_back(n);
            for (int r = 0; r < overrides.repeats; ++r)
                for (int n : sizes) {
                    schedule.steps.push_back({n, overrides.cycles});
                    schedule.steps.push_back({n, overrides.cycles});
                }
            break;
        }
        case ScheduleKind::alternating: {
            std::vector<int> sizes = overrides.sizes.empty() ? std::vector<int>{16, 32} : overrides.sizes;
            if (sizes.size() != 2) throw std::invalid_argument("alternating schedule takes exactly two sizes");
            for (int k = 0; k < overrides.count; ++k) schedule.steps.push_back({sizes[k % 2], overrides.cycles});
            break;
        }
        case ScheduleKind::fixed: {
            if (overrides.sizes.size() > 1) throw std::invalid_argument("fixed schedule takes one size");
            const int n = overrides.sizes.empty() ? grid_cap(num_vertices) : overrides.sizes.front();
            schedule.steps.push_back({n, overrides.cycles});
            break;
        }
    }
    return schedule;
}

double layout_violation(const Graph& graph, const Layout& layout, int n, double slack) {
    const Grid grid(layout.domain, n, n);
    return max_violation(density_field(grid, graph, layout, slack));
}

namespace {

Layout tentative(const Layout& layout, const CorrectionProblem& problem, const Vector& u, double sigma) {
    const auto disp = DisplacementField::from_dofs(problem.dofs, std::span<const double>(u.data(), static_cast<std::size_t>(u.size())));
    return apply_displacement(layout, problem.grid, disp, sigma);
}

}  // namespace

CorrectionResult correct_layout(const Graph& graph, const Layout& layout, const Schedule& schedule,
                                const DriverParams& params) {
    using Clock = std::chrono::steady_clock;
    CorrectionResult result;
    result.layout = layout;

    const int probe = schedule.steps.empty() ? grid_cap(graph.size()) : schedule.steps.front().grid;
    result.trace.push_back({0, probe, "baseline", 0, layout_energy(graph, layout),
                            layout_violation(graph, layout, probe, params.slack), 0.0});

    for (std::size_t k = 0; k < schedule.steps.size(); ++k) {
        const ScheduleStep& step = schedule.steps[k];
        const int index = static_cast<int>(k) + 1;
        try {
            if (!is_power_of_two(step.grid)) throw std::invalid_argument("grid size is not a power of two");
            const Grid grid(result.layout.domain, step.grid, step.grid);
            CorrectionProblem problem = assemble_problem(graph, result.layout, grid, params.slack, params.mode, params.beta);
            Hierarchy hierarchy(std::move(problem), params.multigrid);
            const CorrectionProblem& fine = hierarchy.fine_problem();
            const std::string phase = params.relax_only          ? "relax"
                                      : hierarchy.depth() == 1 ? "direct"
                                                               : "vcycle";
            const int sweeps = params.multigrid.nu1 + params.multigrid.nu2;

            Layout next = result.layout;
            for (int c = 1; c <= step.cycles; ++c) {
                const auto start = Clock::now();
                if (params.relax_only)
                    window_sweep(fine, hierarchy.state(), params.multigrid.relax, sweeps);
                else
                    hierarchy.v_cycle();
                const double ms = std::chrono::duration<double, std::milli>(Clock::now() - start).count();

                next = tentative(result.layout, fine, hierarchy.state().u, params.damping);
                result.trace.push_back({index, step.grid, phase, c, layout_energy(graph, next),
                                        layout_violation(graph, next, step.grid, params.slack), ms});
            }
            result.layout = std::move(next);
        } catch (const std::exception& e) {
            std::ostringstream msg;
            msg << "schedule step " << index << " (grid " << step.grid << "): " << e.what();
            throw std::runtime_error(msg.str());
        }
    }
    return result;
}

void write_trace_csv(std::ostream& out, const std::vector<TraceRecord>& trace) {
    out << "step,grid,phase,cycle,energy,max_violation,wall_ms\n";
    std::ostringstream line;
    line.precision(std::numeric_limits<double>::max_digits10);
    for (const auto& r : trace) {
        line.str("");
        line << r.step << ',' << r.grid << ',' << r.phase << ',' << r.cycle << ',' << r.energy << ','
             << r.max_violation << ',' << r.wall_ms << '\n';
        out << line.str();
    }
}

std::vector<TraceRecord> read_trace_csv(std::istream& in) {
    std::vector<TraceRecord> trace;
    std::string line;
    if (!std::getline(in, line)) return trace;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string field;
        while (std::getline(ss, field, ',')) fields.push_back(field);
        if (fields.size() != 7) throw std::runtime_error("trace line " + std::to_string(lineno) + ": expected 7 fields");
        try {
            trace.push_back({std::stoi(fields[0]), std::stoi(fields[1]), fields[2], std::stoi(fields[3]),
                             std::stod(fields[4]), std::stod(fields[5]), std::stod(fields[6])});
        } catch (const std::logic_error&) {
            throw std::runtime_error("trace line " + std::to_string(lineno) + ": malformed number");
        }
    }
    return trace;
}

}  // namespace layoutmg
