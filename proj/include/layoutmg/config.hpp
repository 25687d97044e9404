#pragma once

#include "layoutmg/driver.hpp"
#include "layoutmg/svg.hpp"

#include <filesystem>
#include <string>

namespace layoutmg {

/// Everything a `solve` run reads. Defaults are the published settings:
/// nu1 = nu2 = 3, 4x4 windows, eps factor 1e-4, at most 6 window iterations.
struct RunConfig {
    std::filesystem::path input;
    std::filesystem::path output;
    std::filesystem::path trace;
    std::filesystem::path svg;

    ScheduleKind schedule = ScheduleKind::fmg;
    ScheduleOverrides overrides;

    int nu1 = 3;
    int nu2 = 3;
    int window = 4;
    int window_iters = 6;
    int coarsest = 4;
    /// Negative selects the default scaled to the energy Hessian.
    double beta = -1.0;
    double eps_factor = 1e-4;
    double sigma = 1.0;
    double slack = 0.05;
    ConstraintMode mode = ConstraintMode::inequality;
    bool relax_only = false;
    std::uint64_t seed = 1;

    bool show_grid = false;
    bool show_edges = true;

    /// Throws std::invalid_argument on out-of-range values.
    void validate() const;
};

std::string to_string(ConstraintMode mode);
ConstraintMode parse_constraint_mode(const std::string& name);

/// Pretty-printed JSON with every field, keys sorted.
std::string dump_config(const RunConfig& config);

/// Overlays the keys present in a JSON document onto `config`. Unknown keys
/// and ill-typed values throw std::invalid_argument.
void merge_config_json(RunConfig& config, const std::string& json_text);

DriverParams driver_params(const RunConfig& config);
Schedule schedule_for(const RunConfig& config, std::size_t num_vertices);

}  // namespace layoutmg
