#include "layoutmg/config.hpp"

#include <json.hpp>

#include <stdexcept>

namespace layoutmg {

using nlohmann::json;

std::string to_string(ConstraintMode mode) { return mode == ConstraintMode::equality ? "equality" : "inequality"; }

ConstraintMode parse_constraint_mode(const std::string& name) {
    if (name == "equality") return ConstraintMode::equality;
    if (name == "inequality") return ConstraintMode::inequality;
    throw std::invalid_argument("unknown constraint mode '" + name + "'");
}

void RunConfig::validate() const {
    auto require = [](bool ok, const char* what) {
        if (!ok) throw std::invalid_argument(what);
    };
    require(nu1 >= 0 && nu2 >= 0, "nu1 and nu2 must be non-negative");
    require(window >= 1, "window must be at least 1");
    require(window_iters >= 1, "window_iters must be at least 1");
    require(coarsest >= 1, "coarsest must be at least 1");
    require(eps_factor >= 0.0, "eps_factor must be non-negative");
    require(sigma > 0.0 && sigma <= 1.0, "sigma must lie in (0, 1]");
    require(slack >= 0.0, "slack must be non-negative");
    for (int n : overrides.sizes)
        if (!is_power_of_two(n)) throw std::invalid_argument("grid size " + std::to_string(n) + " is not a power of two");
}

std::string dump_config(const RunConfig& c) {
    // nlohmann::json orders object keys alphabetically.
    json j = {
        {"input", c.input.string()},
        {"output", c.output.string()},
        {"trace", c.trace.string()},
        {"svg", c.svg.string()},
        {"schedule", to_string(c.schedule)},
        {"sizes", c.overrides.sizes},
        {"repeats", c.overrides.repeats},
        {"cycles", c.overrides.cycles},
        {"count", c.overrides.count},
        {"nu1", c.nu1},
        {"nu2", c.nu2},
        {"window", c.window},
        {"window_iters", c.window_iters},
        {"coarsest", c.coarsest},
        {"beta", c.beta},
        {"eps_factor", c.eps_factor},
        {"sigma", c.sigma},
        {"slack", c.slack},
        {"mode", to_string(c.mode)},
        {"relax_only", c.relax_only},
        {"seed", c.seed},
        {"show_grid", c.show_grid},
        {"show_edges", c.show_edges},
    };
    return j.dump(2) + "\n";
}

void merge_config_json(RunConfig& c, const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw std::invalid_argument("config must be a JSON object");

    for (auto it = j.begin(); it != j.end(); ++it) {
        const std::string& key = it.key();
        const json& v = it.value();
        try {
            if (key == "input") c.input = v.get<std::string>();
            else if (key == "output") c.output = v.get<std::string>();
            else if (key == "trace") c.trace = v.get<std::string>();
            else if (key == "svg") c.svg = v.get<std::string>();
            else if (key == "schedule") c.schedule = parse_schedule_kind(v.get<std::string>());
            else if (key == "sizes") c.overrides.sizes = v.get<std::vector<int>>();
            else if (key == "repeats") c.overrides.repeats = v.get<int>();
            else if (key == "cycles") c.overrides.cycles = v.get<int>();
            else if (key == "count") c.overrides.count = v.get<int>();
            else if (key == "nu1") c.nu1 = v.get<int>();
            else if (key == "nu2") c.nu2 = v.get<int>();
            else if (key == "window") c.window = v.get<int>();
            else if (key == "window_iters") c.window_iters = v.get<int>();
            else if (key == "coarsest") c.coarsest = v.get<int>();
            else if (key == "beta") c.beta = v.get<double>();
            else if (key == "eps_factor") c.eps_factor = v.get<double>();
            else if (key == "sigma") c.sigma = v.get<double>();
            else if (key == "slack") c.slack = v.get<double>();
            else if (key == "mode") c.mode = parse_constraint_mode(v.get<std::string>());
            else if (key == "relax_only") c.relax_only = v.get<bool>();
            else if (key == "seed") c.seed = v.get<std::uint64_t>();
            else if (key == "show_grid") c.show_grid = v.get<bool>();
            else if (key == "show_edges") c.show_edges = v.get<bool>();
            else throw std::invalid_argument("unknown config key '" + key + "'");
        } catch (const json::exception& e) {
            throw std::invalid_argument("config key '" + key + "': " + e.what());
        }
    }
}

DriverParams driver_params(const RunConfig& c) {
    DriverParams p;
    p.multigrid.nu1 = c.nu1;
    p.multigrid.nu2 = c.nu2;
    p.multigrid.coarsest = c.coarsest;
    p.multigrid.relax.window = c.window;
    p.multigrid.relax.max_iters = c.window_iters;
    p.multigrid.relax.eps_factor = c.eps_factor;
    p.multigrid.relax.threads = threads_from_env();
    p.slack = c.slack;
    p.damping = c.sigma;
    p.mode = c.mode;
    p.beta = c.beta;
    p.relax_only = c.relax_only;
    return p;
}

Schedule schedule_for(const RunConfig& c, std::size_t num_vertices) {
    return make_schedule(c.schedule, num_vertices, c.overrides);
}

}  // namespace layoutmg
