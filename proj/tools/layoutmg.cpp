// layoutmg: generate instances, correct layouts, render SVGs.
//
// Exit status: 0 success, 1 runtime failure, 2 usage error.

#include "layoutmg/config.hpp"
#include "layoutmg/driver.hpp"
#include "layoutmg/svg.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

using namespace layoutmg;

namespace {

constexpr int kRuntimeError = 1;
constexpr int kUsageError = 2;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Empty path or "-" means stdout.
void emit(const std::filesystem::path& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

struct GenerateArgs {
    std::string kind = "mesh";
    int rows = 0;
    int cols = 0;
    int levels = 5;
    int length = 64;
    double perturb = 0.0;
    bool compress = false;
    int extra_edges = 0;
    std::uint64_t seed = 1;
    std::string from;
    std::string output;
};

int run_generate(const GenerateArgs& a, const CLI::App& cmd) {
    InstanceSpec spec;
    try {
        spec.kind = parse_instance_kind(a.kind);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    const bool mesh = spec.kind == InstanceKind::mesh || spec.kind == InstanceKind::mesh_holes;
    if (mesh && (cmd.count("--rows") == 0 || cmd.count("--cols") == 0))
        throw UsageError("--kind " + a.kind + " needs --rows and --cols");
    if (spec.kind == InstanceKind::from_file && a.from.empty()) throw UsageError("--kind from_file needs --from");
    spec.rows = mesh ? a.rows : 1;
    spec.cols = mesh ? a.cols : 1;
    spec.levels = a.levels;
    spec.length = a.length;
    spec.perturbation = a.perturb;
    spec.compress = a.compress;
    spec.extra_random_edges = a.extra_edges;
    spec.seed = a.seed;
    spec.path = a.from;
    try {
        spec.validate();
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    const auto [graph, layout] = generate_instance(spec);
    emit(a.output, format_graph(graph, layout));
    return 0;
}

// Values given on the command line; applied over the config file.
struct SolveFlags {
    std::string config;
    bool dump = false;
    RunConfig v;
    std::string schedule;
    std::string mode;
    bool no_edges = false;
};

RunConfig resolve(const SolveFlags& f, const CLI::App& cmd) {
    RunConfig c;
    if (!f.config.empty()) {
        try {
            merge_config_json(c, slurp(f.config));
        } catch (const std::invalid_argument& e) {
            throw UsageError(f.config + ": " + e.what());
        }
    }
    auto given = [&](const char* name) { return cmd.count(name) > 0; };
    if (given("--input")) c.input = f.v.input;
    if (given("--output")) c.output = f.v.output;
    if (given("--trace")) c.trace = f.v.trace;
    if (given("--svg")) c.svg = f.v.svg;
    if (given("--sizes")) c.overrides.sizes = f.v.overrides.sizes;
    if (given("--repeats")) c.overrides.repeats = f.v.overrides.repeats;
    if (given("--cycles")) c.overrides.cycles = f.v.overrides.cycles;
    if (given("--count")) c.overrides.count = f.v.overrides.count;
    if (given("--nu1")) c.nu1 = f.v.nu1;
    if (given("--nu2")) c.nu2 = f.v.nu2;
    if (given("--window")) c.window = f.v.window;
    if (given("--window-iters")) c.window_iters = f.v.window_iters;
    if (given("--coarsest")) c.coarsest = f.v.coarsest;
    if (given("--beta")) c.beta = f.v.beta;
    if (given("--eps-factor")) c.eps_factor = f.v.eps_factor;
    if (given("--sigma")) c.sigma = f.v.sigma;
    if (given("--slack")) c.slack = f.v.slack;
    if (given("--relax-only")) c.relax_only = true;
    if (given("--show-grid")) c.show_grid = true;
    if (given("--no-edges")) c.show_edges = false;
    try {
        if (given("--schedule")) c.schedule = parse_schedule_kind(f.schedule);
        if (given("--mode")) c.mode = parse_constraint_mode(f.mode);
        c.validate();
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    return c;
}

int run_solve(const SolveFlags& f, const CLI::App& cmd) {
    const RunConfig c = resolve(f, cmd);
    if (f.dump) {
        std::cout << dump_config(c);
        return 0;
    }
    if (c.input.empty()) throw UsageError("no input graph (use --input or the config file)");

    const auto [graph, layout] = read_graph(c.input);
    Schedule schedule;
    try {
        schedule = schedule_for(c, graph.size());
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    const CorrectionResult result = correct_layout(graph, layout, schedule, driver_params(c));

    emit(c.output, format_graph(graph, result.layout));
    if (!c.trace.empty()) {
        std::ostringstream csv;
        write_trace_csv(csv, result.trace);
        emit(c.trace, csv.str());
    }
    if (!c.svg.empty()) {
        RenderOptions ro;
        ro.show_edges = c.show_edges;
        ro.grid = c.show_grid ? result.trace.back().grid : 0;
        emit(c.svg, render_svg(graph, result.layout, ro));
    }
    const TraceRecord& last = result.trace.back();
    std::cerr << "steps " << schedule.steps.size() << "  energy " << last.energy << "  max violation "
              << last.max_violation << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multigrid layout correction with equidensity constraints"};
    app.require_subcommand(1);

    GenerateArgs gen;
    auto* generate = app.add_subcommand("generate", "Write a test instance in graph format");
    generate->add_option("--kind", gen.kind, "mesh, mesh_holes, binary_tree, snake or from_file")->capture_default_str();
    generate->add_option("--rows", gen.rows, "Mesh rows")->check(CLI::PositiveNumber);
    generate->add_option("--cols", gen.cols, "Mesh columns")->check(CLI::PositiveNumber);
    generate->add_option("--levels", gen.levels, "Binary tree levels")->capture_default_str();
    generate->add_option("--length", gen.length, "Snake length")->capture_default_str();
    generate->add_option("--perturb", gen.perturb, "Uniform per-coordinate perturbation bound")->check(CLI::NonNegativeNumber);
    generate->add_flag("--compress", gen.compress, "Squeeze the layout into the lower-left quarter");
    generate->add_option("--extra-edges", gen.extra_edges, "Random extra edges")->check(CLI::NonNegativeNumber);
    generate->add_option("--seed", gen.seed)->capture_default_str();
    generate->add_option("--from", gen.from, "Graph file for --kind from_file");
    generate->add_option("-o,--output", gen.output, "Output file (default stdout)");

    SolveFlags sf;
    auto* solve = app.add_subcommand("solve", "Correct a layout");
    solve->add_option("--config", sf.config, "JSON config; command-line flags take precedence");
    solve->add_flag("--dump-config", sf.dump, "Print the effective configuration and exit");
    solve->add_option("-i,--input", sf.v.input, "Input graph file");
    solve->add_option("-o,--output", sf.v.output, "Output graph file (default stdout)");
    solve->add_option("--trace", sf.v.trace, "Trace CSV");
    solve->add_option("--svg", sf.v.svg, "Render the result to this SVG");
    solve->add_option("--schedule", sf.schedule, "fmg, alternating or fixed");
    solve->add_option("--sizes", sf.v.overrides.sizes, "Grid sizes, comma separated")->delimiter(',');
    solve->add_option("--repeats", sf.v.overrides.repeats, "FMG repetitions");
    solve->add_option("--cycles", sf.v.overrides.cycles, "V-cycles per step");
    solve->add_option("--count", sf.v.overrides.count, "Steps of the alternating schedule");
    solve->add_option("--nu1", sf.v.nu1);
    solve->add_option("--nu2", sf.v.nu2);
    solve->add_option("--window", sf.v.window, "Window side in squares");
    solve->add_option("--window-iters", sf.v.window_iters, "Active-set iterations per window");
    solve->add_option("--coarsest", sf.v.coarsest, "Largest grid side solved directly");
    solve->add_option("--beta", sf.v.beta, "Regularization (negative: automatic)");
    solve->add_option("--eps-factor", sf.v.eps_factor, "Active-set tolerance over square area");
    solve->add_option("--sigma", sf.v.sigma, "Fraction of each correction applied");
    solve->add_option("--slack", sf.v.slack, "Capacity slack over the fill factor");
    solve->add_option("--mode", sf.mode, "inequality or equality");
    solve->add_flag("--relax-only", "Replace V-cycles by finest-level sweeps");
    solve->add_flag("--show-grid", "Overlay the last grid in --svg");
    solve->add_flag("--no-edges", "Omit edges in --svg");

    std::string render_in, render_out;
    RenderOptions ro;
    bool render_no_edges = false;
    auto* render = app.add_subcommand("render", "Render a graph file to SVG");
    render->add_option("-i,--input", render_in, "Graph file")->required();
    render->add_option("-o,--output", render_out, "SVG file (default stdout)");
    render->add_option("--grid", ro.grid, "Overlay an n x n grid")->check(CLI::NonNegativeNumber);
    render->add_option("--scale", ro.scale, "Pixels per unit")->check(CLI::PositiveNumber)->capture_default_str();
    render->add_flag("--no-edges", render_no_edges);

    std::string plot_in, plot_out;
    auto* plot = app.add_subcommand("trace-plot", "Plot energy against cycle from a trace CSV");
    plot->add_option("-i,--input", plot_in, "Trace CSV")->required();
    plot->add_option("-o,--output", plot_out, "SVG file (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsageError;
    }

    try {
        if (*generate) return run_generate(gen, *generate);
        if (*solve) return run_solve(sf, *solve);
        if (*render) {
            ro.show_edges = !render_no_edges;
            const auto [graph, layout] = read_graph(render_in);
            emit(render_out, render_svg(graph, layout, ro));
            return 0;
        }
        if (*plot) {
            std::ifstream in(plot_in);
            if (!in) throw std::runtime_error("cannot open " + plot_in);
            emit(plot_out, trace_plot_svg(read_trace_csv(in)));
            return 0;
        }
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kUsageError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kRuntimeError;
    }
    return kUsageError;
}
