#include "layoutmg/graph.hpp"

#include "layoutmg/random.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace layoutmg {

namespace {

std::uint64_t pair_key(std::size_t i, std::size_t j) {
    if (i > j) std::swap(i, j);
    return (static_cast<std::uint64_t>(i) << 32) | static_cast<std::uint64_t>(j);
}

}  // namespace

Graph::Graph(std::vector<Vertex> vertices, std::vector<Edge> edges)
    : vertices_(std::move(vertices)), edges_(std::move(edges)) {}

double Graph::total_area() const {
    double total = 0.0;
    for (const auto& v : vertices_) total += v.area();
    return total;
}

void Graph::validate() const {
    std::unordered_set<std::int64_t> ids;
    for (const auto& v : vertices_) {
        if (!(v.width > 0.0) || !(v.height > 0.0))
            throw GraphError("vertex " + std::to_string(v.id) + " has non-positive area");
        if (!ids.insert(v.id).second)
            throw GraphError("duplicate vertex id " + std::to_string(v.id));
    }
    std::unordered_set<std::uint64_t> pairs;
    for (const auto& e : edges_) {
        if (e.i >= vertices_.size() || e.j >= vertices_.size())
            throw GraphError("edge endpoint out of range");
        if (e.i == e.j) throw GraphError("self-loop on vertex " + std::to_string(vertices_[e.i].id));
        if (!(e.w >= 0.0) || !std::isfinite(e.w)) throw GraphError("negative or non-finite edge weight");
        if (!pairs.insert(pair_key(e.i, e.j)).second)
            throw GraphError("repeated edge " + std::to_string(vertices_[e.i].id) + " " +
                             std::to_string(vertices_[e.j].id));
    }
}

void Layout::clamp_to_domain() {
    for (auto& p : positions) {
        p.x = std::clamp(p.x, domain.x0, domain.x1());
        p.y = std::clamp(p.y, domain.y0, domain.y1());
    }
}

Rect vertex_rect(const Graph& graph, const Layout& layout, std::size_t i) {
    const auto& v = graph.vertices()[i];
    const auto& p = layout.positions[i];
    return {p.x - 0.5 * v.width, p.y - 0.5 * v.height, v.width, v.height};
}

Rect bounding_box(const Graph& graph, const Layout& layout) {
    if (graph.empty()) return {0.0, 0.0, 0.0, 0.0};
    double lx = INFINITY, ly = INFINITY, hx = -INFINITY, hy = -INFINITY;
    for (std::size_t i = 0; i < graph.size(); ++i) {
        const Rect r = vertex_rect(graph, layout, i);
        lx = std::min(lx, r.x0);
        ly = std::min(ly, r.y0);
        hx = std::max(hx, r.x1());
        hy = std::max(hy, r.y1());
    }
    return {lx, ly, hx - lx, hy - ly};
}

double layout_energy(const Graph& graph, const Layout& layout) {
    double energy = 0.0;
    for (const auto& e : graph.edges()) {
        const double dx = layout.positions[e.i].x - layout.positions[e.j].x;
        const double dy = layout.positions[e.i].y - layout.positions[e.j].y;
        energy += 0.5 * e.w * (dx * dx + dy * dy);
    }
    return energy;
}

// ---------------------------------------------------------------------------
// Generators
// ---------------------------------------------------------------------------

InstanceKind parse_instance_kind(const std::string& name) {
    if (name == "mesh") return InstanceKind::mesh;
    if (name == "mesh_holes") return InstanceKind::mesh_holes;
    if (name == "binary_tree") return InstanceKind::binary_tree;
    if (name == "snake") return InstanceKind::snake;
    if (name == "from_file") return InstanceKind::from_file;
    throw std::invalid_argument("unknown instance kind '" + name + "'");
}

std::string to_string(InstanceKind kind) {
    switch (kind) {
        case InstanceKind::mesh: return "mesh";
        case InstanceKind::mesh_holes: return "mesh_holes";
        case InstanceKind::binary_tree: return "binary_tree";
        case InstanceKind::snake: return "snake";
        case InstanceKind::from_file: return "from_file";
    }
    return "unknown";
}

void InstanceSpec::validate() const {
    if (rows < 1 || cols < 1) throw std::invalid_argument("rows and cols must be >= 1");
    if (!(perturbation >= 0.0)) throw std::invalid_argument("perturbation bound must be >= 0");
    if (extra_random_edges < 0) throw std::invalid_argument("extra edge count must be >= 0");
    if (kind == InstanceKind::binary_tree && (levels < 1 || levels > 24))
        throw std::invalid_argument("binary tree levels must be in [1, 24]");
    if (kind == InstanceKind::snake && length < 1) throw std::invalid_argument("snake length must be >= 1");
    for (const auto& h : holes)
        if (!(h.width >= 0.0) || !(h.height >= 0.0)) throw std::invalid_argument("hole with negative extent");
}

std::vector<Rect> default_holes(int rows, int cols) {
    const double w = cols - 1;
    const double h = rows - 1;
    return {
        {0.12 * w, 0.12 * h, 0.18 * w, 0.26 * h},
        {0.56 * w, 0.19 * h, 0.24 * w, 0.12 * h},
        {0.31 * w, 0.62 * h, 0.31 * w, 0.19 * h},
    };
}

namespace {

bool inside(const Rect& r, double x, double y) {
    return x >= r.x0 && x <= r.x1() && y >= r.y0 && y <= r.y1();
}

struct Instance {
    std::vector<Vertex> vertices;
    std::vector<Edge> edges;
    std::vector<Point> positions;
    Rect domain;
};

Instance make_mesh(const InstanceSpec& spec, const std::vector<Rect>& holes) {
    Instance inst;
    const auto rows = static_cast<std::size_t>(spec.rows);
    const auto cols = static_cast<std::size_t>(spec.cols);
    std::vector<long> index(rows * cols, -1);
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
            const double x = static_cast<double>(c);
            const double y = static_cast<double>(r);
            if (std::any_of(holes.begin(), holes.end(), [&](const Rect& h) { return inside(h, x, y); }))
                continue;
            index[r * cols + c] = static_cast<long>(inst.vertices.size());
            inst.vertices.push_back({static_cast<std::int64_t>(inst.vertices.size()), 1.0, 1.0});
            inst.positions.push_back({x, y});
        }
    }
    if (inst.vertices.empty()) throw GraphError("holes remove every vertex of the mesh");
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
            const long a = index[r * cols + c];
            if (a < 0) continue;
            if (c + 1 < cols && index[r * cols + c + 1] >= 0)
                inst.edges.push_back({static_cast<std::size_t>(a), static_cast<std::size_t>(index[r * cols + c + 1]), 1.0});
            if (r + 1 < rows && index[(r + 1) * cols + c] >= 0)
                inst.edges.push_back({static_cast<std::size_t>(a), static_cast<std::size_t>(index[(r + 1) * cols + c]), 1.0});
        }
    }
    // Full unperturbed mesh, expanded by one unit square on each side.
    inst.domain = {-1.5, -1.5, static_cast<double>(cols) + 2.0, static_cast<double>(rows) + 2.0};
    return inst;
}

Instance make_binary_tree(const InstanceSpec& spec, Random& rng) {
    Instance inst;
    const int levels = spec.levels;
    for (int depth = 1; depth <= levels; ++depth) {
        const double side = std::sqrt(std::ldexp(1.0, levels - depth));
        const std::size_t first = (std::size_t{1} << (depth - 1)) - 1;
        for (std::size_t k = 0; k < (std::size_t{1} << (depth - 1)); ++k) {
            const std::size_t id = first + k;
            inst.vertices.push_back({static_cast<std::int64_t>(id), side, side});
            if (id > 0) inst.edges.push_back({(id - 1) / 2, id, 1.0});
        }
    }
    double total = 0.0;
    for (const auto& v : inst.vertices) total += v.area();
    const double side = std::ceil(std::sqrt(2.0 * total));
    inst.domain = {0.0, 0.0, side, side};
    for (std::size_t i = 0; i < inst.vertices.size(); ++i)
        inst.positions.push_back({rng.uniform(0.0, side), rng.uniform(0.0, side)});
    return inst;
}

Instance make_snake(const InstanceSpec& spec) {
    Instance inst;
    const auto n = static_cast<std::size_t>(spec.length);
    const double side = std::ceil(1.25 * std::sqrt(static_cast<double>(n)));
    inst.domain = {0.0, 0.0, side, side};
    for (std::size_t k = 0; k < n; ++k) {
        inst.vertices.push_back({static_cast<std::int64_t>(k), 1.0, 1.0});
        inst.positions.push_back({(static_cast<double>(k) + 0.5) * side / static_cast<double>(n), 0.5 * side});
        if (k > 0) inst.edges.push_back({k - 1, k, 1.0});
    }
    return inst;
}

void add_random_edges(Instance& inst, int count, Random& rng) {
    if (count == 0) return;
    const std::size_t n = inst.vertices.size();
    const std::uint64_t possible = n < 2 ? 0 : static_cast<std::uint64_t>(n) * (n - 1) / 2;
    if (inst.edges.size() + static_cast<std::size_t>(count) > possible)
        throw GraphError("requested " + std::to_string(count) + " extra edges but only " +
                         std::to_string(possible - inst.edges.size()) + " pairs are free");
    std::unordered_set<std::uint64_t> present;
    for (const auto& e : inst.edges) present.insert(pair_key(e.i, e.j));
    int added = 0;
    while (added < count) {
        const std::size_t i = rng.index(n);
        const std::size_t j = rng.index(n);
        if (i == j || !present.insert(pair_key(i, j)).second) continue;
        inst.edges.push_back({std::min(i, j), std::max(i, j), 1.0});
        ++added;
    }
}

}  // namespace

std::pair<Graph, Layout> generate_instance(const InstanceSpec& spec) {
    spec.validate();
    if (spec.kind == InstanceKind::from_file) return read_graph(spec.path);

    Random rng(spec.seed);
    Instance inst;
    switch (spec.kind) {
        case InstanceKind::mesh: inst = make_mesh(spec, spec.holes); break;
        case InstanceKind::mesh_holes:
            inst = make_mesh(spec, spec.holes.empty() ? default_holes(spec.rows, spec.cols) : spec.holes);
            break;
        case InstanceKind::binary_tree: inst = make_binary_tree(spec, rng); break;
        case InstanceKind::snake: inst = make_snake(spec); break;
        case InstanceKind::from_file: break;
    }

    if (spec.perturbation > 0.0) {
        for (auto& p : inst.positions) {
            p.x += rng.uniform(-spec.perturbation, spec.perturbation);
            p.y += rng.uniform(-spec.perturbation, spec.perturbation);
        }
    }
    add_random_edges(inst, spec.extra_random_edges, rng);

    Layout layout{std::move(inst.positions), inst.domain};
    layout.clamp_to_domain();
    if (spec.compress) {
        for (auto& p : layout.positions) {
            p.x = layout.domain.x0 + 0.5 * (p.x - layout.domain.x0);
            p.y = layout.domain.y0 + 0.5 * (p.y - layout.domain.y0);
        }
    }
    Graph graph(std::move(inst.vertices), std::move(inst.edges));
    graph.validate();
    return {std::move(graph), std::move(layout)};
}

// ---------------------------------------------------------------------------
// Text format
// ---------------------------------------------------------------------------

ParseError::ParseError(std::size_t line, const std::string& what)
    : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

namespace {

struct Tokenizer {
    std::vector<std::pair<std::size_t, std::vector<std::string>>> lines;
    std::size_t cursor = 0;

    explicit Tokenizer(const std::string& text) {
        std::istringstream in(text);
        std::string raw;
        std::size_t number = 0;
        while (std::getline(in, raw)) {
            ++number;
            if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
            std::istringstream words(raw);
            std::vector<std::string> tokens;
            for (std::string t; words >> t;) tokens.push_back(t);
            if (!tokens.empty()) lines.emplace_back(number, std::move(tokens));
        }
    }

    bool done() const { return cursor >= lines.size(); }
    const auto& peek() const { return lines[cursor]; }
    const auto& next() { return lines[cursor++]; }
    std::size_t last_line() const { return lines.empty() ? 0 : lines.back().first; }
};

double to_double(const std::string& s, std::size_t line) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size() || !std::isfinite(v)) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ParseError(line, "expected a number, got '" + s + "'");
    }
}

std::int64_t to_int(const std::string& s, std::size_t line) {
    try {
        std::size_t used = 0;
        const long long v = std::stoll(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ParseError(line, "expected an integer, got '" + s + "'");
    }
}

void expect_arity(const std::vector<std::string>& tokens, std::size_t n, std::size_t line) {
    if (tokens.size() != n)
        throw ParseError(line, "expected " + std::to_string(n) + " fields, got " + std::to_string(tokens.size()));
}

}  // namespace

std::pair<Graph, Layout> parse_graph(const std::string& text) {
    Tokenizer tok(text);
    Layout layout;
    bool has_domain = false;

    if (!tok.done() && tok.peek().second[0] == "D") {
        const auto& [line, t] = tok.next();
        expect_arity(t, 5, line);
        layout.domain = {to_double(t[1], line), to_double(t[2], line), to_double(t[3], line), to_double(t[4], line)};
        if (!(layout.domain.width > 0.0) || !(layout.domain.height > 0.0))
            throw ParseError(line, "domain must have positive extent");
        has_domain = true;
    }

    if (tok.done()) throw ParseError(tok.last_line() + 1, "missing 'V n' header");
    std::vector<Vertex> vertices;
    std::unordered_map<std::int64_t, std::size_t> by_id;
    {
        const auto& [line, t] = tok.next();
        if (t[0] != "V") throw ParseError(line, "expected 'V n', got '" + t[0] + "'");
        expect_arity(t, 2, line);
        const auto n = to_int(t[1], line);
        if (n < 0) throw ParseError(line, "negative vertex count");
        for (std::int64_t k = 0; k < n; ++k) {
            if (tok.done()) throw ParseError(tok.last_line() + 1, "vertex block ends early");
            const auto& [vl, vt] = tok.next();
            expect_arity(vt, 5, vl);
            Vertex v{to_int(vt[0], vl), to_double(vt[1], vl), to_double(vt[2], vl)};
            if (!(v.width > 0.0) || !(v.height > 0.0)) throw ParseError(vl, "vertex area must be positive");
            if (!by_id.emplace(v.id, vertices.size()).second)
                throw ParseError(vl, "duplicate vertex id " + std::to_string(v.id));
            vertices.push_back(v);
            layout.positions.push_back({to_double(vt[3], vl), to_double(vt[4], vl)});
        }
    }

    std::vector<Edge> edges;
    if (!tok.done()) {
        const auto& [line, t] = tok.next();
        if (t[0] != "E") throw ParseError(line, "expected 'E m', got '" + t[0] + "'");
        expect_arity(t, 2, line);
        const auto m = to_int(t[1], line);
        if (m < 0) throw ParseError(line, "negative edge count");
        std::unordered_set<std::uint64_t> pairs;
        for (std::int64_t k = 0; k < m; ++k) {
            if (tok.done()) throw ParseError(tok.last_line() + 1, "edge block ends early");
            const auto& [el, et] = tok.next();
            expect_arity(et, 3, el);
            const auto a = by_id.find(to_int(et[0], el));
            const auto b = by_id.find(to_int(et[1], el));
            if (a == by_id.end() || b == by_id.end()) throw ParseError(el, "edge references unknown vertex");
            const double w = to_double(et[2], el);
            if (w < 0.0) throw ParseError(el, "negative edge weight");
            if (a->second == b->second) throw ParseError(el, "self-loop");
            if (!pairs.insert(pair_key(a->second, b->second)).second) throw ParseError(el, "repeated edge");
            edges.push_back({a->second, b->second, w});
        }
    }
    if (!tok.done()) throw ParseError(tok.peek().first, "unexpected trailing content");

    Graph graph(std::move(vertices), std::move(edges));
    if (!has_domain) {
        const Rect box = bounding_box(graph, layout);
        layout.domain = graph.empty() ? Rect{0.0, 0.0, 1.0, 1.0}
                                      : Rect{box.x0 - 1.0, box.y0 - 1.0, box.width + 2.0, box.height + 2.0};
    }
    return {std::move(graph), std::move(layout)};
}

std::pair<Graph, Layout> read_graph(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_graph(buffer.str());
}

namespace {

void format_header(std::ostream& out, const Graph& graph, const Layout& layout) {
    out << std::setprecision(17);
    out << "D " << layout.domain.x0 << ' ' << layout.domain.y0 << ' ' << layout.domain.width << ' '
        << layout.domain.height << '\n';
    out << "V " << graph.size() << '\n';
    for (std::size_t i = 0; i < graph.size(); ++i) {
        const auto& v = graph.vertices()[i];
        const auto& p = layout.positions[i];
        out << v.id << ' ' << v.width << ' ' << v.height << ' ' << p.x << ' ' << p.y << '\n';
    }
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
}

}  // namespace

std::string format_graph(const Graph& graph, const Layout& layout) {
    std::ostringstream out;
    format_header(out, graph, layout);
    out << "E " << graph.edges().size() << '\n';
    for (const auto& e : graph.edges())
        out << graph.vertices()[e.i].id << ' ' << graph.vertices()[e.j].id << ' ' << e.w << '\n';
    return out.str();
}

std::string format_layout(const Graph& graph, const Layout& layout) {
    std::ostringstream out;
    format_header(out, graph, layout);
    return out.str();
}

void write_graph(const std::filesystem::path& path, const Graph& graph, const Layout& layout) {
    write_text(path, format_graph(graph, layout));
}

void write_layout(const std::filesystem::path& path, const Graph& graph, const Layout& layout) {
    write_text(path, format_layout(graph, layout));
}

}  // namespace layoutmg
