#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace layoutmg {

/// Axis-aligned rectangle given by its lower-left corner and extents.
struct Rect {
    double x0 = 0.0;
    double y0 = 0.0;
    double width = 1.0;
    double height = 1.0;

    double x1() const { return x0 + width; }
    double y1() const { return y0 + height; }
    double area() const { return width * height; }

    bool operator==(const Rect&) const = default;
};

struct Vertex {
    std::int64_t id = 0;
    double width = 1.0;
    double height = 1.0;

    double area() const { return width * height; }
    bool operator==(const Vertex&) const = default;
};

/// Undirected weighted edge between vertex indices (not ids).
struct Edge {
    std::size_t i = 0;
    std::size_t j = 0;
    double w = 1.0;

    bool operator==(const Edge&) const = default;
};

struct Point {
    double x = 0.0;
    double y = 0.0;

    bool operator==(const Point&) const = default;
};

class GraphError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Vertices with rectangular areas plus weighted undirected edges.
class Graph {
public:
    Graph() = default;
    Graph(std::vector<Vertex> vertices, std::vector<Edge> edges);

    const std::vector<Vertex>& vertices() const { return vertices_; }
    const std::vector<Edge>& edges() const { return edges_; }
    std::size_t size() const { return vertices_.size(); }
    bool empty() const { return vertices_.empty(); }

    double total_area() const;

    /// Throws GraphError if any invariant is broken: non-positive area,
    /// negative weight, self-loop, repeated pair, out-of-range endpoint or
    /// duplicate vertex id.
    void validate() const;

    bool operator==(const Graph&) const = default;

private:
    std::vector<Vertex> vertices_;
    std::vector<Edge> edges_;
};

/// Vertex centers plus the fixed rectangular domain they live in.
struct Layout {
    std::vector<Point> positions;
    Rect domain;

    /// Moves every center into the domain rectangle.
    void clamp_to_domain();

    bool operator==(const Layout&) const = default;
};

/// Rectangle occupied by vertex `i` when centered at its layout position.
Rect vertex_rect(const Graph& graph, const Layout& layout, std::size_t i);

/// Bounding box of all vertex rectangles; zero-sized rect at the origin when empty.
Rect bounding_box(const Graph& graph, const Layout& layout);

/// Connection-length energy 1/2 sum_ij w_ij |p_i - p_j|^2 of a layout.
double layout_energy(const Graph& graph, const Layout& layout);

// ---------------------------------------------------------------------------
// Instance generators
// ---------------------------------------------------------------------------

enum class InstanceKind { mesh, mesh_holes, binary_tree, snake, from_file };

InstanceKind parse_instance_kind(const std::string& name);
std::string to_string(InstanceKind kind);

struct InstanceSpec {
    InstanceKind kind = InstanceKind::mesh;
    int rows = 1;
    int cols = 1;
    /// Levels of the binary tree, or chain length for the snake.
    int levels = 5;
    int length = 64;
    double perturbation = 0.0;
    bool compress = false;
    int extra_random_edges = 0;
    std::uint64_t seed = 1;
    /// Holes in mesh-coordinate space; vertices whose unperturbed center lies
    /// inside any of them are removed. Empty means the default three holes.
    std::vector<Rect> holes;
    std::filesystem::path path;

    void validate() const;
};

/// Deterministic instance for a given spec (seed included).
std::pair<Graph, Layout> generate_instance(const InstanceSpec& spec);

/// Three holes scaled to a rows x cols mesh.
std::vector<Rect> default_holes(int rows, int cols);

// ---------------------------------------------------------------------------
// Text format
// ---------------------------------------------------------------------------

class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t line, const std::string& what);
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

std::pair<Graph, Layout> parse_graph(const std::string& text);
std::pair<Graph, Layout> read_graph(const std::filesystem::path& path);

std::string format_graph(const Graph& graph, const Layout& layout);
/// Domain line plus the vertex block only.
std::string format_layout(const Graph& graph, const Layout& layout);

void write_graph(const std::filesystem::path& path, const Graph& graph, const Layout& layout);
void write_layout(const std::filesystem::path& path, const Graph& graph, const Layout& layout);

}  // namespace layoutmg
