#include "layoutmg/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace layoutmg {

double QuadraticForm::evaluate(const Vector& u) const {
    return 0.5 * u.dot(q * u) + l.dot(u) + constant;
}

SolverState SolverState::zero(const CorrectionProblem& problem) {
    return {Vector::Zero(static_cast<Eigen::Index>(problem.num_dofs())),
            Vector::Zero(static_cast<Eigen::Index>(problem.num_squares())), 0.0};
}

namespace {

using Triplet = Eigen::Triplet<double>;

struct Coefficient {
    long dof;
    double value;
};

// Stencil restricted to the free variables of one component, as (dof, alpha).
template <typename Pick>
std::vector<Coefficient> component_stencil(const Stencil& st, Pick pick) {
    std::vector<Coefficient> out;
    out.reserve(4);
    for (int c = 0; c < 4; ++c) {
        const long dof = pick(st.corners[c]);
        if (dof >= 0 && st.weights[c] != 0.0) out.push_back({dof, st.weights[c]});
    }
    return out;
}

// g = s_i - s_j with repeated dofs merged.
std::vector<Coefficient> difference(const std::vector<Coefficient>& si, const std::vector<Coefficient>& sj) {
    std::vector<Coefficient> g = si;
    for (const auto& c : sj) {
        auto it = std::find_if(g.begin(), g.end(), [&](const Coefficient& x) { return x.dof == c.dof; });
        if (it != g.end())
            it->value -= c.value;
        else
            g.push_back({c.dof, -c.value});
    }
    return g;
}

void add_edge_term(std::vector<Triplet>& triplets, Vector& l, const std::vector<Coefficient>& g, double w,
                   double offset) {
    for (const auto& a : g) {
        l[a.dof] += w * offset * a.value;
        for (const auto& b : g) triplets.emplace_back(a.dof, b.dof, w * a.value * b.value);
    }
}

}  // namespace

QuadraticForm assemble_energy(const Graph& graph, const Layout& layout, const Grid& grid, const DofMap& dofs) {
    const auto n = static_cast<Eigen::Index>(dofs.size());
    QuadraticForm form;
    form.l = Vector::Zero(n);
    form.q.resize(n, n);

    std::vector<std::vector<Coefficient>> su(graph.size()), sv(graph.size());
    for (std::size_t k = 0; k < graph.size(); ++k) {
        const Stencil st = stencil_of(grid, layout.positions[k]);
        su[k] = component_stencil(st, [&](std::size_t p) { return dofs.u(p); });
        sv[k] = component_stencil(st, [&](std::size_t p) { return dofs.v(p); });
    }

    std::vector<Triplet> triplets;
    triplets.reserve(graph.edges().size() * 64);
    for (const auto& e : graph.edges()) {
        const Point& pi = layout.positions[e.i];
        const Point& pj = layout.positions[e.j];
        const double dx = pi.x - pj.x;
        const double dy = pi.y - pj.y;
        form.constant += 0.5 * e.w * (dx * dx + dy * dy);
        add_edge_term(triplets, form.l, difference(su[e.i], su[e.j]), e.w, dx);
        add_edge_term(triplets, form.l, difference(sv[e.i], sv[e.j]), e.w, dy);
    }
    form.q.setFromTriplets(triplets.begin(), triplets.end());
    return form;
}

ConstraintSet assemble_constraints(const Grid& grid, const DofMap& dofs, const DensityField& field,
                                   ConstraintMode mode) {
    const auto ns = static_cast<Eigen::Index>(grid.num_squares());
    ConstraintSet set;
    set.mode = mode;
    set.a.resize(ns, static_cast<Eigen::Index>(dofs.size()));
    set.b.resize(ns);
    set.d = Vector::Ones(ns);

    const double area = grid.square_area();
    const double hx = grid.hx();
    const double hy = grid.hy();
    const auto& ups = field.upsilon;

    std::vector<Triplet> triplets;
    triplets.reserve(static_cast<std::size_t>(ns) * 8);
    auto add = [&](std::size_t s, long dof, double value) {
        if (dof >= 0) triplets.emplace_back(static_cast<Eigen::Index>(s), dof, value);
    };

    for (int j = 0; j < grid.ny; ++j) {
        for (int i = 0; i < grid.nx; ++i) {
            const std::size_t s = grid.square(i, j);
            set.b[static_cast<Eigen::Index>(s)] = field.capacity[s] - ups[s];
            // Each face carries the mean density of the two squares times the
            // face length times the mean displacement of its two corners. Rows
            // measure net inflow, so motion out through a face counts negative.
            if (i + 1 < grid.nx) {
                const double c = (ups[s] + ups[grid.square(i + 1, j)]) / (2.0 * area) * hy * 0.5;
                add(s, dofs.u(i + 1, j), -c);
                add(s, dofs.u(i + 1, j + 1), -c);
            }
            if (i > 0) {
                const double c = (ups[s] + ups[grid.square(i - 1, j)]) / (2.0 * area) * hy * 0.5;
                add(s, dofs.u(i, j), c);
                add(s, dofs.u(i, j + 1), c);
            }
            if (j + 1 < grid.ny) {
                const double c = (ups[s] + ups[grid.square(i, j + 1)]) / (2.0 * area) * hx * 0.5;
                add(s, dofs.v(i, j + 1), -c);
                add(s, dofs.v(i + 1, j + 1), -c);
            }
            if (j > 0) {
                const double c = (ups[s] + ups[grid.square(i, j - 1)]) / (2.0 * area) * hx * 0.5;
                add(s, dofs.v(i, j), c);
                add(s, dofs.v(i + 1, j), c);
            }
        }
    }
    set.a.setFromTriplets(triplets.begin(), triplets.end());
    return set;
}

double default_beta(const SparseMatrix& q) {
    if (q.rows() == 0) return 1e-6;
    const double mean = q.diagonal().sum() / static_cast<double>(q.rows());
    return 1e-6 * (mean > 0.0 ? mean : 1.0);
}

CorrectionProblem assemble_problem(const Graph& graph, const Layout& layout, const Grid& grid, double slack,
                                   ConstraintMode mode, double beta) {
    CorrectionProblem p;
    p.grid = grid;
    p.dofs = DofMap(grid);
    p.energy = assemble_energy(graph, layout, grid, p.dofs);
    p.constraints = assemble_constraints(grid, p.dofs, density_field(grid, graph, layout, slack), mode);
    p.beta = beta >= 0.0 ? beta : default_beta(p.energy.q);
    return p;
}

SaddleSystem assemble_saddle(const CorrectionProblem& problem, const std::vector<std::size_t>& active, double beta,
                             bool with_eta) {
    if (beta < 0.0) throw std::invalid_argument("beta must be non-negative");
    const auto n = static_cast<Eigen::Index>(problem.num_dofs());
    const auto k = static_cast<Eigen::Index>(active.size());
    const Eigen::Index size = n + k + (with_eta ? 1 : 0);

    SaddleSystem sys;
    sys.active = active;
    sys.num_dofs = problem.num_dofs();
    sys.with_eta = with_eta;
    sys.rhs = Vector::Zero(size);
    sys.rhs.head(n) = -problem.energy.l;

    std::vector<Triplet> triplets;
    const auto& q = problem.energy.q;
    for (Eigen::Index r = 0; r < q.outerSize(); ++r)
        for (SparseMatrix::InnerIterator it(q, r); it; ++it) triplets.emplace_back(it.row(), it.col(), it.value());
    for (Eigen::Index r = 0; r < n; ++r) triplets.emplace_back(r, r, 2.0 * beta);

    const auto& a = problem.constraints.a;
    for (Eigen::Index row = 0; row < k; ++row) {
        const auto s = static_cast<Eigen::Index>(active[static_cast<std::size_t>(row)]);
        for (SparseMatrix::InnerIterator it(a, s); it; ++it) {
            triplets.emplace_back(n + row, it.col(), it.value());
            triplets.emplace_back(it.col(), n + row, it.value());
        }
        sys.rhs[n + row] = problem.constraints.b[s];
        if (with_eta) {
            const double d = problem.constraints.d[s];
            triplets.emplace_back(n + row, n + k, d);
            triplets.emplace_back(n + k, n + row, d);
        }
    }
    if (with_eta) sys.rhs[n + k] = problem.eta_rhs;

    sys.matrix.resize(size, size);
    sys.matrix.setFromTriplets(triplets.begin(), triplets.end());
    return sys;
}

SaddleSystem assemble_equality_saddle(const CorrectionProblem& problem) {
    std::vector<std::size_t> all(problem.num_squares());
    for (std::size_t s = 0; s < all.size(); ++s) all[s] = s;
    return assemble_saddle(problem, all, problem.beta, true);
}

double pseudo_lagrangian(const CorrectionProblem& problem, const SolverState& state) {
    const auto& c = problem.constraints;
    double value = problem.energy.evaluate(state.u) + problem.beta * state.u.squaredNorm();
    value += state.lambda.dot(c.a * state.u - c.b);
    value += state.eta * (c.d.dot(state.lambda) - problem.eta_rhs);
    return value;
}

Vector lagrangian_gradient(const CorrectionProblem& problem, const SolverState& state) {
    const auto& c = problem.constraints;
    const auto n = static_cast<Eigen::Index>(problem.num_dofs());
    const auto ns = static_cast<Eigen::Index>(problem.num_squares());
    Vector g(n + ns + 1);
    g.head(n) = problem.energy.q * state.u + problem.energy.l + 2.0 * problem.beta * state.u +
                c.a.transpose() * state.lambda;
    g.segment(n, ns) = c.a * state.u - c.b + state.eta * c.d;
    g[n + ns] = c.d.dot(state.lambda) - problem.eta_rhs;
    return g;
}

Residuals residuals(const CorrectionProblem& problem, const SolverState& state) {
    const auto& c = problem.constraints;
    Residuals r;
    r.energy = -(problem.energy.q * state.u + problem.energy.l + 2.0 * problem.beta * state.u +
                 c.a.transpose() * state.lambda);
    r.eqd = c.b - c.a * state.u - state.eta * c.d;
    r.eta = problem.eta_rhs - c.d.dot(state.lambda);
    return r;
}

double max_constraint_violation(const CorrectionProblem& problem, const Vector& u) {
    const Vector slack = problem.constraints.a * u - problem.constraints.b;
    return std::max(0.0, slack.size() ? slack.maxCoeff() : 0.0);
}

Vector solve_dense(const SaddleSystem& system) {
    const DenseMatrix dense = DenseMatrix(system.matrix);
    Eigen::PartialPivLU<DenseMatrix> lu(dense);
    if (!(lu.rcond() > 1e-15)) throw std::runtime_error("saddle system is numerically singular");
    Vector x = lu.solve(system.rhs);
    if (!x.allFinite()) throw std::runtime_error("saddle solve produced non-finite values");
    return x;
}

SolverState unpack(const CorrectionProblem& problem, const SaddleSystem& system, const Vector& x) {
    SolverState state = SolverState::zero(problem);
    const auto n = static_cast<Eigen::Index>(system.num_dofs);
    state.u = x.head(n);
    for (std::size_t r = 0; r < system.active.size(); ++r)
        state.lambda[static_cast<Eigen::Index>(system.active[r])] = x[n + static_cast<Eigen::Index>(r)];
    if (system.with_eta) state.eta = x[n + static_cast<Eigen::Index>(system.active.size())];
    return state;
}

}  // namespace layoutmg
