#include "layoutmg/multigrid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace layoutmg {

namespace {

using Triplet = Eigen::Triplet<double>;

struct AxisWeight {
    int coarse;
    double weight;
};

// Linear interpolation along one axis from coarse index I (at fine 2I).
std::vector<AxisWeight> axis_weights(int fine) {
    if (fine % 2 == 0) return {{fine / 2, 1.0}};
    return {{(fine - 1) / 2, 0.5}, {(fine + 1) / 2, 0.5}};
}

}  // namespace

SparseMatrix prolongation_matrix(const DofMap& fine, const DofMap& coarse) {
    const Grid& fg = fine.grid();
    std::vector<Triplet> triplets;
    for (std::size_t dof = 0; dof < fine.size(); ++dof) {
        const std::size_t p = fine.point_of(dof);
        const int i = static_cast<int>(p % static_cast<std::size_t>(fg.nx + 1));
        const int j = static_cast<int>(p / static_cast<std::size_t>(fg.nx + 1));
        for (const auto& wx : axis_weights(i))
            for (const auto& wy : axis_weights(j)) {
                const long c = fine.is_u(dof) ? coarse.u(wx.coarse, wy.coarse) : coarse.v(wx.coarse, wy.coarse);
                if (c >= 0) triplets.emplace_back(static_cast<Eigen::Index>(dof), c, wx.weight * wy.weight);
            }
    }
    SparseMatrix p(static_cast<Eigen::Index>(fine.size()), static_cast<Eigen::Index>(coarse.size()));
    p.setFromTriplets(triplets.begin(), triplets.end());
    return p;
}

SparseMatrix restriction_matrix(const DofMap& fine, const DofMap& coarse) {
    const Grid& cg = coarse.grid();
    const Grid& fg = fine.grid();
    std::vector<Triplet> triplets;
    for (std::size_t dof = 0; dof < coarse.size(); ++dof) {
        const std::size_t p = coarse.point_of(dof);
        const int ci = static_cast<int>(p % static_cast<std::size_t>(cg.nx + 1));
        const int cj = static_cast<int>(p / static_cast<std::size_t>(cg.nx + 1));
        // Fine points within one fine spacing of the coarse point.
        for (int dj = -1; dj <= 1; ++dj)
            for (int di = -1; di <= 1; ++di) {
                const int fi = 2 * ci + di;
                const int fj = 2 * cj + dj;
                if (fi < 0 || fi > fg.nx || fj < 0 || fj > fg.ny) continue;
                const long f = coarse.is_u(dof) ? fine.u(fi, fj) : fine.v(fi, fj);
                if (f < 0) continue;
                const double w = (di == 0 ? 1.0 : 0.5) * (dj == 0 ? 1.0 : 0.5);
                triplets.emplace_back(static_cast<Eigen::Index>(dof), f, w);
            }
    }
    SparseMatrix r(static_cast<Eigen::Index>(coarse.size()), static_cast<Eigen::Index>(fine.size()));
    r.setFromTriplets(triplets.begin(), triplets.end());
    return r;
}

SparseMatrix aggregation_matrix(const Grid& fine, const Grid& coarse) {
    std::vector<Triplet> triplets;
    for (int j = 0; j < fine.ny; ++j)
        for (int i = 0; i < fine.nx; ++i)
            triplets.emplace_back(static_cast<Eigen::Index>(fine.square(i, j)),
                                  static_cast<Eigen::Index>(coarse.square(i / 2, j / 2)), 1.0);
    SparseMatrix agg(static_cast<Eigen::Index>(fine.num_squares()), static_cast<Eigen::Index>(coarse.num_squares()));
    agg.setFromTriplets(triplets.begin(), triplets.end());
    return agg;
}

QuadraticForm galerkin_energy(const QuadraticForm& fine, const SparseMatrix& prolongation, const Vector& u_fine) {
    QuadraticForm coarse;
    const SparseMatrix pt = prolongation.transpose();
    coarse.q = pt * fine.q * prolongation;
    coarse.l = pt * (fine.q * u_fine + fine.l);
    coarse.constant = fine.evaluate(u_fine);
    return coarse;
}

ConstraintSet aggregate_constraints(const ConstraintSet& fine, const SparseMatrix& prolongation,
                                    const SparseMatrix& aggregation, const Vector& u_fine) {
    ConstraintSet coarse;
    const SparseMatrix aggt = aggregation.transpose();
    coarse.a = aggt * fine.a * prolongation;
    coarse.b = aggt * (fine.b - fine.a * u_fine);
    coarse.d = aggt * fine.d;
    coarse.mode = fine.mode;
    return coarse;
}

void coarsest_solve(const CorrectionProblem& problem, SolverState& state, const MultigridOptions& options) {
    if (problem.equality()) {
        double beta = problem.beta;
        const double floor = 1e-10 * std::max(1.0, problem.energy.q.rows() ? problem.energy.q.diagonal().cwiseAbs().maxCoeff() : 1.0);
        for (int attempt = 0; attempt < 4; ++attempt) {
            const SaddleSystem sys = assemble_saddle(problem, [&] {
                std::vector<std::size_t> all(problem.num_squares());
                for (std::size_t s = 0; s < all.size(); ++s) all[s] = s;
                return all;
            }(), beta, true);
            try {
                state = unpack(problem, sys, solve_dense(sys));
                return;
            } catch (const std::runtime_error&) {
                beta = std::max(2.0 * beta, floor);
            }
        }
        throw std::runtime_error("coarsest equality system is singular after regularization retries");
    }

    RelaxOptions opts = options.relax;
    opts.proximal = 0.0;
    opts.max_iters = options.coarsest_iters;
    const Window whole = make_window(problem, 0, 0, problem.grid.nx, problem.grid.ny);
    single_window_solve(whole, problem, state, opts);
}

Hierarchy::Hierarchy(CorrectionProblem fine, MultigridOptions options) : options_(std::move(options)) {
    Level top;
    top.problem = std::move(fine);
    top.state = SolverState::zero(top.problem);
    levels_.push_back(std::move(top));

    while (true) {
        const CorrectionProblem& f = levels_.back().problem;
        const Grid& g = f.grid;
        if (g.nx <= options_.coarsest && g.ny <= options_.coarsest) break;
        if (g.nx % 2 != 0 || g.ny % 2 != 0) break;

        Level c;
        c.problem.grid = coarsen_grid(g);
        c.problem.dofs = DofMap(c.problem.grid);
        c.prolongation = prolongation_matrix(f.dofs, c.problem.dofs);
        c.aggregation = aggregation_matrix(g, c.problem.grid);

        // The fine regularization is folded into the coarse Hessian.
        SparseMatrix hess = f.energy.q;
        for (Eigen::Index k = 0; k < hess.rows(); ++k) hess.coeffRef(k, k) += 2.0 * f.beta;
        const SparseMatrix pt = c.prolongation.transpose();
        c.problem.energy.q = pt * hess * c.prolongation;
        c.problem.energy.l = Vector::Zero(c.problem.energy.q.rows());
        c.problem.constraints = aggregate_constraints(f.constraints, c.prolongation, c.aggregation,
                                                      Vector::Zero(static_cast<Eigen::Index>(f.num_dofs())));
        c.problem.beta = 0.0;
        c.state = SolverState::zero(c.problem);
        levels_.push_back(std::move(c));
    }
}

void Hierarchy::restrict_to(std::size_t k) {
    const Level& f = levels_[k];
    Level& c = levels_[k + 1];
    const bool equality = f.problem.equality();
    const SparseMatrix& p = c.prolongation;
    const SparseMatrix& agg = c.aggregation;
    auto& cp = c.problem;

    if (equality) {
        const Residuals r = residuals(f.problem, f.state);
        const bool fas = options_.scheme == CoarseScheme::fas;
        c.lambda_anchor = fas ? Vector(0.25 * (agg.transpose() * f.state.lambda))
                              : Vector::Zero(static_cast<Eigen::Index>(cp.num_squares()));
        c.eta_anchor = fas ? f.state.eta : 0.0;
        cp.energy.l = -(p.transpose() * r.energy) - cp.constraints.a.transpose() * c.lambda_anchor;
        cp.constraints.b = agg.transpose() * r.eqd + c.eta_anchor * cp.constraints.d;
        cp.eta_rhs = r.eta + cp.constraints.d.dot(c.lambda_anchor);
    } else {
        // Window multipliers are local estimates and too noisy to anchor a
        // coarse problem, so the coarse level minimizes the fine energy over
        // the correction space. A coarse square may take in at most four times
        // the smallest slack among its children, which keeps smooth coarse
        // corrections from overfilling single fine squares.
        SolverState primal = f.state;
        primal.lambda.setZero();
        primal.eta = 0.0;
        const Residuals r = residuals(f.problem, primal);
        c.lambda_anchor = Vector::Zero(static_cast<Eigen::Index>(cp.num_squares()));
        c.eta_anchor = 0.0;
        cp.energy.l = -(p.transpose() * r.energy);
        cp.constraints.b = Vector::Constant(static_cast<Eigen::Index>(cp.num_squares()),
                                            std::numeric_limits<double>::infinity());
        const Grid& fg = f.problem.grid;
        for (int j = 0; j < fg.ny; ++j)
            for (int i = 0; i < fg.nx; ++i) {
                double& cap = cp.constraints.b[static_cast<Eigen::Index>(cp.grid.square(i / 2, j / 2))];
                cap = std::min(cap, 4.0 * r.eqd[static_cast<Eigen::Index>(fg.square(i, j))]);
            }
        cp.eta_rhs = 0.0;
    }

    c.state.u = Vector::Zero(static_cast<Eigen::Index>(cp.num_dofs()));
    c.state.lambda = c.lambda_anchor;
    c.state.eta = c.eta_anchor;
}

void Hierarchy::prolong_from(std::size_t k) {
    Level& f = levels_[k];
    const Level& c = levels_[k + 1];
    f.state.u += c.prolongation * c.state.u;
    f.state.lambda += c.aggregation * (c.state.lambda - c.lambda_anchor);
    if (f.problem.equality()) {
        f.state.eta += c.state.eta - c.eta_anchor;
        return;
    }
    // Multipliers stay non-negative and vanish on clearly inactive squares.
    const double eps = options_.relax.eps_factor * f.problem.grid.square_area();
    const Vector slack = f.problem.constraints.b - f.problem.constraints.a * f.state.u;
    for (Eigen::Index s = 0; s < slack.size(); ++s)
        if (slack[s] >= eps || f.state.lambda[s] < 0.0) f.state.lambda[s] = 0.0;
}

void Hierarchy::cycle(std::size_t k, CycleStats& stats) {
    Level& lvl = levels_[k];
    if (k + 1 == levels_.size()) {
        coarsest_solve(lvl.problem, lvl.state, options_);
        ++stats.coarsest_solves;
        return;
    }
    stats.relax += window_sweep(lvl.problem, lvl.state, options_.relax, options_.nu1);
    restrict_to(k);
    cycle(k + 1, stats);
    prolong_from(k);
    stats.relax += window_sweep(lvl.problem, lvl.state, options_.relax, options_.nu2);
}

CycleStats Hierarchy::v_cycle() {
    CycleStats stats;
    cycle(0, stats);
    return stats;
}

}  // namespace layoutmg
