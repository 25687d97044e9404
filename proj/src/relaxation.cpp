#include "layoutmg/relaxation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>
#include <thread>

namespace layoutmg {

Window make_window(const CorrectionProblem& problem, int sx, int sy, int mx, int my, bool closed) {
    const Grid& g = problem.grid;
    Window w;
    w.sx = std::max(0, sx);
    w.sy = std::max(0, sy);
    w.mx = std::min(g.nx, sx + mx) - w.sx;
    w.my = std::min(g.ny, sy + my) - w.sy;
    if (w.mx <= 0 || w.my <= 0) return Window{};

    const DofMap& dofs = problem.dofs;
    const int lo = closed ? 0 : 1;
    for (int j = w.sy; j <= w.sy + w.my; ++j)
        for (int i = w.sx + lo; i <= w.sx + w.mx - lo; ++i)
            if (const long d = dofs.u(i, j); d >= 0) w.dofs.push_back(static_cast<std::size_t>(d));
    for (int j = w.sy + lo; j <= w.sy + w.my - lo; ++j)
        for (int i = w.sx; i <= w.sx + w.mx; ++i)
            if (const long d = dofs.v(i, j); d >= 0) w.dofs.push_back(static_cast<std::size_t>(d));
    for (int j = w.sy; j < w.sy + w.my; ++j)
        for (int i = w.sx; i < w.sx + w.mx; ++i) w.squares.push_back(g.square(i, j));
    for (int i = w.sx; i < w.sx + w.mx; ++i) {
        if (w.sy > 0) w.ring.push_back(g.square(i, w.sy - 1));
        if (w.sy + w.my < g.ny) w.ring.push_back(g.square(i, w.sy + w.my));
    }
    for (int j = w.sy; j < w.sy + w.my; ++j) {
        if (w.sx > 0) w.ring.push_back(g.square(w.sx - 1, j));
        if (w.sx + w.mx < g.nx) w.ring.push_back(g.square(w.sx + w.mx, j));
    }
    return w;
}

namespace {

/// Reusable scratch for window solves on one problem.
class WindowSolver {
public:
    WindowSolver(const CorrectionProblem& problem, const SparseMatrix& at, const RelaxOptions& options)
        : p_(problem), at_(at), opt_(options), local_(problem.num_dofs(), -1),
          in_active_(problem.num_squares(), 0) {}

    WindowReport solve(const Window& w, SolverState& state, bool keep_log);

private:
    const CorrectionProblem& p_;
    const SparseMatrix& at_;
    const RelaxOptions& opt_;
    std::vector<long> local_;
    std::vector<char> in_active_;
};

WindowReport WindowSolver::solve(const Window& w, SolverState& state, bool keep_log) {
    WindowReport report;
    if (w.dofs.empty() && w.squares.empty()) return report;

    const auto& q = p_.energy.q;
    const auto& a = p_.constraints.a;
    const auto& b = p_.constraints.b;
    const auto& d = p_.constraints.d;
    const bool equality = p_.equality();
    const double eps = opt_.eps_factor * p_.grid.square_area();
    const auto nw = static_cast<Eigen::Index>(w.dofs.size());

    // Inequality mode also carries the rows of the neighbouring squares the
    // free variables reach into, so a window cannot overfill them.
    std::vector<std::size_t> cons = w.squares;
    if (!equality) cons.insert(cons.end(), w.ring.begin(), w.ring.end());

    for (std::size_t k = 0; k < w.dofs.size(); ++k) local_[w.dofs[k]] = static_cast<long>(k);

    // Window-restricted constraint rows (dense) and their norms.
    DenseMatrix rows = DenseMatrix::Zero(static_cast<Eigen::Index>(cons.size()), nw);
    for (std::size_t r = 0; r < cons.size(); ++r)
        for (SparseMatrix::InnerIterator it(a, static_cast<Eigen::Index>(cons[r])); it; ++it)
            if (const long c = local_[static_cast<std::size_t>(it.col())]; c >= 0)
                rows(static_cast<Eigen::Index>(r), c) = it.value();
    const double row_scale = rows.size() ? rows.cwiseAbs().maxCoeff() : 0.0;

    // Energy Hessian block (constant across iterations).
    DenseMatrix hess = DenseMatrix::Zero(nw, nw);
    for (Eigen::Index k = 0; k < nw; ++k) {
        for (SparseMatrix::InnerIterator it(q, static_cast<Eigen::Index>(w.dofs[static_cast<std::size_t>(k)])); it;
             ++it)
            if (const long c = local_[static_cast<std::size_t>(it.col())]; c >= 0) hess(k, c) += it.value();
        hess(k, k) += 2.0 * p_.beta;
    }

    auto slack_of = [&](std::size_t s) {
        return b[static_cast<Eigen::Index>(s)] - a.row(static_cast<Eigen::Index>(s)).dot(state.u) -
               state.eta * d[static_cast<Eigen::Index>(s)];
    };

    double proximal = equality ? opt_.equality_proximal * std::max(1e-300, hess.diagonal().cwiseAbs().mean())
                               : opt_.proximal;
    Eigen::LLT<DenseMatrix> llt;
    DenseMatrix hinv_at;
    bool factored = false;
    auto factor = [&] {
        DenseMatrix h = hess;
        h.diagonal().array() += 2.0 * proximal;
        llt.compute(h);
        factored = llt.info() == Eigen::Success;
        if (factored) hinv_at = llt.solve(DenseMatrix(rows.transpose()));
        else proximal = proximal > 0.0 ? 2.0 * proximal : 1e-8 * std::max(1.0, hess.diagonal().cwiseAbs().maxCoeff());
        return factored;
    };

    std::vector<std::size_t> prev_active;
    std::vector<double> prev_lambda;
    for (int t = 0; t < opt_.max_iters; ++t) {
        // Active set: violated or nearly violated squares, minus those that sat
        // on their bound last iteration with a negative multiplier.
        std::vector<std::size_t> active_rows;  // indices into cons
        std::vector<std::size_t> dropped;
        std::vector<double> slack(cons.size());
        for (std::size_t r = 0; r < cons.size(); ++r) {
            slack[r] = slack_of(cons[r]);
            if (rows.row(static_cast<Eigen::Index>(r)).cwiseAbs().maxCoeff() <= 1e-14 * row_scale) continue;
            if (equality) {
                active_rows.push_back(r);
                continue;
            }
            if (!(slack[r] < eps)) continue;
            bool drop = false;
            for (std::size_t k = 0; k < prev_active.size(); ++k)
                if (prev_active[k] == r && std::abs(slack[r]) <= eps && prev_lambda[k] < 0.0) drop = true;
            if (drop)
                dropped.push_back(cons[r]);
            else
                active_rows.push_back(r);
        }
        const auto k = static_cast<Eigen::Index>(active_rows.size());
        for (auto r : active_rows) in_active_[cons[r]] = 1;

        // Gradient of the true functional at the current state, with the
        // multipliers of non-active squares held fixed. Inactive window squares
        // carry a zero multiplier in inequality mode.
        Vector grad(nw);
        for (Eigen::Index i = 0; i < nw; ++i) {
            const auto dof = static_cast<Eigen::Index>(w.dofs[static_cast<std::size_t>(i)]);
            double gi = p_.energy.l[dof] + 2.0 * p_.beta * state.u[dof];
            for (SparseMatrix::InnerIterator it(q, dof); it; ++it) gi += it.value() * state.u[it.col()];
            for (SparseMatrix::InnerIterator it(at_, dof); it; ++it) {
                const auto s = static_cast<std::size_t>(it.col());
                if (in_active_[s]) continue;
                if (!equality) continue;
                gi += it.value() * state.lambda[it.col()];
            }
            grad[i] = gi;
        }

        // With every non-trivial window row active, the rows sum to zero on the
        // window variables; a window-local pseudo-multiplier absorbs that.
        bool with_eta = false;
        if (k > 0) {
            Vector sum = Vector::Zero(nw);
            for (auto r : active_rows) sum += rows.row(static_cast<Eigen::Index>(r)).transpose();
            with_eta = sum.cwiseAbs().maxCoeff() <= 1e-12 * std::max(row_scale, 1e-300) * static_cast<double>(k);
        }

        // Eliminate the displacements through the Cholesky factor of the
        // window Hessian; only the small multiplier system changes per
        // iteration.
        Vector delta;
        Vector mult;
        bool solved = false;
        for (int attempt = 0; attempt < 4 && !solved; ++attempt) {
            if (!factored && !factor()) continue;
            const Vector g0 = llt.solve(-grad);
            const Eigen::Index n = k + (with_eta ? 1 : 0);
            DenseMatrix ra(k, nw);
            DenseMatrix ha(nw, k);
            for (Eigen::Index r = 0; r < k; ++r) {
                const auto wr = static_cast<Eigen::Index>(active_rows[static_cast<std::size_t>(r)]);
                ra.row(r) = rows.row(wr);
                ha.col(r) = hinv_at.col(wr);
            }
            DenseMatrix schur = DenseMatrix::Zero(n, n);
            schur.topLeftCorner(k, k).noalias() = ra * ha;
            Vector rhs(n);
            rhs.head(k).noalias() = ra * g0;
            double lambda_sum = 0.0;
            for (Eigen::Index r = 0; r < k; ++r) {
                const std::size_t wr = active_rows[static_cast<std::size_t>(r)];
                rhs[r] -= slack[wr];
                if (with_eta) {
                    const auto s = static_cast<Eigen::Index>(cons[wr]);
                    schur(r, k) = -d[s];
                    schur(k, r) = d[s];
                    lambda_sum += d[s] * state.lambda[s];
                }
            }
            if (with_eta) rhs[k] = lambda_sum;
            // The rows of every square around a variable sum to zero, so a full
            // active set is rank deficient and usually inconsistent. A small
            // dual diagonal turns it into a least-squares compromise.
            if (!equality && opt_.dual_reg > 0.0) {
                const double hd = std::max(1e-300, hess.diagonal().cwiseAbs().maxCoeff());
                for (Eigen::Index r = 0; r < k; ++r) schur(r, r) += opt_.dual_reg * row_scale * row_scale / hd;
            }
            if (n > 0) {
                Eigen::PartialPivLU<DenseMatrix> lu(schur);
                if (!(lu.rcond() > 1e-13)) {
                    factored = false;
                    proximal = proximal > 0.0 ? 2.0 * proximal : 1e-8 * std::max(1.0, hess.diagonal().cwiseAbs().maxCoeff());
                    continue;
                }
                mult = lu.solve(rhs);
            }
            delta = g0;
            if (k > 0) delta.noalias() -= ha * mult.head(k);
            solved = delta.allFinite() && mult.allFinite();
        }
        for (auto r : active_rows) in_active_[cons[r]] = 0;
        if (!solved) {
            report.skipped = true;
            break;
        }

        double theta = 1.0;
        if (!equality) {
            for (std::size_t r = 0; r < cons.size(); ++r) {
                if (std::find(active_rows.begin(), active_rows.end(), r) != active_rows.end()) continue;
                if (slack[r] < 0.0) continue;
                const double rate = rows.row(static_cast<Eigen::Index>(r)).dot(delta);
                if (rate > 0.0) theta = std::min(theta, slack[r] / rate);
            }
        }
        theta = std::max(theta, 0.0);

        for (Eigen::Index i = 0; i < nw; ++i)
            state.u[static_cast<Eigen::Index>(w.dofs[static_cast<std::size_t>(i)])] += theta * delta[i];
        // Only the window's own multipliers are stored; neighbours keep theirs.
        if (!equality)
            for (auto s : w.squares) state.lambda[static_cast<Eigen::Index>(s)] = 0.0;
        std::vector<double> lambda(active_rows.size());
        for (Eigen::Index r = 0; r < k; ++r) {
            const std::size_t wr = active_rows[static_cast<std::size_t>(r)];
            lambda[static_cast<std::size_t>(r)] = mult[r];
            if (wr < w.squares.size()) state.lambda[static_cast<Eigen::Index>(cons[wr])] = mult[r];
        }

        ++report.iterations;
        const double step = theta * delta.norm();
        if (keep_log) {
            WindowIteration it;
            for (auto r : active_rows) it.active.push_back(cons[r]);
            it.lambda = lambda;
            it.dropped = dropped;
            it.theta = theta;
            it.step_norm = step;
            report.log.push_back(std::move(it));
        }

        if (equality) break;
        if (active_rows.empty() && step <= opt_.step_tol) break;
        const bool all_nonnegative = std::all_of(lambda.begin(), lambda.end(), [](double l) { return l >= 0.0; });
        if (theta >= 1.0 && all_nonnegative) break;
        prev_active = std::move(active_rows);
        prev_lambda = std::move(lambda);
    }

    for (auto dof : w.dofs) local_[dof] = -1;
    return report;
}

SparseMatrix transpose_rows(const SparseMatrix& a) {
    SparseMatrix at = a.transpose();
    at.makeCompressed();
    return at;
}

struct Pass {
    int ox;
    int oy;
};

// Open windows of one red-black color share no free variables. Closed windows
// touching at a corner would share that point, so they take four colors.
int window_colors(bool closed) { return closed ? 4 : 2; }

std::vector<Window> pass_windows(const CorrectionProblem& problem, int m, Pass pass, int color, bool closed) {
    std::vector<Window> out;
    const Grid& g = problem.grid;
    for (int bj = 0; -pass.oy + bj * m < g.ny; ++bj)
        for (int bi = 0; -pass.ox + bi * m < g.nx; ++bi) {
            const int c = closed ? bi % 2 + 2 * (bj % 2) : (bi + bj) % 2;
            if (c != color) continue;
            Window w = make_window(problem, -pass.ox + bi * m, -pass.oy + bj * m, m, m, closed);
            if (!w.squares.empty()) out.push_back(std::move(w));
        }
    return out;
}

}  // namespace

WindowReport single_window_solve(const Window& window, const CorrectionProblem& problem, SolverState& state,
                                 const RelaxOptions& options, bool keep_log) {
    const SparseMatrix at = transpose_rows(problem.constraints.a);
    WindowSolver solver(problem, at, options);
    return solver.solve(window, state, keep_log);
}

RelaxStats window_sweep(const CorrectionProblem& problem, SolverState& state, const RelaxOptions& options,
                        int sweeps) {
    RelaxStats stats;
    if (problem.num_dofs() == 0) return stats;
    const SparseMatrix at = transpose_rows(problem.constraints.a);
    const int m = std::max(1, options.window);
    const int half = std::max(1, m / 2);
    const Pass passes[] = {{0, 0}, {half, 0}, {0, half}};
    const int threads = options.ordering == WindowOrdering::colored ? std::max(1, options.threads) : 1;
    const bool closed = problem.equality() && options.closed_equality_windows;

    std::vector<WindowSolver> solvers;
    solvers.reserve(static_cast<std::size_t>(threads));
    for (int t = 0; t < threads; ++t) solvers.emplace_back(problem, at, options);

    auto record = [&](const WindowReport& r) {
        ++stats.windows;
        stats.iterations += static_cast<std::size_t>(r.iterations);
        stats.skipped += r.skipped ? 1 : 0;
    };

    for (int sweep = 0; sweep < sweeps; ++sweep) {
        for (const Pass& pass : passes) {
            for (int color = 0; color < window_colors(closed); ++color) {
                const std::vector<Window> windows = pass_windows(problem, m, pass, color, closed);
                if (options.ordering == WindowOrdering::sequential) {
                    for (const auto& w : windows) record(solvers[0].solve(w, state, false));
                    continue;
                }
                // Same-color windows change disjoint variables and multipliers;
                // solve them all from one snapshot, then merge.
                const SolverState snapshot = state;
                struct Update {
                    std::vector<double> u;
                    std::vector<double> lambda;
                    WindowReport report;
                };
                std::vector<Update> updates(windows.size());
                auto work = [&](int tid) {
                    SolverState local = snapshot;
                    for (std::size_t k = static_cast<std::size_t>(tid); k < windows.size();
                         k += static_cast<std::size_t>(threads)) {
                        const Window& w = windows[k];
                        updates[k].report = solvers[static_cast<std::size_t>(tid)].solve(w, local, false);
                        for (auto dof : w.dofs) {
                            const auto i = static_cast<Eigen::Index>(dof);
                            updates[k].u.push_back(local.u[i]);
                            local.u[i] = snapshot.u[i];
                        }
                        for (auto s : w.squares) {
                            const auto i = static_cast<Eigen::Index>(s);
                            updates[k].lambda.push_back(local.lambda[i]);
                            local.lambda[i] = snapshot.lambda[i];
                        }
                    }
                };
                if (threads == 1) {
                    work(0);
                } else {
                    std::vector<std::thread> pool;
                    for (int t = 0; t < threads; ++t) pool.emplace_back(work, t);
                    for (auto& th : pool) th.join();
                }
                for (std::size_t k = 0; k < windows.size(); ++k) {
                    const Window& w = windows[k];
                    for (std::size_t i = 0; i < w.dofs.size(); ++i)
                        state.u[static_cast<Eigen::Index>(w.dofs[i])] = updates[k].u[i];
                    for (std::size_t i = 0; i < w.squares.size(); ++i)
                        state.lambda[static_cast<Eigen::Index>(w.squares[i])] = updates[k].lambda[i];
                    record(updates[k].report);
                }
            }
        }
    }
    return stats;
}

std::vector<double> energy_trace_sweeps(const CorrectionProblem& problem, SolverState& state,
                                        const RelaxOptions& options, int count) {
    std::vector<double> trace{problem.energy.evaluate(state.u)};
    for (int k = 0; k < count; ++k) {
        window_sweep(problem, state, options, 1);
        trace.push_back(problem.energy.evaluate(state.u));
    }
    return trace;
}

int threads_from_env() {
    if (const char* env = std::getenv("LAYOUTMG_THREADS")) {
        try {
            return std::max(1, std::stoi(env));
        } catch (const std::exception&) {
            return 1;
        }
    }
    return 1;
}

}  // namespace layoutmg
