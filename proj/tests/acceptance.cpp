// Acceptance criteria 1-12. `acceptance N` runs one criterion, no argument runs
// all of them. Each prints one [PASS]/[FAIL] line; the exit status is non-zero
// when any criterion fails.

#include "layoutmg/driver.hpp"
#include "layoutmg/multigrid.hpp"
#include "layoutmg/svg.hpp"
#include "oracles.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

using namespace layoutmg;

namespace {

struct Outcome {
    bool pass = true;
    std::ostringstream detail;
    std::vector<std::string> failed;

    void check(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            failed.push_back(what);
        }
    }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::filesystem::path artifact_dir() {
    const char* env = std::getenv("LAYOUTMG_ARTIFACTS");
    std::filesystem::path dir = env ? env : "acceptance_artifacts";
    std::filesystem::create_directories(dir);
    return dir;
}

// The perturbed 32x32 mesh shared by criteria 7, 8 and 12. The perturbation
// bound is one mesh spacing, which is below 2 h_x of the 32 x 32 grid.
std::pair<Graph, Layout> mesh32(double d) {
    InstanceSpec spec;
    spec.kind = InstanceKind::mesh;
    spec.rows = spec.cols = 32;
    spec.perturbation = d;
    spec.seed = 7;
    return generate_instance(spec);
}

Schedule alternating10() {
    ScheduleOverrides ov;
    ov.sizes = {16, 32};
    ov.count = 10;
    return make_schedule(ScheduleKind::alternating, 0, ov);
}

void c1(Outcome& out) {
    const auto t0 = Clock::now();
    Random rng(101);
    auto [graph, layout] = oracle::random_instance(rng, 60, {0.0, 0.0, 12.0, 12.0}, 0.4, 1.2, 60);
    // An empty square makes the equality problem ill-posed (the exact step
    // grows without bound), so centres are spread one per lattice cell.
    oracle::place_on_lattice(rng, layout, 8, 1.5, 0.45);
    const Grid grid(layout.domain, 8, 8);
    CorrectionProblem problem = assemble_problem(graph, layout, grid, 0.05, ConstraintMode::equality);
    const oracle::KktSolution exact = oracle::solve_equality(problem);

    Hierarchy h(std::move(problem), MultigridOptions{});
    double err = 0.0;
    int cycles = 0;
    for (cycles = 1; cycles <= 10; ++cycles) {
        h.v_cycle();
        err = oracle::rel(h.state().u, exact.u);
        if (err <= 1e-6) break;
    }
    const double secs = seconds_since(t0);
    out.detail << "levels " << h.depth() << ", rel error in u " << err << " after " << std::min(cycles, 10)
               << " V-cycles, " << secs << " s";
    out.check(err <= 1e-6, "u within 1e-6 in at most 10 cycles");
    out.check(secs < 5.0, "runtime < 5 s");
}

void c2(Outcome& out) {
    const auto t0 = Clock::now();
    Random rng(202);
    auto [graph, layout] = oracle::random_instance(rng, 40, {0.0, 0.0, 10.0, 10.0}, 0.4, 1.2, 30);
    double galerkin = 0.0, hier = 0.0, interp = 0.0, adjoint = 0.0;
    for (int n : {2, 4, 8}) {
        const Grid fg(layout.domain, n, n);
        const Grid cg = coarsen_grid(fg);
        const DofMap fd(fg), cd(cg);
        const DenseMatrix tent = oracle::tent_prolongation(fd, cd);
        const SparseMatrix p = prolongation_matrix(fd, cd);
        if (cd.size() == 0) continue;  // a 1x1 grid has every variable on the boundary
        interp = std::max(interp, oracle::rel(DenseMatrix(p), tent));
        const SparseMatrix r = restriction_matrix(fd, cd);
        adjoint = std::max(adjoint, (DenseMatrix(r) - DenseMatrix(p.transpose())).cwiseAbs().maxCoeff());

        const CorrectionProblem fine = assemble_problem(graph, layout, fg, 0.05, ConstraintMode::equality);
        const DenseMatrix q(fine.energy.q);
        const QuadraticForm coarse = galerkin_energy(fine.energy, p, Vector::Zero(fine.energy.l.size()));
        galerkin = std::max(galerkin, oracle::rel(DenseMatrix(coarse.q), tent.transpose() * q * tent));

        if (n >= 4) {
            MultigridOptions mo;
            mo.coarsest = n / 2;
            const Hierarchy h(fine, mo);
            const DenseMatrix reg = q + 2.0 * fine.beta * DenseMatrix::Identity(q.rows(), q.cols());
            hier = std::max(hier, oracle::rel(DenseMatrix(h.level(1).problem.energy.q), tent.transpose() * reg * tent));
        }
    }
    out.detail << "P vs tent " << interp << ", Q vs PtqP " << galerkin << ", level Q " << hier << ", R - Pt "
               << adjoint;
    out.check(interp <= 1e-12, "interpolation matches tent functions");
    out.check(galerkin <= 1e-10 && hier <= 1e-10, "Galerkin Q within 1e-10");
    out.check(adjoint <= 1e-12, "restriction = prolongation^T within 1e-12");

    // FAS fixed point: from the exact fine solution the coarse level returns
    // its anchors and the fine state does not move.
    const Grid grid(layout.domain, 8, 8);
    const CorrectionProblem fine = assemble_problem(graph, layout, grid, 0.05, ConstraintMode::equality);
    const oracle::KktSolution exact = oracle::solve_equality(fine);
    {
        MultigridOptions mo;
        mo.coarsest = 4;
        Hierarchy h(fine, mo);
        h.state() = {exact.u, exact.lambda, exact.eta};
        h.restrict_to(0);
        Level& c = h.level(1);
        coarsest_solve(c.problem, c.state, mo);
        const double du = c.state.u.cwiseAbs().maxCoeff();
        const double dl = (c.state.lambda - c.lambda_anchor).cwiseAbs().maxCoeff();
        const double de = std::abs(c.state.eta - c.eta_anchor);
        const double scale = std::max({1.0, exact.u.cwiseAbs().maxCoeff(), exact.lambda.cwiseAbs().maxCoeff()});
        const double fp = std::max({du, dl, de}) / scale;
        h.prolong_from(0);
        const double moved = std::max((h.state().u - exact.u).cwiseAbs().maxCoeff(),
                                      (h.state().lambda - exact.lambda).cwiseAbs().maxCoeff()) / scale;
        out.detail << ", FAS fixed point " << fp << " (fine drift " << moved << ")";
        out.check(fp <= 1e-9 && moved <= 1e-9, "FAS zero correction within 1e-9");
    }

    // FAS and the correction scheme coincide in equality mode.
    {
        MultigridOptions fas, cs;
        fas.coarsest = cs.coarsest = 2;
        cs.scheme = CoarseScheme::correction;
        Hierarchy a(fine, fas), b(fine, cs);
        window_sweep(a.fine_problem(), a.state(), fas.relax, 1);
        b.state() = a.state();
        for (int k = 0; k < 2; ++k) {
            a.v_cycle();
            b.v_cycle();
        }
        const double d = std::max({oracle::rel(a.state().u, b.state().u), oracle::rel(a.state().lambda, b.state().lambda),
                                   std::abs(a.state().eta - b.state().eta) / std::max(1.0, std::abs(b.state().eta))});
        out.detail << ", FAS vs CS " << d;
        out.check(d <= 1e-9, "FAS equals CS within 1e-9");
    }
    const double secs = seconds_since(t0);
    out.detail << ", " << secs << " s";
    out.check(secs < 10.0, "runtime < 10 s");
}

void c3(Outcome& out) {
    Random rng(303);
    auto [graph, layout] = oracle::random_instance(rng, 120, {0.0, 0.0, 16.0, 16.0}, 0.3, 1.0, 80);
    const Grid grid(layout.domain, 16, 16);
    MultigridOptions mo;
    mo.coarsest = 1;
    const Hierarchy h(assemble_problem(graph, layout, grid, 0.05, ConstraintMode::inequality), mo);
    double worst = 0.0;
    for (std::size_t k = 0; k < h.depth(); ++k) {
        const SparseMatrix& a = h.level(k).problem.constraints.a;
        if (a.nonZeros() == 0) continue;
        const Vector sums = DenseMatrix(a).colwise().sum().transpose();
        const double amax = DenseMatrix(a).cwiseAbs().maxCoeff();
        worst = std::max(worst, sums.cwiseAbs().maxCoeff() / amax);
    }
    out.detail << h.depth() << " levels, max |column sum| / max|a| " << worst;
    out.check(worst <= 1e-12, "column sums vanish on every level");

    // Area conservation for instances whose rectangles lie inside the domain.
    double area_err = 0.0;
    InstanceSpec mesh;
    mesh.kind = InstanceKind::mesh;
    mesh.rows = 12;
    mesh.cols = 9;
    mesh.perturbation = 0.4;
    const auto [mg, ml] = generate_instance(mesh);
    for (const auto& [g, l] : {std::pair{graph, layout}, std::pair{mg, ml}}) {
        Layout inside = l;
        for (std::size_t i = 0; i < g.size(); ++i) {
            const auto& v = g.vertices()[i];
            inside.positions[i].x = std::clamp(inside.positions[i].x, l.domain.x0 + v.width / 2, l.domain.x1() - v.width / 2);
            inside.positions[i].y = std::clamp(inside.positions[i].y, l.domain.y0 + v.height / 2, l.domain.y1() - v.height / 2);
        }
        for (int n : {4, 8, 16}) {
            const std::vector<double> ups = density(Grid(l.domain, n, n), g, inside);
            double sum = 0.0;
            for (double u : ups) sum += u;
            area_err = std::max(area_err, std::abs(sum - g.total_area()) / g.total_area());
        }
    }
    out.detail << ", area conservation rel error " << area_err;
    out.check(area_err <= 1e-10, "sum of densities equals total vertex area");
}

void c4(Outcome& out) {
    Random rng(404);
    double worst = 0.0;
    int singular = 0;
    for (int t = 0; t < 100; ++t) {
        const int k = 1 + static_cast<int>(rng.index(3));
        const int n = k + 1 + static_cast<int>(rng.index(static_cast<std::size_t>(20 - k)));
        DenseMatrix g(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) g(i, j) = rng.uniform(-1.0, 1.0);
        const DenseMatrix basis = Eigen::HouseholderQR<DenseMatrix>(g).householderQ();
        const DenseMatrix x = basis.leftCols(k);
        const DenseMatrix v = basis.rightCols(n - k);
        Vector eig(n - k);
        for (int i = 0; i < n - k; ++i) eig[i] = (rng.unit() < 0.5 ? -1.0 : 1.0) * rng.uniform(0.1, 10.0);
        const DenseMatrix a = v * eig.asDiagonal() * v.transpose();

        DenseMatrix b = DenseMatrix::Zero(n + k, n + k);
        b.topLeftCorner(n, n) = a;
        b.topRightCorner(n, k) = x;
        b.bottomLeftCorner(k, n) = x.transpose();
        Vector rhs(n + k);
        for (int i = 0; i < n + k; ++i) rhs[i] = rng.uniform(-1.0, 1.0);
        const auto sol = oracle::sysv(b, rhs);
        if (!sol) {
            ++singular;
            continue;
        }
        worst = std::max(worst, (b * *sol - rhs).norm() / rhs.norm());
    }
    out.detail << "100 bordered systems, singular " << singular << ", worst relative residual " << worst;
    out.check(singular == 0 && worst <= 1e-8, "all nonsingular with residual <= 1e-8");
}

void c5(Outcome& out) {
    Random rng(505);
    double worst = 0.0;
    for (int t = 0; t < 20; ++t) {
        const int n = 2 << rng.index(2);  // 2 or 4
        auto [graph, layout] = oracle::random_instance(rng, 6 + rng.index(10), {0.0, 0.0, 6.0, 6.0}, 0.4, 1.2, 5);
        const Grid grid(layout.domain, n, n);
        const ConstraintMode mode = t % 2 ? ConstraintMode::equality : ConstraintMode::inequality;
        const CorrectionProblem p = assemble_problem(graph, layout, grid, 0.05, mode);
        SolverState s = SolverState::zero(p);
        for (Eigen::Index i = 0; i < s.u.size(); ++i) s.u[i] = rng.uniform(-0.5, 0.5);
        for (Eigen::Index i = 0; i < s.lambda.size(); ++i) s.lambda[i] = rng.uniform(-1.0, 1.0);
        s.eta = rng.uniform(-1.0, 1.0);

        const Vector g = lagrangian_gradient(p, s);
        Vector fd(g.size());
        const double h = 1e-4;
        const Eigen::Index nu = s.u.size(), nl = s.lambda.size();
        for (Eigen::Index k = 0; k < g.size(); ++k) {
            SolverState plus = s, minus = s;
            auto bump = [&](SolverState& st, double by) {
                if (k < nu) st.u[k] += by;
                else if (k < nu + nl) st.lambda[k - nu] += by;
                else st.eta += by;
            };
            bump(plus, h);
            bump(minus, -h);
            fd[k] = (pseudo_lagrangian(p, plus) - pseudo_lagrangian(p, minus)) / (2.0 * h);
        }
        worst = std::max(worst, oracle::rel(g, fd));
    }
    out.detail << "20 systems, worst relative gradient error " << worst;
    out.check(worst <= 1e-6, "gradient within 1e-6 of central differences");
}

void c6(Outcome& out) {
    // A window with exactly one violated square and ample slack elsewhere. The
    // dual regularisation is switched off so the window solve is the exact
    // equality-constrained step the oracle computes.
    Random rng(606);
    std::vector<Vertex> vs;
    std::vector<Point> ps;
    for (int j = 0; j < 8; ++j)
        for (int i = 0; i < 8; ++i)
            if ((i + j) % 2 == 0) {
                vs.push_back({static_cast<std::int64_t>(vs.size()), 0.6, 0.6});
                ps.push_back({i + 0.5 + rng.uniform(-0.2, 0.2), j + 0.5 + rng.uniform(-0.2, 0.2)});
            }
    for (int k = 0; k < 3; ++k) {
        vs.push_back({static_cast<std::int64_t>(vs.size()), 0.6, 0.6});
        ps.push_back({2.5 + rng.uniform(-0.15, 0.15), 2.5 + rng.uniform(-0.15, 0.15)});
    }
    std::vector<Edge> es;
    for (std::size_t i = 1; i < vs.size(); ++i) es.push_back({i - 1, i, 1.0});
    const Graph graph(vs, es);
    const Layout layout{ps, {0.0, 0.0, 8.0, 8.0}};
    const Grid grid(layout.domain, 8, 8);
    const CorrectionProblem p = assemble_problem(graph, layout, grid, 0.05, ConstraintMode::inequality);
    const double area = grid.square_area();
    const Window w = make_window(p, 0, 0, 4, 4);

    RelaxOptions exact;
    exact.dual_reg = 0.0;
    SolverState s = SolverState::zero(p);
    const WindowReport rep = single_window_solve(w, p, s, exact, true);

    // Oracle: min E(u0 + D delta) + beta |u0 + D delta|^2 + |delta|^2 s.t. a_s (u0 + D delta) = b_s.
    std::size_t target = 0;
    {
        SolverState zero = SolverState::zero(p);
        const Vector slack0 = p.constraints.b - p.constraints.a * zero.u;
        int count = 0;
        for (auto sq : w.squares)
            if (slack0[static_cast<Eigen::Index>(sq)] < exact.eps_factor * area) {
                target = sq;
                ++count;
            }
        for (auto sq : w.ring)
            if (slack0[static_cast<Eigen::Index>(sq)] < exact.eps_factor * area) ++count;
        out.check(count == 1, "instance has exactly one violated square in the window");
    }
    const auto nw = static_cast<Eigen::Index>(w.dofs.size());
    const DenseMatrix q(p.energy.q);
    const DenseMatrix a(p.constraints.a);
    DenseMatrix kkt = DenseMatrix::Zero(nw + 1, nw + 1);
    Vector rhs = Vector::Zero(nw + 1);
    for (Eigen::Index i = 0; i < nw; ++i) {
        const auto di = static_cast<Eigen::Index>(w.dofs[static_cast<std::size_t>(i)]);
        for (Eigen::Index j = 0; j < nw; ++j)
            kkt(i, j) = q(di, static_cast<Eigen::Index>(w.dofs[static_cast<std::size_t>(j)]));
        kkt(i, i) += 2.0 * p.beta + 2.0 * exact.proximal;
        rhs[i] = -p.energy.l[di];
        kkt(i, nw) = kkt(nw, i) = a(static_cast<Eigen::Index>(target), di);
    }
    rhs[nw] = p.constraints.b[static_cast<Eigen::Index>(target)];
    const auto sol = oracle::sysv(kkt, rhs);
    double diff = 1.0;
    if (sol) {
        Vector got(nw);
        for (Eigen::Index i = 0; i < nw; ++i) got[i] = s.u[static_cast<Eigen::Index>(w.dofs[static_cast<std::size_t>(i)])];
        diff = std::max(oracle::rel(got, sol->head(nw)),
                        std::abs(s.lambda[static_cast<Eigen::Index>(target)] - (*sol)[nw]) / std::max(1.0, std::abs((*sol)[nw])));
    }
    out.detail << "one-active window vs dense QP " << diff << " (" << rep.iterations << " iteration)";
    out.check(rep.iterations == 1 && diff <= 1e-9, "single active constraint matches oracle within 1e-9");

    // Frozen variables and the theta step, on every window of a crowded instance.
    InstanceSpec spec;
    spec.kind = InstanceKind::mesh;
    spec.rows = spec.cols = 16;
    spec.perturbation = 1.0;
    spec.seed = 3;
    const auto [mg, ml] = generate_instance(spec);
    const Grid mgrid(ml.domain, 16, 16);
    const CorrectionProblem mp = assemble_problem(mg, ml, mgrid, 0.05, ConstraintMode::inequality);
    const double marea = mgrid.square_area();
    RelaxOptions one;
    one.max_iters = 1;
    SolverState st = SolverState::zero(mp);
    bool frozen_ok = true;
    double worst_theta = 0.0;
    std::size_t steps = 0;
    for (int sweep = 0; sweep < 2; ++sweep)
        for (int wy = -2; wy < 16; wy += 4)
            for (int wx = -2; wx < 16; wx += 4) {
                const Window win = make_window(mp, wx, wy, 4, 4);
                if (win.dofs.empty()) continue;
                for (int it = 0; it < 6; ++it) {
                    const SolverState before = st;
                    const Vector slack_before = mp.constraints.b - mp.constraints.a * st.u;
                    const WindowReport r = single_window_solve(win, mp, st, one, true);
                    std::vector<char> free(mp.num_dofs(), 0), owned(mp.num_squares(), 0);
                    for (auto d : win.dofs) free[d] = 1;
                    for (auto sq : win.squares) owned[sq] = 1;
                    for (std::size_t d = 0; d < mp.num_dofs(); ++d)
                        if (!free[d] && st.u[static_cast<Eigen::Index>(d)] != before.u[static_cast<Eigen::Index>(d)])
                            frozen_ok = false;
                    for (std::size_t sq = 0; sq < mp.num_squares(); ++sq)
                        if (!owned[sq] && st.lambda[static_cast<Eigen::Index>(sq)] != before.lambda[static_cast<Eigen::Index>(sq)])
                            frozen_ok = false;
                    if (r.log.empty()) break;
                    const auto& active = r.log.front().active;
                    const Vector slack_after = mp.constraints.b - mp.constraints.a * st.u;
                    std::vector<std::size_t> cons = win.squares;
                    cons.insert(cons.end(), win.ring.begin(), win.ring.end());
                    for (auto sq : cons) {
                        if (std::find(active.begin(), active.end(), sq) != active.end()) continue;
                        const auto e = static_cast<Eigen::Index>(sq);
                        if (slack_before[e] < 0.0) continue;
                        worst_theta = std::max(worst_theta, -slack_after[e] / marea);
                    }
                    ++steps;
                }
            }
    out.detail << "; frozen " << (frozen_ok ? "bit-identical" : "CHANGED") << " over " << steps
               << " steps, worst theta-step violation " << worst_theta << " A";
    out.check(frozen_ok, "frozen variables bit-identical");
    out.check(worst_theta <= 1e-9, "theta step keeps satisfied constraints within 1e-9 A");
}

struct MeshRun {
    double energy = 0.0;
    double violation = 0.0;
    double seconds = 0.0;
    CorrectionResult result;
};

MeshRun run_mesh(const Graph& g, const Layout& l, const DriverParams& params) {
    const auto t0 = Clock::now();
    MeshRun run;
    run.result = correct_layout(g, l, alternating10(), params);
    run.seconds = seconds_since(t0);
    run.energy = layout_energy(g, run.result.layout);
    run.violation = layout_violation(g, run.result.layout, 32, params.slack);
    return run;
}

void c7(Outcome& out) {
    const auto [g, l] = mesh32(1.0);
    const auto [g0, l0] = mesh32(0.0);
    const double e_ref = layout_energy(g0, l0);
    const double area = Grid(l.domain, 32, 32).square_area();
    const MeshRun run = run_mesh(g, l, DriverParams{});
    std::ofstream(artifact_dir() / "mesh32_trace.csv") << [&] {
        std::ostringstream s;
        write_trace_csv(s, run.result.trace);
        return s.str();
    }();
    out.detail << "unperturbed E " << e_ref << " (hand count " << 0.5 * 2 * 32 * 31 << "), initial E "
               << layout_energy(g, l) << ", final E " << run.energy << " (" << run.energy / e_ref
               << " x), max violation " << run.violation / area << " A, " << run.seconds << " s";
    out.check(run.energy <= 1.10 * e_ref, "energy within 10% of unperturbed");
    out.check(run.violation <= 0.05 * area, "violation <= 5% of A");
    out.check(run.seconds < 60.0, "runtime < 60 s");
}

void c8(Outcome& out) {
    const auto [g, l] = mesh32(1.0);
    DriverParams vc, rx;
    rx.relax_only = true;
    const MeshRun a = run_mesh(g, l, vc);
    const MeshRun b = run_mesh(g, l, rx);
    out.detail << "V-cycle E " << a.energy << " vs relaxation-only E " << b.energy << " at "
               << vc.multigrid.nu1 + vc.multigrid.nu2 << " finest sweeps per step";
    out.check(a.energy <= b.energy, "V-cycle energy <= relaxation-only energy");
}

void c9(Outcome& out) {
    // A loose lattice of small vertices with four extra ones piled into one square.
    std::vector<Vertex> vs;
    std::vector<Point> ps;
    std::vector<Edge> es;
    for (int j = 0; j < 8; ++j)
        for (int i = 0; i < 8; ++i) {
            vs.push_back({static_cast<std::int64_t>(vs.size()), 0.7, 0.7});
            ps.push_back({i + 0.5, j + 0.5});
            const std::size_t id = vs.size() - 1;
            if (i > 0) es.push_back({id - 1, id, 1.0});
            if (j > 0) es.push_back({id - 8, id, 1.0});
        }
    for (int k = 0; k < 4; ++k) {
        vs.push_back({static_cast<std::int64_t>(vs.size()), 0.7, 0.7});
        ps.push_back({5.3 + 0.1 * k, 2.4 + 0.05 * k});
        es.push_back({static_cast<std::size_t>(2 * 8 + 5), vs.size() - 1, 1.0});
    }
    const Graph graph(vs, es);
    const Layout layout{ps, {0.0, 0.0, 8.0, 8.0}};
    const DensityField f0 = density_field(Grid(layout.domain, 8, 8), graph, layout, 0.05);
    int overfull = 0;
    for (std::size_t s = 0; s < f0.upsilon.size(); ++s) overfull += f0.upsilon[s] > f0.capacity[s];

    ScheduleOverrides ov;
    ov.sizes = {8};
    const CorrectionResult res = correct_layout(graph, layout, make_schedule(ScheduleKind::fixed, graph.size(), ov), {});
    const double before = layout_violation(graph, layout, 8, 0.05);
    const double after = layout_violation(graph, res.layout, 8, 0.05);
    out.detail << overfull << " overfull square(s), max violation " << before << " -> " << after;
    out.check(overfull == 1, "instance has exactly one overfull square");
    out.check(after < before, "one outer step strictly decreases the violation");
}

void c10(Outcome& out) {
    InstanceSpec spec;
    spec.kind = InstanceKind::mesh;
    spec.rows = spec.cols = 64;
    spec.perturbation = 1.0;
    spec.seed = 11;
    const auto [g, l] = generate_instance(spec);
    std::vector<double> med;
    for (int n : {16, 32, 64}) {
        const Grid grid(l.domain, n, n);
        const CorrectionProblem p = assemble_problem(g, l, grid, 0.05, ConstraintMode::inequality);
        std::vector<double> ms;
        for (int run = 0; run < 5; ++run) {
            Hierarchy h(p, MultigridOptions{});
            const auto t0 = Clock::now();
            h.v_cycle();
            ms.push_back(1e3 * seconds_since(t0));
        }
        std::nth_element(ms.begin(), ms.begin() + 2, ms.end());
        med.push_back(ms[2]);
    }
    const double r1 = med[1] / med[0], r2 = med[2] / med[1];
    out.detail << "median ms per V-cycle 16/32/64: " << med[0] << " / " << med[1] << " / " << med[2]
               << ", growth " << r1 << " and " << r2;
    out.check(r1 >= 3.0 && r1 <= 6.0 && r2 >= 3.0 && r2 <= 6.0, "growth per doubling in [3, 6]");
}

void c11(Outcome& out) {
    InstanceSpec spec;
    spec.kind = InstanceKind::snake;
    spec.length = 64;
    const auto [g, l] = generate_instance(spec);
    const Schedule sched = make_schedule(ScheduleKind::fmg, g.size());
    const CorrectionResult res = correct_layout(g, l, sched, {});
    const int finest = sched.steps.back().grid;
    const double area = Grid(l.domain, finest, finest).square_area();
    const double b0 = bounding_box(g, l).area();
    const double b1 = bounding_box(g, res.layout).area();
    const double viol = layout_violation(g, res.layout, finest, 0.05);

    const auto dir = artifact_dir();
    RenderOptions ro;
    ro.grid = finest;
    std::ofstream(dir / "snake_initial.svg") << render_svg(g, l, ro);
    std::ofstream(dir / "snake_final.svg") << render_svg(g, res.layout, ro);
    std::ofstream(dir / "snake_trace.svg") << trace_plot_svg(res.trace);

    out.detail << "bbox area " << b0 << " -> " << b1 << " (" << b1 / b0 << " x), max violation " << viol / area
               << " A on the " << finest << "x" << finest << " grid, SVGs in " << dir.string();
    out.check(b1 >= 4.0 * b0, "bounding box grows at least 4x");
    out.check(viol <= 0.05 * area, "violation <= 5% of A");
}

void c12(Outcome& out) {
    // All three sizes get the same generous active-set budget so each window
    // solve is converged; the published cap of 6 iterations was stated for 4x4.
    const auto [g, l] = mesh32(1.0);
    std::vector<double> e;
    for (int m : {4, 8, 16}) {
        DriverParams p;
        p.multigrid.relax.window = m;
        p.multigrid.relax.max_iters = 100;
        const MeshRun run = run_mesh(g, l, p);
        e.push_back(run.energy);
        out.detail << "m=" << m << " E " << run.energy << " (" << run.seconds << " s); ";
    }
    const auto [lo, hi] = std::minmax_element(e.begin(), e.end());
    const double spread = (*hi - *lo) / *lo;
    out.detail << "spread " << 100.0 * spread << "%";
    out.check(spread <= 0.05, "energies agree within 5%");
}

struct Criterion {
    const char* name;
    std::function<void(Outcome&)> run;
};

}  // namespace

int main(int argc, char** argv) {
    const std::vector<Criterion> all = {
        {"oracle equivalence (equality mode)", c1},
        {"Galerkin and adjointness suite", c2},
        {"conservation", c3},
        {"bordered-system nonsingularity", c4},
        {"gradient check", c5},
        {"smoother correctness", c6},
        {"mesh recovery", c7},
        {"V-cycle vs relaxation-only", c8},
        {"directional sanity", c9},
        {"near-linear scaling", c10},
        {"space utilization (snake)", c11},
        {"window-size robustness", c12},
    };
    std::vector<int> which;
    for (int i = 1; i < argc; ++i) which.push_back(std::atoi(argv[i]));
    if (which.empty())
        for (int i = 1; i <= static_cast<int>(all.size()); ++i) which.push_back(i);

    int failures = 0;
    for (int id : which) {
        if (id < 1 || id > static_cast<int>(all.size())) {
            std::cerr << "no criterion " << id << "\n";
            return 2;
        }
        Outcome out;
        try {
            all[static_cast<std::size_t>(id - 1)].run(out);
        } catch (const std::exception& e) {
            out.pass = false;
            out.detail << "exception: " << e.what();
        }
        failures += !out.pass;
        std::cout << (out.pass ? "[PASS] " : "[FAIL] ") << "C" << id << " " << all[static_cast<std::size_t>(id - 1)].name
                  << ": " << out.detail.str();
        for (std::size_t k = 0; k < out.failed.size(); ++k) std::cout << (k == 0 ? " | not met: " : "; ") << out.failed[k];
        std::cout << std::endl;
    }
    return failures == 0 ? 0 : 1;
}
