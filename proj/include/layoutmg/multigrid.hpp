#pragma once

#include "layoutmg/assembly.hpp"
#include "layoutmg/relaxation.hpp"

#include <vector>

namespace layoutmg {

/// Bilinear coarse-to-fine interpolation of displacement variables, one row
/// per fine variable. Each component interpolates from its own coarse
/// component; eliminated coarse entries contribute nothing.
SparseMatrix prolongation_matrix(const DofMap& fine, const DofMap& coarse);

/// Fine-to-coarse transfer assembled coarse-variable by coarse-variable:
/// R_I gathers alpha_iI from every fine variable i it interpolates to.
SparseMatrix restriction_matrix(const DofMap& fine, const DofMap& coarse);

/// 0/1 matrix with entry (s, S) set when fine square s lies in coarse square S.
SparseMatrix aggregation_matrix(const Grid& fine, const Grid& coarse);

/// Energy in terms of a coarse correction U around the fine iterate ũ:
/// Q = P^T q P, L = P^T (q ũ + l), C = E_f(ũ).
QuadraticForm galerkin_energy(const QuadraticForm& fine, const SparseMatrix& prolongation, const Vector& u_fine);

/// A_SI = sum_{s in S} sum_i a_si alpha_iI, B_S = sum_{s in S} (b_s - a_s . ũ),
/// D_S = sum_{s in S} d_s.
ConstraintSet aggregate_constraints(const ConstraintSet& fine, const SparseMatrix& prolongation,
                                    const SparseMatrix& aggregation, const Vector& u_fine);

enum class CoarseScheme {
    /// Coarse unknowns are full approximations anchored at U0 = 0,
    /// Lambda0 = mean of fine multipliers, H0 = fine eta.
    fas,
    /// Coarse unknowns are pure corrections (all anchors zero). Only valid in
    /// equality mode, where it coincides with FAS.
    correction,
};

struct MultigridOptions {
    int nu1 = 3;
    int nu2 = 3;
    /// Grids with at most this many squares per side are solved directly.
    int coarsest = 4;
    int coarsest_iters = 50;
    CoarseScheme scheme = CoarseScheme::fas;
    RelaxOptions relax;
};

struct Level {
    CorrectionProblem problem;
    SolverState state;
    /// Interpolation from this level to the next finer one (empty on level 0).
    SparseMatrix prolongation;
    SparseMatrix aggregation;
    Vector lambda_anchor;
    double eta_anchor = 0.0;
};

struct CycleStats {
    RelaxStats relax;
    std::size_t coarsest_solves = 0;
};

/// Direct solve of a small level in place. Equality mode: one dense solve of
/// the full block system (beta doubled and retried on failure). Inequality
/// mode: active-set iteration over the whole grid.
void coarsest_solve(const CorrectionProblem& problem, SolverState& state, const MultigridOptions& options);

/// Level hierarchy for one linearized problem. Coarse operators depend only on
/// the fine problem and are built once; right-hand sides are refreshed from
/// the current fine state on every cycle.
class Hierarchy {
public:
    Hierarchy(CorrectionProblem fine, MultigridOptions options);

    std::size_t depth() const { return levels_.size(); }
    const Level& level(std::size_t k) const { return levels_[k]; }
    Level& level(std::size_t k) { return levels_[k]; }
    const CorrectionProblem& fine_problem() const { return levels_.front().problem; }
    SolverState& state() { return levels_.front().state; }
    const SolverState& state() const { return levels_.front().state; }
    const MultigridOptions& options() const { return options_; }

    /// One V-cycle on the finest state.
    CycleStats v_cycle();

    /// Builds level k + 1's right-hand sides and initial state from level k.
    void restrict_to(std::size_t k);
    /// Adds level k + 1's correction into level k.
    void prolong_from(std::size_t k);

private:
    void cycle(std::size_t k, CycleStats& stats);

    std::vector<Level> levels_;
    MultigridOptions options_;
};

}  // namespace layoutmg
