#pragma once

#include "layoutmg/graph.hpp"
#include "layoutmg/grid.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <vector>

namespace layoutmg {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;
using DenseMatrix = Eigen::MatrixXd;

/// E(u) = 1/2 u^T q u + l^T u + C over the free displacement variables.
struct QuadraticForm {
    SparseMatrix q;
    Vector l;
    double constant = 0.0;

    std::size_t size() const { return static_cast<std::size_t>(l.size()); }
    double evaluate(const Vector& u) const;
};

enum class ConstraintMode { equality, inequality };

/// One row per square: a_s . u (net area inflow) compared against b_s.
struct ConstraintSet {
    SparseMatrix a;
    Vector b;
    Vector d;
    ConstraintMode mode = ConstraintMode::inequality;

    std::size_t rows() const { return static_cast<std::size_t>(b.size()); }
};

/// The linearized correction problem on one grid level.
///
/// Minimize E(u) + beta |u|^2 subject to a_s . u + eta d_s (=, <=) b_s, with
/// the pseudo-multiplier row d . lambda = eta_rhs in equality mode. On the
/// finest level eta_rhs is zero; coarse levels carry restricted values.
struct CorrectionProblem {
    Grid grid;
    DofMap dofs;
    QuadraticForm energy;
    ConstraintSet constraints;
    double beta = 0.0;
    double eta_rhs = 0.0;

    bool equality() const { return constraints.mode == ConstraintMode::equality; }
    std::size_t num_dofs() const { return energy.size(); }
    std::size_t num_squares() const { return constraints.rows(); }
};

/// Displacements, one multiplier per square and the pseudo-multiplier eta.
struct SolverState {
    Vector u;
    Vector lambda;
    double eta = 0.0;

    static SolverState zero(const CorrectionProblem& problem);
};

QuadraticForm assemble_energy(const Graph& graph, const Layout& layout, const Grid& grid, const DofMap& dofs);

ConstraintSet assemble_constraints(const Grid& grid, const DofMap& dofs, const DensityField& field,
                                   ConstraintMode mode);

/// 1e-6 times the mean diagonal of q (1e-6 when q has no diagonal).
double default_beta(const SparseMatrix& q);

/// Full fine-level problem around the current layout.
CorrectionProblem assemble_problem(const Graph& graph, const Layout& layout, const Grid& grid, double slack,
                                   ConstraintMode mode, double beta = -1.0);

/// Symmetric block system over [u | lambda_active | eta]:
///
///   [ q + 2 beta I   A_act^T   0 ] [u]        [ -l      ]
///   [ A_act          0         d ] [lambda] = [ b_act   ]
///   [ 0              d^T       0 ] [eta]      [ eta_rhs ]
///
/// The eta row/column is present only when `with_eta` is set.
struct SaddleSystem {
    SparseMatrix matrix;
    Vector rhs;
    std::vector<std::size_t> active;
    std::size_t num_dofs = 0;
    bool with_eta = false;

    std::size_t size() const { return static_cast<std::size_t>(rhs.size()); }
};

SaddleSystem assemble_saddle(const CorrectionProblem& problem, const std::vector<std::size_t>& active, double beta,
                             bool with_eta);

/// All squares active, eta row included.
SaddleSystem assemble_equality_saddle(const CorrectionProblem& problem);

/// Pseudo-Lagrangian value at a state (all squares carry their multiplier).
double pseudo_lagrangian(const CorrectionProblem& problem, const SolverState& state);

/// Gradient of the pseudo-Lagrangian w.r.t. (u, lambda, eta), stacked.
Vector lagrangian_gradient(const CorrectionProblem& problem, const SolverState& state);

struct Residuals {
    Vector energy;
    Vector eqd;
    double eta = 0.0;
};

/// r^E = -(q u + l + 2 beta u + A^T lambda),
/// r^eqd = b - A u - eta d,
/// r_eta = eta_rhs - d . lambda.
Residuals residuals(const CorrectionProblem& problem, const SolverState& state);

/// Largest a_s . u - b_s over all squares, clipped at zero.
double max_constraint_violation(const CorrectionProblem& problem, const Vector& u);

/// Dense LU solve of an assembled saddle system; throws on a singular matrix.
Vector solve_dense(const SaddleSystem& system);

/// Unpack a saddle solution into a state (inactive multipliers are zero).
SolverState unpack(const CorrectionProblem& problem, const SaddleSystem& system, const Vector& x);

}  // namespace layoutmg
