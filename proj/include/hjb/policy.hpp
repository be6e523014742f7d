#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "hjb/scheme.hpp"

namespace hjb {

/// Relative accuracy demanded of every policy evaluation:
/// ||B v - c||_inf <= linear_rel_tol * max(1, ||c||_inf).
inline constexpr double linear_rel_tol = 1e-12;

/// Which way policy improvement drives the row residual r = c - B v.
/// `minimize` seeks the smallest solution (standard control problems);
/// `maximize` is used for the adversary when two players are present.
enum class direction { minimize, maximize };

struct howard_options {
    int max_iters = 1000;
    /// Sup-norm fallback for the stop test; the primary test is exact
    /// repetition of the value iterate (finite control sets terminate).
    double tol = 1e-13;
    direction dir = direction::minimize;
    /// Optional warm start, aligned with the unknown set: an initial policy
    /// wins over initial values; initial values are used to pick the first
    /// policy by a greedy improvement pass; with neither, every node starts
    /// at control index 0. Spans must outlive the solve call.
    std::span<const int> policy0 = {};
    std::span<const double> v0 = {};
};

struct howard_result {
    std::vector<double> values; ///< per unknown, aligned with the unknown set
    std::vector<int> policy;    ///< per unknown, each in [0, control_count)
    /// Index k of the first repeated value iterate (so a single-control
    /// problem reports 1); evaluations performed is one more than this when
    /// converged. Equals the evaluation count when max_iters is exhausted.
    int iterations = 0;
    bool converged = false;
    /// Sup over unknowns of |best row residual| at the returned values; zero
    /// up to roundoff when converged.
    double residual_inf = 0.0;
    /// Worst relative linear-solve residual observed across evaluations.
    double linear_residual = 0.0;
};

/// Solves the assembled policy system exactly (sparse direct factorization)
/// and verifies the residual against linear_rel_tol. Throws singular_system
/// when the factorization fails or the verification does not hold (both
/// signal a malformed scheme, not a data error). `rel_residual` receives the
/// observed relative residual when non-null.
Eigen::VectorXd policy_evaluate(const assembled_system& sys, double* rel_residual = nullptr);

/// Greedy policy update at one node: the control index driving the row
/// residual r = c - B v furthest in `dir`, ties broken by the smallest
/// index. `v_all` must cover every node the stencil can reach.
/// `best_residual` receives the winning residual when non-null.
int improve_node(const problem_spec& spec, int node, std::span<const double> v_all,
                 direction dir = direction::minimize, double* best_residual = nullptr);

/// Per-node greedy improvement over `unknowns`; `values` is aligned with
/// `unknowns` and `fixed` must cover all outside neighbors.
std::vector<int> policy_improve(const problem_spec& spec, std::span<const int> unknowns,
                                std::span<const double> values, const fixed_values& fixed,
                                direction dir = direction::minimize);

/// Classic policy iteration over `unknowns`: alternately evaluate the
/// current policy exactly and improve it per node, stopping when the value
/// iterate repeats exactly (or moves less than opts.tol in sup norm, or the
/// next policy repeats the current one — all three mark convergence).
/// Hitting max_iters returns the best iterate with converged = false; it
/// does not throw.
howard_result howard_solve(const problem_spec& spec, std::span<const int> unknowns,
                           const fixed_values& fixed, const howard_options& opts = {});

} // namespace hjb
