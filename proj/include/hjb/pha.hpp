#pragma once

#include <functional>
#include <span>
#include <vector>

#include "hjb/grid.hpp"
#include "hjb/policy.hpp"
#include "hjb/scheme.hpp"

namespace hjb {

enum class init_mode { zero, coarse };

struct pha_config {
    /// Outer-loop sup-norm tolerance. Zero selects exact-repetition
    /// stopping (the outer loop ends when an iterate repeats bitwise, which
    /// finite control sets guarantee).
    double epsilon = 1e-10;
    int max_outer = 1000;
    /// Worker threads for the parallel step; subdomains are assigned
    /// round-robin. The result never depends on this (disjoint writes
    /// against a frozen snapshot), only the wall time does.
    int worker_count = 1;
    init_mode init = init_mode::zero;
    int coarse_points = 4; ///< per-axis node count used by init_mode::coarse
    int max_inner = 1000;  ///< iteration cap per inner Howard solve
    /// Solve the interface set by one nested parallel/sequential level
    /// (separator planes in parallel, plane crossings sequentially) instead
    /// of a single direct solve. Only meaningful for 2+ dimensional grids.
    bool interface_recursive = false;
    /// Overrides the initial values on non-Dirichlet nodes when non-empty
    /// (size = node_count). Wins over `init`.
    std::span<const double> v0 = {};
    /// Observation hook: called after every half step (0 = parallel merge,
    /// 1 = sequential) with the full current value field.
    std::function<void(int outer, int half, const std::vector<double>& v_all)> observer;
};

/// Per-outer-iteration phase breakdown. Parallel-phase time is the longest
/// single subdomain solve of the iteration — the critical path the phase
/// would cost with one worker per subdomain — so the number reflects the
/// fully parallel schedule regardless of how many workers actually ran.
struct outer_stats {
    double par_time_s = 0.0;
    int par_iters_max = 0; ///< max Howard iterations over subdomains
    double seq_time_s = 0.0;
    int seq_iters = 0; ///< Howard iterations of the interface solve
    double delta = 0.0; ///< sup-norm move of the full outer iterate
};

struct solve_report {
    std::vector<double> values; ///< per node; Dirichlet nodes carry the exit cost
    int outer_iterations = 0;
    bool converged = false;
    std::vector<outer_stats> outer; ///< one entry per outer iteration
    double total_time_s = 0.0;
    double init_time_s = 0.0;
    /// Sup over non-Dirichlet nodes of |best row residual| at the returned
    /// values — the global optimality defect, not just the per-block one.
    double residual_inf = 0.0;
    double linear_residual = 0.0;  ///< worst relative linear-solve residual
    long long inner_iterations = 0; ///< Howard iterations summed over all solves
};

/// Two-step domain-decomposition policy iteration: concurrent Howard solves
/// on the subdomains against frozen interface values, then one Howard solve
/// on the interface against the fresh subdomain values, iterated until the
/// full iterate moves at most cfg.epsilon in sup norm. An empty interface
/// (single subdomain) converges in exactly one outer iteration. Exhausting
/// max_outer reports converged = false with the best iterate; solver errors
/// from the inner solves propagate.
solve_report pha_solve(const problem_spec& spec, const decomposition& dec,
                       const pha_config& cfg = {});

/// Initial guess from a classic solve on a coarse grid (points_per_axis
/// nodes per non-periodic axis) interpolated onto spec's grid. Target and
/// stop-value data are carried over by snapping each marked fine node to
/// its nearest coarse node. Returns one value per fine node (Dirichlet
/// nodes carry the exit cost).
std::vector<double> coarse_init(const problem_spec& spec, int points_per_axis = 4);

struct trajectory_report {
    bool monotone = false;
    bool bounded = false;
    double worst_violation = 0.0;    ///< largest wrong-direction step observed
    double worst_bound_excess = 0.0; ///< largest excursion past v_star
    int half_steps = 0;
};

/// Reruns PHA from a componentwise one-sided start — zero when from_above
/// is false (valid for nonnegative-cost problems), v_star + 1 otherwise —
/// recording every half step. Checks that iterates move monotonically
/// toward v_star (non-decreasing from below, non-increasing from above)
/// and never overshoot it by more than 1e-10.
trajectory_report monotone_trajectory_check(const problem_spec& spec, const decomposition& dec,
                                            std::span<const double> v_star,
                                            bool from_above = false);

} // namespace hjb
