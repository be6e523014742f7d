#pragma once

#include <functional>
#include <span>
#include <vector>

#include "hjb/pha.hpp"
#include "hjb/policy.hpp"
#include "hjb/problems.hpp"
#include "hjb/scheme.hpp"

namespace hjb {

/// Two-player zero-sum problem on a grid: the controller (base.controls)
/// minimizes, the adversary (adversary_controls) maximizes, and the solved
/// fixed point satisfies  max_b min_a r_i(a, b) = 0  per node with the usual
/// row residual r = c - B V.
///
/// `base` supplies the grid, scheme, discount, exit cost, target mask and
/// stop values; its one-player dynamics/cost (if any) are ignored by the
/// game solvers, which always evaluate the two-player `dynamics` and
/// `running_cost` below. Both must be pure and thread-safe.
struct game_spec {
    problem_spec base;
    std::vector<control> adversary_controls;
    std::function<point(const point&, const control&, const control&)> dynamics;
    std::function<double(const point&, const control&, const control&)> running_cost;

    int adversary_count() const { return static_cast<int>(adversary_controls.size()); }

    /// Structural checks plus finiteness sampling of f and l over all nodes
    /// and control pairs. Throws config_error on violation.
    void validate() const;

    /// One-player spec with the adversary pinned per node: at node i it
    /// plays adversary_controls[beta[i]]. beta is grid-sized (entries for
    /// nodes outside the solve set are simply unused).
    problem_spec frozen(std::vector<int> beta) const;

    /// Adversary pinned to the same control index everywhere.
    problem_spec frozen_uniform(int b) const;

    /// The game seen from the other side: player sets interchange and costs
    /// negate, so (when the per-node min/max order can be exchanged — exact
    /// whenever either control set is a singleton) the swapped value is the
    /// negative of the original. Rejects specs with stop values, whose cap
    /// direction cannot be mirrored.
    game_spec swapped_roles() const;
};

/// Builds the game for a catalog entry carrying two-player data.
/// Throws config_error when the entry has none.
game_spec make_game(const builtin_problem_result& entry);

/// Classic Howard solve over the controller's set with the adversary policy
/// frozen at beta (one entry per unknown, indices into adversary_controls).
/// The result satisfies min_a r = 0 on the set to solver accuracy.
howard_result f_beta_solve(const game_spec& gs, std::span<const int> unknowns,
                           std::span<const int> beta, const fixed_values& fixed,
                           const howard_options& opts = {});

/// Adversary improvement at one node: the index into adversary_controls
/// maximizing the controller-minimized residual min_a r(a, b) at the current
/// values (ties resolve to the smallest index). `best` receives that
/// max-min residual.
int improve_adversary(const game_spec& gs, int node, std::span<const double> v_all,
                      double* best = nullptr);

struct maxmin_options {
    int max_beta_iters = 1000; ///< adversary-improvement sweeps
    int max_alpha_iters = 1000;
    double tol = 1e-13; ///< sup-norm fallback for the value-repetition stop

    /// Initial adversary policy, one entry per unknown. When empty, a start
    /// field (v0 if given, else all zeros) picks it by improvement.
    std::span<const int> beta0;
    std::span<const double> v0; ///< per-unknown start values
};

struct maxmin_result {
    std::vector<double> values; ///< per unknown
    std::vector<int> alpha;     ///< final controller policy per unknown
    std::vector<int> beta;      ///< final adversary policy per unknown
    /// Adversary sweeps to the first repeated value iterate (a frozen
    /// adversary converges in exactly 1).
    int beta_iterations = 0;
    long long alpha_iterations = 0; ///< controller iterations summed over all inner solves
    bool converged = false;
    double residual_inf = 0.0; ///< sup over unknowns of |max_b min_a r|
    double linear_residual = 0.0;
};

/// Two-level policy iteration for the max-min fixed point on one node set:
/// alternates exact frozen-adversary solves (inner Howard over the
/// controller) with per-node adversary improvement. Stops on repeated
/// values or a repeated adversary policy; finite control sets terminate.
maxmin_result maxmin_howard(const game_spec& gs, std::span<const int> unknowns,
                            const fixed_values& fixed, const maxmin_options& opts = {});

/// Decomposed game solve: the two-phase outer loop of pha_solve with every
/// set solved by maxmin_howard. cfg.max_inner caps the adversary sweeps per
/// set solve; init_mode::coarse is not available for games. The report's
/// residual_inf is the sup of |max_b min_a r|; inner_iterations counts
/// controller iterations across all set solves.
solve_report maxmin_solve(const game_spec& gs, const decomposition& dec,
                          const pha_config& cfg = {});

} // namespace hjb
