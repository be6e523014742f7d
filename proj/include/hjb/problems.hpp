#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "hjb/scheme.hpp"

namespace hjb {

/// Region of the state space where the value is pinned to `value` (the
/// arrival condition of an exit/arrival problem). `seed` is a representative
/// point inside the region, kept so coarse resamplings can re-anchor the
/// region even when it falls between coarse nodes.
struct target_spec {
    std::function<bool(const point&)> contains;
    point seed{};
    double value = 0.0;
};

/// Per-node stop values W: the controller may halt at any node and accept
/// W_i, capping the solution at V = min(running value, W).
struct obstacle_spec {
    std::vector<double> values;
};

/// Second-player extension of a catalog entry: an adversary control set and
/// dynamics/cost over (state, controller action, adversary action). The
/// embedded one-player spec freezes the adversary at rest.
struct two_player_data {
    std::vector<control> adversary_controls;
    std::function<point(const point&, const control&, const control&)> dynamics;
    std::function<double(const point&, const control&, const control&)> running_cost;
};

/// Catalog entry: a ready-to-solve spec (arrival regions already applied),
/// plus the pieces a caller may want to re-derive it — the arrival region,
/// game data for two-player entries, and an exact solution when one exists.
struct builtin_problem_result {
    problem_spec spec;
    std::optional<target_spec> target;
    std::optional<two_player_data> game;
    std::function<double(const point&)> oracle;
};

/// Extra knobs; control_count = 0 keeps the per-problem default
/// (2 / 32 / 32 / 32 / 8 / 8 in catalog order).
struct problem_options {
    int control_count = 0;
    double dubins_speed = 1.0;
};

/// Catalog of benchmark problems on [-1,1]^d:
///   eikonal1d/2d/3d  distance-to-boundary (value 1 - e^{-dist}), exact
///                    solution attached;
///   zermelo          navigation against a transverse current toward a small
///                    ball at the origin;
///   dubins           minimum-time exit of a constant-speed car with bounded
///                    turning rate (heading axis periodic, semi-Lagrangian);
///   pursuit_evasion  relative-coordinates capture game, slow pursuer vs.
///                    full-speed evader (two_player_data attached).
/// Throws unknown_problem for other names; grid construction rejects
/// non-conforming dx.
builtin_problem_result builtin_problem(const std::string& name, double dx,
                                       const problem_options& opt);
builtin_problem_result builtin_problem(const std::string& name, double dx,
                                       int control_count = 0);

/// Marks every grid node inside the region; rows there become V = 0 for all
/// controls. Throws empty_target when no node falls inside at this spacing,
/// config_error for a nonzero pinned value (not representable).
problem_spec apply_target(const problem_spec& spec, const target_spec& target);

/// Attaches per-node stop values (control set doubles; upper half = stop).
problem_spec apply_obstacle(const problem_spec& spec, const obstacle_spec& obstacle);

/// 1 - exp(-dist(x, boundary)) for the box of `g` (non-periodic axes); the
/// exact solution of v + |Dv| = 1 with v = 0 on the boundary.
double analytic_eikonal(const point& x, const grid& g);

/// count unit vectors at angles 2*pi*i/count (closed under the square's
/// symmetries when count is a multiple of 4).
std::vector<control> circle_controls(int count);

/// count approximately equidistributed unit vectors (spiral lattice);
/// deterministic in count.
std::vector<control> sphere_controls(int count);

} // namespace hjb
