#include "hjb/problems.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "hjb/errors.hpp"

namespace hjb {

namespace {

constexpr double pi = 3.141592653589793238462643383279502884;

grid box_grid(int dim, double dx, int periodic_axis = -1) {
    std::vector<double> lo(dim, -1.0), hi(dim, 1.0), d(dim, dx);
    bool per[max_dim] = {};
    if (periodic_axis >= 0) per[periodic_axis] = true;
    return grid::build(lo, hi, d, std::span<const bool>(per, dim));
}

int pick_count(const problem_options& opt, int fallback) {
    if (opt.control_count < 0) throw config_error("control_count must be >= 0");
    return opt.control_count == 0 ? fallback : opt.control_count;
}

std::function<double(const point&)> eikonal_oracle(const grid& g) {
    return [g](const point& x) { return analytic_eikonal(x, g); };
}

builtin_problem_result make_eikonal(int dim, double dx, const problem_options& opt) {
    builtin_problem_result out;
    problem_spec& s = out.spec;
    s.g = box_grid(dim, dx);
    if (dim == 1) {
        const int count = pick_count(opt, 2);
        if (count == 2)
            s.controls = {{-1.0}, {1.0}};
        else if (count == 3)
            s.controls = {{-1.0}, {0.0}, {1.0}};
        else
            throw config_error("1d distance problem supports 2 or 3 controls");
    } else if (dim == 2) {
        s.controls = circle_controls(pick_count(opt, 32));
    } else {
        s.controls = sphere_controls(pick_count(opt, 32));
    }
    s.dynamics = [](const point&, const control& a) {
        point f{};
        for (std::size_t i = 0; i < a.size(); ++i) f[i] = a[i];
        return f;
    };
    s.running_cost = [](const point&, const control&) { return 1.0; };
    s.exit_cost = [](const point&) { return 0.0; };
    s.discount = 1.0;
    s.scheme = scheme_kind::upwind;
    out.oracle = eikonal_oracle(s.g);
    return out;
}

builtin_problem_result make_zermelo(double dx, const problem_options& opt) {
    builtin_problem_result out;
    problem_spec& s = out.spec;
    s.g = box_grid(2, dx);
    s.controls = circle_controls(pick_count(opt, 32));
    s.dynamics = [](const point& x, const control& a) {
        return point{a[0] + (1.0 - x[1] * x[1]), a[1], 0.0};
    };
    s.running_cost = [](const point&, const control&) { return 1.0; };
    // Arrival problem: leaving the box instead of reaching the ball is
    // penalized at 10 * max running cost / discount.
    s.exit_cost = [](const point&) { return 10.0; };
    s.discount = 1.0;
    s.scheme = scheme_kind::upwind;

    target_spec t;
    t.contains = [](const point& x) {
        return x[0] * x[0] + x[1] * x[1] <= 0.005 * 0.005;
    };
    t.seed = point{0.0, 0.0, 0.0};
    out.spec = apply_target(s, t);
    out.target = std::move(t);
    return out;
}

builtin_problem_result make_dubins(double dx, const problem_options& opt) {
    if (!(opt.dubins_speed > 0.0) || !std::isfinite(opt.dubins_speed))
        throw config_error("car speed must be positive and finite");
    builtin_problem_result out;
    problem_spec& s = out.spec;
    s.g = box_grid(3, dx, /*periodic_axis=*/2); // heading z in [-1,1), angle = pi*z
    const int count = pick_count(opt, 8);
    if (count < 2) throw config_error("steering needs at least 2 control points");
    for (int i = 0; i < count; ++i)
        s.controls.push_back({-1.0 + 2.0 * i / (count - 1)});
    const double c = opt.dubins_speed;
    s.dynamics = [c](const point& x, const control& a) {
        return point{c * std::cos(pi * x[2]), c * std::sin(pi * x[2]), a[0]};
    };
    s.running_cost = [](const point&, const control&) { return 1.0; };
    s.exit_cost = [](const point&) { return 0.0; }; // free exit through the (x, y) walls
    s.discount = 1e-6;
    s.scheme = scheme_kind::semi_lagrangian;
    return out;
}

builtin_problem_result make_pursuit(double dx, const problem_options& opt) {
    builtin_problem_result out;
    problem_spec& s = out.spec;
    s.g = box_grid(2, dx);
    const int count = pick_count(opt, 8);
    s.controls = circle_controls(count);

    two_player_data game;
    game.adversary_controls = circle_controls(count);
    game.dynamics = [](const point&, const control& a, const control& b) {
        return point{a[0] / 2.0 - b[0], a[1] / 2.0 - b[1], 0.0};
    };
    game.running_cost = [](const point&, const control&, const control&) { return 1.0; };

    // One-player embedding: adversary at rest.
    s.dynamics = [](const point&, const control& a) {
        return point{a[0] / 2.0, a[1] / 2.0, 0.0};
    };
    s.running_cost = [](const point&, const control&) { return 1.0; };
    s.exit_cost = [](const point&) { return 10.0; }; // escape penalty (see make_zermelo)
    s.discount = 1.0;
    s.scheme = scheme_kind::upwind;

    target_spec t;
    t.contains = [](const point& x) {
        return x[0] * x[0] + x[1] * x[1] <= 0.15 * 0.15;
    };
    t.seed = point{0.0, 0.0, 0.0};
    out.spec = apply_target(s, t);
    out.target = std::move(t);
    out.game = std::move(game);
    return out;
}

} // namespace

std::vector<control> circle_controls(int count) {
    if (count < 1) throw config_error("circle controls need count >= 1");
    std::vector<control> a;
    a.reserve(count);
    for (int i = 0; i < count; ++i) {
        const double th = 2.0 * pi * i / count;
        a.push_back({std::cos(th), std::sin(th)});
    }
    return a;
}

std::vector<control> sphere_controls(int count) {
    if (count < 1) throw config_error("sphere controls need count >= 1");
    std::vector<control> a;
    a.reserve(count);
    const double golden = pi * (3.0 - std::sqrt(5.0));
    for (int i = 0; i < count; ++i) {
        const double z = 1.0 - 2.0 * (i + 0.5) / count;
        const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
        const double phi = golden * i;
        a.push_back({r * std::cos(phi), r * std::sin(phi), z});
    }
    return a;
}

builtin_problem_result builtin_problem(const std::string& name, double dx,
                                       const problem_options& opt) {
    if (!(dx > 0.0) || !std::isfinite(dx)) throw config_error("dx must be positive and finite");
    if (name == "eikonal1d") return make_eikonal(1, dx, opt);
    if (name == "eikonal2d") return make_eikonal(2, dx, opt);
    if (name == "eikonal3d") return make_eikonal(3, dx, opt);
    if (name == "zermelo") return make_zermelo(dx, opt);
    if (name == "dubins") return make_dubins(dx, opt);
    if (name == "pursuit_evasion") return make_pursuit(dx, opt);
    throw unknown_problem("unknown problem '" + name +
                          "' (expected eikonal1d, eikonal2d, eikonal3d, zermelo, dubins, "
                          "or pursuit_evasion)");
}

builtin_problem_result builtin_problem(const std::string& name, double dx, int control_count) {
    problem_options opt;
    opt.control_count = control_count;
    return builtin_problem(name, dx, opt);
}

problem_spec apply_target(const problem_spec& spec, const target_spec& target) {
    if (!target.contains) throw config_error("target region has no membership predicate");
    if (target.value != 0.0)
        throw config_error("only zero-valued target regions are representable");
    problem_spec out = spec;
    out.target_mask.assign(spec.g.node_count(), 0);
    int inside = 0;
    for (int node = 0; node < spec.g.node_count(); ++node) {
        if (target.contains(spec.g.coord(node))) {
            out.target_mask[node] = 1;
            ++inside;
        }
    }
    if (inside == 0)
        throw empty_target("target region contains no grid node at this spacing");
    return out;
}

problem_spec apply_obstacle(const problem_spec& spec, const obstacle_spec& obstacle) {
    if (static_cast<int>(obstacle.values.size()) != spec.g.node_count())
        throw config_error("obstacle needs one value per grid node");
    for (double w : obstacle.values)
        if (!std::isfinite(w)) throw config_error("obstacle values must be finite");
    problem_spec out = spec;
    out.obstacle_values = obstacle.values;
    return out;
}

double analytic_eikonal(const point& x, const grid& g) {
    double dist = std::numeric_limits<double>::infinity();
    for (int a = 0; a < g.dim(); ++a) {
        if (g.periodic(a)) continue;
        dist = std::min(dist, std::min(x[a] - g.lo(a), g.hi(a) - x[a]));
    }
    if (!std::isfinite(dist))
        throw config_error("distance-to-boundary needs at least one non-periodic axis");
    return 1.0 - std::exp(-dist);
}

} // namespace hjb
