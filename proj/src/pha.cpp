#include "hjb/pha.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "hjb/errors.hpp"
#include "outer_loop.hpp"

namespace hjb {

using detail::clock_type;
using detail::seconds_since;

std::vector<double> coarse_init(const problem_spec& spec, int points_per_axis) {
    if (points_per_axis < 2) throw config_error("coarse initialization needs >= 2 points per axis");
    if (spec.node_eval)
        throw config_error("coarse initialization needs coordinate-based dynamics, "
                           "not a node-indexed evaluation hook");
    const grid& fg = spec.g;
    const int d = fg.dim();
    std::array<double, max_dim> lo{}, hi{}, dxc{};
    std::array<bool, max_dim> per{};
    for (int a = 0; a < d; ++a) {
        lo[a] = fg.lo(a);
        hi[a] = fg.hi(a);
        per[a] = fg.periodic(a);
        const int cells = per[a] ? std::max(points_per_axis, 3) : points_per_axis - 1;
        dxc[a] = (hi[a] - lo[a]) / cells;
    }
    const grid cg = grid::build({lo.data(), static_cast<std::size_t>(d)},
                                {hi.data(), static_cast<std::size_t>(d)},
                                {dxc.data(), static_cast<std::size_t>(d)},
                                {per.data(), static_cast<std::size_t>(d)});

    problem_spec cs = spec;
    cs.g = cg;
    // Carry node-sampled data over: every marked fine node claims its
    // nearest coarse node, so small targets survive coarsening.
    auto nearest_coarse = [&](int fine_node) {
        const point x = fg.coord(fine_node);
        std::array<int, max_dim> multi{};
        for (int a = 0; a < d; ++a) {
            long idx = std::lround((x[a] - lo[a]) / cg.spacing(a));
            if (per[a])
                idx = ((idx % cg.count(a)) + cg.count(a)) % cg.count(a);
            else
                idx = std::clamp<long>(idx, 0, cg.count(a) - 1);
            multi[a] = static_cast<int>(idx);
        }
        return cg.flat_index({multi.data(), static_cast<std::size_t>(d)});
    };
    if (!spec.target_mask.empty()) {
        cs.target_mask.assign(cg.node_count(), 0);
        for (int node = 0; node < fg.node_count(); ++node)
            if (spec.target_mask[node]) cs.target_mask[nearest_coarse(node)] = 1;
    }
    if (!spec.obstacle_values.empty()) {
        cs.obstacle_values.assign(cg.node_count(), 0.0);
        std::vector<char> seen(cg.node_count(), 0);
        std::vector<double> best_dist(cg.node_count(), 0.0);
        for (int node = 0; node < fg.node_count(); ++node) {
            const int c = nearest_coarse(node);
            const point xf = fg.coord(node);
            const point xc = cg.coord(c);
            double dist = 0.0;
            for (int a = 0; a < d; ++a) dist += (xf[a] - xc[a]) * (xf[a] - xc[a]);
            if (!seen[c] || dist < best_dist[c]) {
                seen[c] = 1;
                best_dist[c] = dist;
                cs.obstacle_values[c] = spec.obstacle_values[node];
            }
        }
    }

    fixed_values fixed(cg.node_count());
    if (spec.exit_cost)
        for (int node = 0; node < cg.node_count(); ++node)
            if (cg.is_dirichlet(node)) fixed.set(node, spec.exit_cost(cg.coord(node)));
    const auto sol = howard_solve(cs, cg.interior_nodes(), fixed);

    std::vector<double> coarse_v(cg.node_count(), 0.0);
    for (int node = 0; node < cg.node_count(); ++node)
        if (fixed.has(node)) coarse_v[node] = fixed[node];
    const auto& cint = cg.interior_nodes();
    for (std::size_t i = 0; i < cint.size(); ++i) coarse_v[cint[i]] = sol.values[i];

    std::vector<double> fine_v(fg.node_count(), 0.0);
    for (int node = 0; node < fg.node_count(); ++node) {
        if (fg.is_dirichlet(node)) {
            fine_v[node] = spec.exit_cost(fg.coord(node));
            continue;
        }
        double v = 0.0;
        for (const auto& [cnode, w] : interp_weights(cg, fg.coord(node)))
            v += w * coarse_v[cnode];
        fine_v[node] = v;
    }
    return fine_v;
}

solve_report pha_solve(const problem_spec& spec, const decomposition& dec,
                       const pha_config& cfg) {
    detail::validate_outer_config(cfg, spec.g.node_count());

    const auto t_start = clock_type::now();
    const grid& g = spec.g;
    const int n_nodes = g.node_count();

    solve_report report;
    std::vector<double> v_all(n_nodes, 0.0);
    for (int node = 0; node < n_nodes; ++node)
        if (g.is_dirichlet(node)) v_all[node] = spec.exit_cost(g.coord(node));
    if (!cfg.v0.empty()) {
        for (int node = 0; node < n_nodes; ++node)
            if (!g.is_dirichlet(node)) v_all[node] = cfg.v0[node];
    } else if (cfg.init == init_mode::coarse) {
        const auto t0 = clock_type::now();
        const auto seed = coarse_init(spec, cfg.coarse_points);
        for (int node = 0; node < n_nodes; ++node)
            if (!g.is_dirichlet(node)) v_all[node] = seed[node];
        report.init_time_s = seconds_since(t0);
    }

    detail::accounting acc;
    auto solve_set = [&](std::span<const int> unknowns,
                         const std::vector<double>& frozen) -> detail::set_result {
        std::vector<char> is_unknown(n_nodes, 0);
        for (int u : unknowns) is_unknown[u] = 1;
        fixed_values fixed(n_nodes);
        for (int node = 0; node < n_nodes; ++node)
            if (!is_unknown[node]) fixed.set(node, frozen[node]);
        std::vector<double> v0(unknowns.size());
        for (std::size_t i = 0; i < unknowns.size(); ++i) v0[i] = frozen[unknowns[i]];
        howard_options opts;
        opts.max_iters = cfg.max_inner;
        opts.v0 = v0;
        auto r = howard_solve(spec, unknowns, fixed, opts);
        return {std::move(r.values), r.iterations, r.iterations, r.linear_residual, r.converged};
    };

    detail::run_outer(g, dec, cfg, v_all, acc, report, solve_set);

    report.values = std::move(v_all);
    report.linear_residual = acc.linear_residual;
    report.inner_iterations = acc.inner_iterations;

    double worst = 0.0;
    for (int node : g.interior_nodes()) {
        double r = 0.0;
        improve_node(spec, node, report.values, direction::minimize, &r);
        worst = std::max(worst, std::fabs(r));
    }
    report.residual_inf = worst;
    report.total_time_s = seconds_since(t_start);
    return report;
}

trajectory_report monotone_trajectory_check(const problem_spec& spec, const decomposition& dec,
                                            std::span<const double> v_star, bool from_above) {
    const grid& g = spec.g;
    const int n = g.node_count();
    std::vector<double> v0(n, 0.0);
    for (int node = 0; node < n; ++node) {
        if (g.is_dirichlet(node))
            v0[node] = spec.exit_cost(g.coord(node));
        else if (from_above)
            v0[node] = v_star[node] + 1.0;
    }

    trajectory_report rep;
    std::vector<double> prev = v0;
    pha_config cfg;
    cfg.v0 = v0;
    cfg.observer = [&](int, int, const std::vector<double>& v) {
        for (int i = 0; i < n; ++i) {
            const double step = v[i] - prev[i];
            const double wrong = from_above ? step : -step;
            rep.worst_violation = std::max(rep.worst_violation, wrong);
            const double excess = from_above ? v_star[i] - v[i] : v[i] - v_star[i];
            rep.worst_bound_excess = std::max(rep.worst_bound_excess, excess);
        }
        prev = v;
        ++rep.half_steps;
    };
    pha_solve(spec, dec, cfg);
    rep.monotone = rep.worst_violation <= 1e-12;
    rep.bounded = rep.worst_bound_excess <= 1e-10;
    return rep;
}

} // namespace hjb
