#include "hjb/maxmin.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <utility>

#include "hjb/errors.hpp"
#include "outer_loop.hpp"

namespace hjb {

namespace {

/// One frozen-adversary spec per adversary control, for per-node
/// improvement scans.
std::vector<problem_spec> specs_per_adversary(const game_spec& gs) {
    std::vector<problem_spec> out;
    out.reserve(gs.adversary_count());
    for (int b = 0; b < gs.adversary_count(); ++b) out.push_back(gs.frozen_uniform(b));
    return out;
}

int improve_with(const std::vector<problem_spec>& per_b, int node,
                 std::span<const double> v_all, double* best_out) {
    int best_b = 0;
    double best = 0.0;
    for (int b = 0; b < static_cast<int>(per_b.size()); ++b) {
        double inner_min = 0.0;
        improve_node(per_b[b], node, v_all, direction::minimize, &inner_min);
        if (b == 0 || inner_min > best) {
            best = inner_min;
            best_b = b;
        }
    }
    if (best_out) *best_out = best;
    return best_b;
}

void check_beta_range(std::span<const int> beta, int count) {
    for (int b : beta)
        if (b < 0 || b >= count) throw config_error("adversary control index out of range");
}

} // namespace

void game_spec::validate() const {
    if (!base.g.node_count()) throw config_error("game needs a grid");
    if (base.controls.empty()) throw config_error("controller control set must not be empty");
    if (adversary_controls.empty()) throw config_error("adversary control set must not be empty");
    if (!dynamics) throw config_error("two-player dynamics required");
    if (!running_cost) throw config_error("two-player running cost required");
    // Everything else (discount, masks, exit cost, scheme limits, finiteness
    // over every node and controller action) holds iff it holds with the
    // adversary pinned to each of its controls in turn.
    for (int b = 0; b < adversary_count(); ++b) frozen_uniform(b).validate();
}

problem_spec game_spec::frozen(std::vector<int> beta) const {
    if (static_cast<int>(beta.size()) != base.g.node_count())
        throw config_error("adversary policy must assign a control to every grid node");
    check_beta_range(beta, adversary_count());
    problem_spec out = base;
    auto idx = std::make_shared<const std::vector<int>>(std::move(beta));
    out.node_eval = [dyn = dynamics, cost = running_cost, bs = adversary_controls,
                     as = base.controls, idx](int node, const point& x, int k, point& f,
                                              double& l) {
        const control& a = as[k];
        const control& b = bs[(*idx)[node]];
        f = dyn(x, a, b);
        l = cost(x, a, b);
    };
    return out;
}

problem_spec game_spec::frozen_uniform(int b) const {
    if (b < 0 || b >= adversary_count())
        throw config_error("adversary control index out of range");
    return frozen(std::vector<int>(base.g.node_count(), b));
}

game_spec game_spec::swapped_roles() const {
    if (!base.obstacle_values.empty())
        throw config_error("role swap cannot mirror stop values");
    game_spec out;
    out.base = base;
    out.base.controls = adversary_controls;
    out.adversary_controls = base.controls;
    out.base.dynamics = nullptr; // the original one-player embedding no longer applies
    out.base.running_cost = nullptr;
    out.dynamics = [dyn = dynamics](const point& x, const control& a, const control& b) {
        return dyn(x, b, a);
    };
    out.running_cost = [cost = running_cost](const point& x, const control& a,
                                             const control& b) { return -cost(x, b, a); };
    if (base.exit_cost)
        out.base.exit_cost = [g0 = base.exit_cost](const point& x) { return -g0(x); };
    return out;
}

game_spec make_game(const builtin_problem_result& entry) {
    if (!entry.game.has_value())
        throw config_error("catalog entry has no two-player data");
    game_spec gs;
    gs.base = entry.spec;
    gs.adversary_controls = entry.game->adversary_controls;
    gs.dynamics = entry.game->dynamics;
    gs.running_cost = entry.game->running_cost;
    return gs;
}

howard_result f_beta_solve(const game_spec& gs, std::span<const int> unknowns,
                           std::span<const int> beta, const fixed_values& fixed,
                           const howard_options& opts) {
    if (beta.size() != unknowns.size())
        throw config_error("adversary policy must match the unknown set");
    check_beta_range(beta, gs.adversary_count());
    std::vector<int> full(gs.base.g.node_count(), 0);
    for (std::size_t i = 0; i < unknowns.size(); ++i) full[unknowns[i]] = beta[i];
    return howard_solve(gs.frozen(std::move(full)), unknowns, fixed, opts);
}

int improve_adversary(const game_spec& gs, int node, std::span<const double> v_all,
                      double* best) {
    return improve_with(specs_per_adversary(gs), node, v_all, best);
}

maxmin_result maxmin_howard(const game_spec& gs, std::span<const int> unknowns,
                            const fixed_values& fixed, const maxmin_options& opts) {
    if (opts.max_beta_iters < 1) throw config_error("max_beta_iters must be >= 1");
    if (opts.max_alpha_iters < 1) throw config_error("max_alpha_iters must be >= 1");
    const int m = static_cast<int>(unknowns.size());
    maxmin_result out;
    if (m == 0) {
        out.converged = true;
        return out;
    }
    if (!opts.v0.empty() && static_cast<int>(opts.v0.size()) != m)
        throw config_error("v0 must have one entry per unknown");

    const auto per_b = specs_per_adversary(gs);
    const int n_nodes = gs.base.g.node_count();
    std::vector<double> v_all(n_nodes, 0.0);
    for (int node = 0; node < n_nodes; ++node)
        if (fixed.has(node)) v_all[node] = fixed[node];

    std::vector<int> beta;
    if (!opts.beta0.empty()) {
        if (static_cast<int>(opts.beta0.size()) != m)
            throw config_error("beta0 must have one entry per unknown");
        check_beta_range(opts.beta0, gs.adversary_count());
        beta.assign(opts.beta0.begin(), opts.beta0.end());
    } else {
        if (!opts.v0.empty())
            for (int i = 0; i < m; ++i) v_all[unknowns[i]] = opts.v0[i];
        beta.resize(m);
        for (int i = 0; i < m; ++i) beta[i] = improve_with(per_b, unknowns[i], v_all, nullptr);
    }

    std::vector<int> full_beta(n_nodes, 0);
    auto expand = [&] {
        for (int i = 0; i < m; ++i) full_beta[unknowns[i]] = beta[i];
        return full_beta;
    };

    bool inner_ok = true;
    std::vector<double> v_prev;
    howard_result inner;
    for (int t = 1; t <= opts.max_beta_iters; ++t) {
        howard_options io;
        io.max_iters = opts.max_alpha_iters;
        std::vector<double> warm(m);
        for (int i = 0; i < m; ++i) warm[i] = v_all[unknowns[i]];
        io.v0 = warm;
        inner = howard_solve(gs.frozen(expand()), unknowns, fixed, io);
        out.alpha_iterations += inner.iterations;
        out.linear_residual = std::max(out.linear_residual, inner.linear_residual);
        inner_ok = inner_ok && inner.converged;
        out.beta_iterations = t;

        for (int i = 0; i < m; ++i) v_all[unknowns[i]] = inner.values[i];
        if (!v_prev.empty()) {
            double diff = 0.0;
            for (int i = 0; i < m; ++i)
                diff = std::max(diff, std::fabs(inner.values[i] - v_prev[i]));
            if (inner.values == v_prev || diff <= opts.tol) {
                out.beta_iterations = t - 1;
                out.converged = true;
                break;
            }
        }
        v_prev = inner.values;

        bool changed = false;
        for (int i = 0; i < m; ++i) {
            const int nb = improve_with(per_b, unknowns[i], v_all, nullptr);
            if (nb != beta[i]) {
                beta[i] = nb;
                changed = true;
            }
        }
        if (!changed) {
            // A repeated adversary policy reproduces the same inner solve,
            // so the next iterate would repeat bitwise.
            out.converged = true;
            break;
        }
    }

    out.converged = out.converged && inner_ok;
    out.values = std::move(inner.values);
    out.alpha = std::move(inner.policy);
    out.beta = std::move(beta);

    double worst = 0.0;
    for (int i = 0; i < m; ++i) {
        double r = 0.0;
        improve_with(per_b, unknowns[i], v_all, &r);
        worst = std::max(worst, std::fabs(r));
    }
    out.residual_inf = worst;
    return out;
}

solve_report maxmin_solve(const game_spec& gs, const decomposition& dec,
                          const pha_config& cfg) {
    const grid& g = gs.base.g;
    detail::validate_outer_config(cfg, g.node_count());
    if (cfg.init == init_mode::coarse)
        throw config_error("coarse initialization is not available for games");

    const auto t_start = detail::clock_type::now();
    const int n_nodes = g.node_count();

    solve_report report;
    std::vector<double> v_all(n_nodes, 0.0);
    for (int node = 0; node < n_nodes; ++node)
        if (g.is_dirichlet(node)) v_all[node] = gs.base.exit_cost(g.coord(node));
    if (!cfg.v0.empty()) {
        for (int node = 0; node < n_nodes; ++node)
            if (!g.is_dirichlet(node)) v_all[node] = cfg.v0[node];
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
        maxmin_options mo;
        mo.max_beta_iters = cfg.max_inner;
        mo.max_alpha_iters = cfg.max_inner;
        mo.v0 = v0;
        auto r = maxmin_howard(gs, unknowns, fixed, mo);
        return {std::move(r.values), r.beta_iterations, r.alpha_iterations, r.linear_residual,
                r.converged};
    };

    detail::run_outer(g, dec, cfg, v_all, acc, report, solve_set);

    report.values = std::move(v_all);
    report.linear_residual = acc.linear_residual;
    report.inner_iterations = acc.inner_iterations;

    const auto per_b = specs_per_adversary(gs);
    double worst = 0.0;
    for (int node : g.interior_nodes()) {
        double r = 0.0;
        improve_with(per_b, node, report.values, &r);
        worst = std::max(worst, std::fabs(r));
    }
    report.residual_inf = worst;
    report.total_time_s = detail::seconds_since(t_start);
    return report;
}

} // namespace hjb
