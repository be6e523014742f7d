#pragma once

// Shared engine for decomposed two-phase solves: concurrent per-subdomain
// solves against a frozen snapshot, a sequential (optionally one level
// recursive) interface solve, and the outer stopping rule. The per-set
// solver is a callable so the one-player and game solvers share the loop.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <exception>
#include <map>
#include <span>
#include <thread>
#include <utility>
#include <vector>

#include "hjb/errors.hpp"
#include "hjb/grid.hpp"
#include "hjb/pha.hpp"

namespace hjb::detail {

using clock_type = std::chrono::steady_clock;

inline double seconds_since(clock_type::time_point t0) {
    return std::chrono::duration<double>(clock_type::now() - t0).count();
}

struct set_result {
    std::vector<double> values;
    int iterations = 0;       ///< outermost iteration count of this set solve
    long long work = 0;       ///< finest-grained iteration total (for reporting)
    double linear_residual = 0.0;
    bool converged = true;
};

/// Cross-solve accumulators.
struct accounting {
    long long inner_iterations = 0;
    double linear_residual = 0.0;
    bool all_converged = true;

    void absorb(const set_result& r) {
        inner_iterations += r.work;
        linear_residual = std::max(linear_residual, r.linear_residual);
        all_converged = all_converged && r.converged;
    }
};

inline double sup_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::fabs(a[i] - b[i]));
    return d;
}

/// Solves every group against a frozen snapshot of v_all and merges the
/// results back (disjoint writes). Returns after all groups finish; the
/// outcome is independent of worker_count. `par_time` receives the longest
/// single group solve (the phase's critical path under one worker per
/// group), `par_iters` the largest iteration count of any single group
/// solve.
template <class SetSolver>
void parallel_phase(const std::vector<std::vector<int>>& groups, std::vector<double>& v_all,
                    int worker_count, SetSolver&& solve, double& par_time, int& par_iters,
                    accounting& acc) {
    const int n = static_cast<int>(groups.size());
    par_time = 0.0;
    par_iters = 0;
    if (n == 0) return;
    const int workers = std::clamp(worker_count, 1, n);
    const std::vector<double> frozen = v_all;
    std::vector<set_result> results(n);
    std::vector<double> times(n, 0.0);

    auto run_share = [&](int w) {
        for (int i = w; i < n; i += workers) {
            const auto t0 = clock_type::now();
            results[i] = solve(groups[i], frozen);
            times[i] = seconds_since(t0);
        }
    };
    if (workers == 1) {
        run_share(0);
    } else {
        std::vector<std::exception_ptr> errors(workers);
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (int w = 0; w < workers; ++w)
            pool.emplace_back([&, w] {
                try {
                    run_share(w);
                } catch (...) {
                    errors[w] = std::current_exception();
                }
            });
        for (auto& t : pool) t.join();
        for (auto& e : errors)
            if (e) std::rethrow_exception(e);
    }

    for (int i = 0; i < n; ++i) par_time = std::max(par_time, times[i]);
    for (int i = 0; i < n; ++i) {
        const auto& g = groups[i];
        for (std::size_t j = 0; j < g.size(); ++j) v_all[g[j]] = results[i].values[j];
        par_iters = std::max(par_iters, results[i].iterations);
        acc.absorb(results[i]);
    }
}

/// Splits the interface set one level further: nodes lying on a single
/// separator plane are grouped per plane (independent given frozen
/// crossings), nodes on two or more planes form the sequential crossing
/// set. A position along an axis counts as a separator when every
/// non-Dirichlet node there is an interface node.
inline void split_interface(const grid& g, const decomposition& dec,
                            std::vector<std::vector<int>>& planes, std::vector<int>& crossings) {
    std::array<std::vector<char>, max_dim> all_iface;
    std::array<std::vector<char>, max_dim> any_node;
    for (int a = 0; a < g.dim(); ++a) {
        all_iface[a].assign(g.count(a), 1);
        any_node[a].assign(g.count(a), 0);
    }
    for (int node = 0; node < g.node_count(); ++node) {
        if (g.is_dirichlet(node)) continue;
        const auto m = g.multi_index(node);
        for (int a = 0; a < g.dim(); ++a) {
            any_node[a][m[a]] = 1;
            if (dec.owner[node] != decomposition::owner_interface) all_iface[a][m[a]] = 0;
        }
    }
    std::map<std::pair<int, int>, std::vector<int>> by_plane;
    for (int node : dec.interface_nodes) {
        const auto m = g.multi_index(node);
        int sep_axis = -1, sep_count = 0;
        for (int a = 0; a < g.dim(); ++a) {
            if (any_node[a][m[a]] && all_iface[a][m[a]]) {
                ++sep_count;
                sep_axis = a;
            }
        }
        if (sep_count >= 2)
            crossings.push_back(node);
        else
            by_plane[{sep_axis, m[sep_axis]}].push_back(node);
    }
    for (auto& [key, nodes] : by_plane) planes.push_back(std::move(nodes));
}

inline void validate_outer_config(const pha_config& cfg, int node_count) {
    if (cfg.epsilon < 0) throw config_error("outer tolerance must be >= 0");
    if (cfg.worker_count < 1) throw config_error("worker_count must be >= 1");
    if (cfg.max_outer < 1) throw config_error("max_outer must be >= 1");
    if (cfg.max_inner < 1) throw config_error("max_inner must be >= 1");
    if (!cfg.v0.empty() && static_cast<int>(cfg.v0.size()) != node_count)
        throw config_error("initial value override must cover the whole grid");
}

/// The outer loop shared by the one-player and game solvers: v_all enters
/// initialized (boundary data + chosen start) and leaves at the final
/// iterate; report.outer / outer_iterations / converged are filled here.
template <class SetSolver>
void run_outer(const grid& g, const decomposition& dec, const pha_config& cfg,
               std::vector<double>& v_all, accounting& acc, solve_report& report,
               SetSolver&& solve_set) {
    std::vector<std::vector<int>> planes;
    std::vector<int> crossings;
    if (cfg.interface_recursive && !dec.interface_nodes.empty())
        split_interface(g, dec, planes, crossings);

    // Sequential phase: one solve on the whole interface, or one nested
    // parallel/sequential level over separator planes and crossings.
    auto sequential_phase = [&](std::vector<double>& v) -> int {
        if (!cfg.interface_recursive) {
            const auto r = solve_set(std::span<const int>(dec.interface_nodes), v);
            for (std::size_t j = 0; j < dec.interface_nodes.size(); ++j)
                v[dec.interface_nodes[j]] = r.values[j];
            acc.absorb(r);
            return r.iterations;
        }
        int iters = 0;
        for (int pass = 0; pass < cfg.max_outer; ++pass) {
            const std::vector<double> start = v;
            double t_dummy = 0.0;
            int it_dummy = 0;
            parallel_phase(planes, v, cfg.worker_count, solve_set, t_dummy, it_dummy, acc);
            iters += it_dummy;
            if (!crossings.empty()) {
                const auto r = solve_set(std::span<const int>(crossings), v);
                for (std::size_t j = 0; j < crossings.size(); ++j) v[crossings[j]] = r.values[j];
                acc.absorb(r);
                iters += r.iterations;
            }
            const double delta = sup_diff(v, start);
            if (cfg.epsilon > 0 ? delta <= cfg.epsilon : delta == 0.0) return iters;
        }
        acc.all_converged = false;
        return iters;
    };

    for (int s = 1; s <= cfg.max_outer; ++s) {
        const std::vector<double> v_start = v_all;
        outer_stats st;
        parallel_phase(dec.subdomains, v_all, cfg.worker_count, solve_set, st.par_time_s,
                       st.par_iters_max, acc);
        if (cfg.observer) cfg.observer(s, 0, v_all);

        if (!dec.interface_nodes.empty()) {
            const auto t0 = clock_type::now();
            st.seq_iters = sequential_phase(v_all);
            st.seq_time_s = seconds_since(t0);
            if (cfg.observer) cfg.observer(s, 1, v_all);
        }

        st.delta = sup_diff(v_all, v_start);
        report.outer.push_back(st);
        report.outer_iterations = s;

        if (dec.interface_nodes.empty()) {
            // A single exact solve is already the fixed point.
            report.converged = true;
            break;
        }
        if (cfg.epsilon > 0 ? st.delta <= cfg.epsilon : st.delta == 0.0) {
            report.converged = true;
            break;
        }
    }
    report.converged = report.converged && acc.all_converged;
}

} // namespace hjb::detail
