// Acceptance gate: one pass/fail line per criterion, tolerances pinned in
// the code below. Exit status 0 only when every criterion passes.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hjb/bench.hpp"
#include "hjb/errors.hpp"
#include "hjb/grid.hpp"
#include "hjb/maxmin.hpp"
#include "hjb/pha.hpp"
#include "hjb/policy.hpp"
#include "hjb/problems.hpp"
#include "hjb/scheme.hpp"

namespace {

using hjb::builtin_problem;
using hjb::builtin_problem_result;
using hjb::decompose;
using hjb::decomposition;
using hjb::fixed_values;
using hjb::grid;
using hjb::pha_config;
using hjb::pha_solve;
using hjb::problem_spec;
using hjb::solve_report;

struct check_failure {
    std::string message;
};

void expect(bool ok, const std::string& message) {
    if (!ok) throw check_failure{message};
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

/// Classic policy iteration embedded into a full grid field.
struct classic_solution {
    hjb::howard_result result;
    std::vector<double> values; ///< per node
};

classic_solution classic_solve(const problem_spec& spec, int max_iters = 1000) {
    const auto& unknowns = spec.g.interior_nodes();
    const auto fixed = fixed_values::dirichlet(spec);
    hjb::howard_options opts;
    opts.max_iters = max_iters;
    auto hr = hjb::howard_solve(spec, unknowns, fixed, opts);
    std::vector<double> full(spec.g.node_count(), 0.0);
    for (int node = 0; node < spec.g.node_count(); ++node)
        if (fixed.has(node)) full[node] = fixed[node];
    for (std::size_t i = 0; i < unknowns.size(); ++i) full[unknowns[i]] = hr.values[i];
    return {std::move(hr), std::move(full)};
}

double sup_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::fabs(a[i] - b[i]));
    return d;
}

std::vector<int> uniform_splits(int per_axis, int dim) {
    return std::vector<int>(static_cast<std::size_t>(dim), per_axis);
}

double oracle_error(const builtin_problem_result& pb, const std::vector<double>& v) {
    double e = 0.0;
    for (int node = 0; node < pb.spec.g.node_count(); ++node)
        e = std::max(e, std::fabs(v[node] - pb.oracle(pb.spec.g.coord(node))));
    return e;
}

// --- criteria -------------------------------------------------------------

// Decomposed and classic solves agree on the whole catalog.
void criterion_oracle_equivalence() {
    struct case_t {
        const char* name;
        double dx;
    };
    const case_t cases[] = {
        {"eikonal1d", 0.05}, {"eikonal2d", 0.1}, {"zermelo", 0.05}, {"dubins", 0.1}};
    for (const auto& c : cases) {
        const auto pb = builtin_problem(c.name, c.dx);
        const auto ha = classic_solve(pb.spec);
        expect(ha.result.converged, std::string(c.name) + ": classic did not converge");
        for (const int s : {2, 4}) {
            const auto dec = decompose(pb.spec.g, uniform_splits(s, pb.spec.g.dim()));
            pha_config cfg;
            cfg.epsilon = 1e-12;
            const auto rep = pha_solve(pb.spec, dec, cfg);
            expect(rep.converged, std::string(c.name) + ": decomposed solve did not converge");
            const double d = sup_diff(rep.values, ha.values);
            expect(d <= 1e-9, std::string(c.name) + " splits " + std::to_string(s) +
                                  ": |decomposed - classic| = " + fmt(d) + " > 1e-9");
        }
    }
}

// Classic iteration counts on the 1d distance problem follow 2/dx * 0.5.
void criterion_iterations_1d() {
    const double dxs[] = {0.1, 0.05, 0.025, 0.0125};
    const long expected[] = {10, 20, 40, 80};
    for (int i = 0; i < 4; ++i) {
        const auto pb = builtin_problem("eikonal1d", dxs[i]);
        const auto ha = classic_solve(pb.spec);
        expect(ha.result.converged, "classic did not converge at dx=" + fmt(dxs[i]));
        const long got = ha.result.iterations;
        expect(std::labs(got - expected[i]) <= 4,
               "dx=" + fmt(dxs[i]) + ": " + std::to_string(got) + " iterations, expected " +
                   std::to_string(expected[i]) + " +/- 4");
    }
}

// 2d iteration counts, plus few outer couplings for the decomposed solve.
void criterion_iterations_2d() {
    const double dxs[] = {0.1, 0.05};
    const long expected[] = {11, 21};
    for (int i = 0; i < 2; ++i) {
        const auto pb = builtin_problem("eikonal2d", dxs[i]);
        const auto ha = classic_solve(pb.spec);
        expect(ha.result.converged, "classic did not converge at dx=" + fmt(dxs[i]));
        const long got = ha.result.iterations;
        expect(std::labs(got - expected[i]) <= 4,
               "dx=" + fmt(dxs[i]) + ": " + std::to_string(got) + " iterations, expected " +
                   std::to_string(expected[i]) + " +/- 4");
    }
    const auto pb = builtin_problem("eikonal2d", 0.1);
    const auto dec = decompose(pb.spec.g, std::vector<int>{2, 2});
    // The coupling budget assumes the monotone-from-above regime: starting
    // at the exit-free value (constant 1 after the exponential rescaling, a
    // supersolution known a priori) the frozen interface is never mistaken
    // for a cheap exit, so each subdomain solve is already exact wherever
    // optimal trajectories stay inside the subdomain. From a zero start the
    // same loop converges from below and needs one coupling per information
    // shell instead.
    pha_config budget_cfg;
    const std::vector<double> above(pb.spec.g.node_count(), 1.0);
    budget_cfg.v0 = above;
    const auto rep = pha_solve(pb.spec, dec, budget_cfg);
    expect(rep.converged, "decomposed solve did not converge");
    expect(rep.outer_iterations <= 4, "outer couplings = " +
                                          std::to_string(rep.outer_iterations) + " > 4");
}

// First-order convergence toward 1 - exp(-dist(x, boundary)).
void criterion_convergence() {
    struct level_set {
        const char* name;
        std::vector<double> dxs;
    };
    const level_set sets[] = {{"eikonal1d", {0.1, 0.05, 0.025}},
                              {"eikonal2d", {0.2, 0.1, 0.05}}};
    for (const auto& s : sets) {
        std::vector<double> errs;
        for (const double dx : s.dxs) {
            const auto pb = builtin_problem(s.name, dx);
            const auto ha = classic_solve(pb.spec);
            expect(ha.result.converged,
                   std::string(s.name) + ": classic did not converge at dx=" + fmt(dx));
            errs.push_back(oracle_error(pb, ha.values));
        }
        for (std::size_t i = 0; i + 1 < errs.size(); ++i) {
            const double ratio = errs[i] / errs[i + 1];
            expect(ratio >= 1.6 && ratio <= 2.4,
                   std::string(s.name) + ": error ratio " + fmt(ratio) +
                       " outside [1.6, 2.4] (" + fmt(errs[i]) + " -> " + fmt(errs[i + 1]) +
                       ")");
        }
    }
}

// Policy matrices stay monotone: dense inverses have no negative entries.
void criterion_monotone_matrices() {
    std::mt19937 rng(20260819u);
    struct instance {
        const char* name;
        double dx;
    };
    // Spacings put a node at the origin (the drift problem's target) and
    // keep the unknown count small enough for dense inversion.
    const instance instances[] = {{"eikonal1d", 0.1}, {"zermelo", 0.5}};
    for (const auto& inst : instances) {
        for (const auto kind : {hjb::scheme_kind::upwind, hjb::scheme_kind::semi_lagrangian}) {
            auto pb = builtin_problem(inst.name, inst.dx);
            pb.spec.scheme = kind;
            const auto& unknowns = pb.spec.g.interior_nodes();
            expect(unknowns.size() <= 20, "instance too large for dense inversion");
            const auto fixed = fixed_values::dirichlet(pb.spec);
            std::uniform_int_distribution<int> pick(0, pb.spec.control_count() - 1);
            for (int trial = 0; trial < 50; ++trial) {
                std::vector<int> policy(unknowns.size());
                for (auto& a : policy) a = pick(rng);
                const auto sys = hjb::assemble_system(pb.spec, unknowns, policy, fixed);
                const Eigen::MatrixXd dense(sys.matrix);
                const Eigen::MatrixXd inverse = dense.fullPivLu().inverse();
                const double min_entry = inverse.minCoeff();
                expect(min_entry >= -1e-12,
                       std::string(inst.name) + ": inverse entry " + fmt(min_entry) +
                           " < -1e-12");
            }
        }
    }
}

// Outer iterates move one-sidedly toward the solution and never overshoot.
void criterion_monotone_iterates() {
    struct case_t {
        const char* name;
        double dx;
        std::vector<int> splits;
    };
    const case_t cases[] = {{"eikonal1d", 0.05, {2}}, {"eikonal2d", 0.1, {2, 2}}};
    for (const auto& c : cases) {
        const auto pb = builtin_problem(c.name, c.dx);
        const auto ha = classic_solve(pb.spec);
        const auto dec = decompose(pb.spec.g, c.splits);
        for (const bool from_above : {false, true}) {
            const auto tr =
                hjb::monotone_trajectory_check(pb.spec, dec, ha.values, from_above);
            expect(tr.monotone, std::string(c.name) +
                                    (from_above ? " (from above)" : " (from below)") +
                                    ": worst wrong-direction step " +
                                    fmt(tr.worst_violation));
            expect(tr.bounded, std::string(c.name) + ": overshoot " +
                                   fmt(tr.worst_bound_excess) + " > 1e-10");
        }
    }
}

// Exact-repetition stopping terminates with far fewer steps than 2N.
void criterion_finite_termination() {
    struct case_t {
        const char* name;
        double dx;
    };
    const case_t cases[] = {{"eikonal1d", 0.05}, {"eikonal2d", 0.1}, {"eikonal3d", 0.2},
                            {"zermelo", 0.1},    {"dubins", 0.2},    {"pursuit_evasion", 0.1}};
    for (const auto& c : cases) {
        const auto pb = builtin_problem(c.name, c.dx);
        const long long n = static_cast<long long>(pb.spec.g.interior_nodes().size());
        const auto ha = classic_solve(pb.spec, /*max_iters=*/static_cast<int>(2 * n));
        expect(ha.result.converged, std::string(c.name) + ": classic did not converge");
        expect(ha.result.iterations <= 2 * n,
               std::string(c.name) + ": " + std::to_string(ha.result.iterations) +
                   " iterations > 2N = " + std::to_string(2 * n));
        const auto dec = decompose(pb.spec.g, uniform_splits(2, pb.spec.g.dim()));
        pha_config cfg;
        cfg.epsilon = 0.0; // stop only on exact repetition
        const auto rep = pha_solve(pb.spec, dec, cfg);
        expect(rep.converged,
               std::string(c.name) + ": decomposed solve did not reach exact repetition");
        expect(rep.outer_iterations <= 2 * n,
               std::string(c.name) + ": " + std::to_string(rep.outer_iterations) +
                   " outer couplings > 2N");
    }
}

// Stop-value complementarity on the steered-car problem with a stop region.
void criterion_obstacle_complementarity() {
    auto pb = builtin_problem("dubins", 0.1);
    hjb::obstacle_spec obstacle;
    obstacle.values.assign(pb.spec.g.node_count(), 1e4);
    for (int node = 0; node < pb.spec.g.node_count(); ++node) {
        const auto x = pb.spec.g.coord(node);
        if (std::sqrt(x[0] * x[0] + x[1] * x[1]) < 0.4) obstacle.values[node] = 0.2;
    }
    const auto capped = hjb::apply_obstacle(pb.spec, obstacle);
    const auto ha = classic_solve(capped);
    expect(ha.result.converged, "capped solve did not converge");

    const int base = capped.base_control_count();
    bool cap_active = false, cap_slack = false;
    for (const int node : capped.g.interior_nodes()) {
        double bellman = 0.0;
        for (int k = 0; k < base; ++k) {
            const double r = hjb::row_residual(capped, node, k, ha.values);
            bellman = k == 0 ? r : std::min(bellman, r);
        }
        const double stop = obstacle.values[node] - ha.values[node];
        expect(bellman >= -1e-10,
               "scheme residual " + fmt(bellman) + " < -1e-10 at node " + std::to_string(node));
        expect(stop >= -1e-10,
               "stop slack " + fmt(stop) + " < -1e-10 at node " + std::to_string(node));
        expect(std::min(bellman, stop) <= 1e-10,
               "complementarity gap " + fmt(std::min(bellman, stop)) + " at node " +
                   std::to_string(node));
        if (stop <= 1e-10) cap_active = true;
        if (bellman <= 1e-10 && stop > 1e-6) cap_slack = true;
    }
    expect(cap_active, "the stop region never became active");
    expect(cap_slack, "the running branch never held strictly");
}

// Two-player solves: decomposition changes nothing, capture set pins zero.
void criterion_maxmin() {
    const auto pb = builtin_problem("pursuit_evasion", 0.1);
    const auto gs = hjb::make_game(pb);
    const auto& unknowns = gs.base.g.interior_nodes();
    const auto fixed = fixed_values::dirichlet(gs.base);
    const auto oracle = hjb::maxmin_howard(gs, unknowns, fixed);
    expect(oracle.converged, "single-domain game solve did not converge");
    std::vector<double> oracle_full(gs.base.g.node_count(), 0.0);
    for (int node = 0; node < gs.base.g.node_count(); ++node)
        if (fixed.has(node)) oracle_full[node] = fixed[node];
    for (std::size_t i = 0; i < unknowns.size(); ++i)
        oracle_full[unknowns[i]] = oracle.values[i];

    const auto dec = decompose(gs.base.g, std::vector<int>{2, 2});
    const auto rep = hjb::maxmin_solve(gs, dec);
    expect(rep.converged, "decomposed game solve did not converge");
    const double d = sup_diff(rep.values, oracle_full);
    expect(d <= 1e-8, "|decomposed - single-domain| = " + fmt(d) + " > 1e-8");

    for (const int node : unknowns) {
        const double v = rep.values[node];
        if (gs.base.is_target(node))
            expect(std::fabs(v) <= 1e-12,
                   "capture value " + fmt(v) + " != 0 at node " + std::to_string(node));
        else
            expect(v > 1e-12, "value " + fmt(v) + " not positive outside the capture set");
    }
}

// Sweeping split counts shows the interior cost minimum the split
// pre-selector predicts. The cost modeled is the fully parallel schedule:
// per coupling, the longest single subdomain solve (critical path) plus the
// sequential interface solve. Summed raw CPU time cannot show the tradeoff
// when the machine has fewer cores than subdomains, because shrinking
// subdomains keeps shrinking total work even after the critical path and
// interface share have turned back up. The sweep starts from the constant
// supersolution (see the coupling-budget criterion): from above the
// coupling count stays small and stable across split counts, so the
// par/seq tradeoff is measured instead of start-dependent crawl.
void criterion_bottleneck() {
    const auto simulated_wall = [](const hjb::solve_report& rep) {
        double t = 0.0;
        for (const auto& st : rep.outer) t += st.par_time_s + st.seq_time_s;
        return t;
    };
    const auto pb = builtin_problem("eikonal2d", 0.025);
    const std::vector<double> above(pb.spec.g.node_count(), 1.0);
    const std::vector<int> candidates{2, 3, 4, 5, 6, 8};
    std::vector<double> best_time(candidates.size(), 0.0);
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        const auto dec =
            decompose(pb.spec.g, uniform_splits(candidates[i], pb.spec.g.dim()));
        double best = 0.0;
        for (int rep_count = 0; rep_count < 2; ++rep_count) { // best of two runs
            pha_config cfg;
            cfg.v0 = above;
            const auto rep = pha_solve(pb.spec, dec, cfg);
            expect(rep.converged, "sweep solve did not converge at splits " +
                                      std::to_string(candidates[i]));
            const double t = simulated_wall(rep);
            best = rep_count == 0 ? t : std::min(best, t);
        }
        best_time[i] = best;
    }
    const auto argmin =
        std::min_element(best_time.begin(), best_time.end()) - best_time.begin();
    std::string times;
    for (std::size_t i = 0; i < candidates.size(); ++i)
        times += (i ? ", " : "") + std::to_string(candidates[i]) + ": " + fmt(best_time[i]);
    expect(argmin != 0 && argmin + 1 != static_cast<long>(best_time.size()),
           "no interior minimum across splits (" + times + ")");
    const int predicted =
        hjb::optimal_splits(static_cast<int>(pb.spec.g.interior_nodes().size()), 2);
    expect(std::abs(predicted - candidates[argmin]) <= 2,
           "predicted splits " + std::to_string(predicted) + " vs empirical " +
               std::to_string(candidates[argmin]) + " differ by more than 2");
}

// A cheap coarse start costs under 5% and never adds outer couplings.
void criterion_coarse_init() {
    const auto pb = builtin_problem("eikonal2d", 0.025);
    const auto dec = decompose(pb.spec.g, std::vector<int>{4, 4});
    pha_config zero_cfg;
    const auto zero_rep = pha_solve(pb.spec, dec, zero_cfg);
    expect(zero_rep.converged, "zero-start solve did not converge");
    pha_config coarse_cfg;
    coarse_cfg.init = hjb::init_mode::coarse;
    coarse_cfg.coarse_points = 4;
    const auto coarse_rep = pha_solve(pb.spec, dec, coarse_cfg);
    expect(coarse_rep.converged, "coarse-start solve did not converge");
    expect(coarse_rep.init_time_s < 0.05 * coarse_rep.total_time_s,
           "coarse start took " + fmt(coarse_rep.init_time_s) + " s of " +
               fmt(coarse_rep.total_time_s) + " s total (>= 5%)");
    expect(coarse_rep.outer_iterations <= zero_rep.outer_iterations,
           "coarse start used " + std::to_string(coarse_rep.outer_iterations) +
               " outer couplings vs " + std::to_string(zero_rep.outer_iterations) +
               " from zero");
}

} // namespace

int main() {
    struct criterion {
        const char* name;
        void (*run)();
    };
    const criterion criteria[] = {
        {"decomposed solves match the classic solver across the catalog",
         criterion_oracle_equivalence},
        {"1d iteration counts track the grid resolution", criterion_iterations_1d},
        {"2d iteration counts and outer-coupling budget", criterion_iterations_2d},
        {"first-order convergence to the exact distance transform",
         criterion_convergence},
        {"sampled policy matrices have nonnegative inverses",
         criterion_monotone_matrices},
        {"outer iterates approach the solution one-sidedly",
         criterion_monotone_iterates},
        {"exact-repetition stopping terminates on every catalog problem",
         criterion_finite_termination},
        {"stop-value complementarity holds at every node",
         criterion_obstacle_complementarity},
        {"two-player solves are decomposition-invariant and pin the capture set",
         criterion_maxmin},
        {"split sweep has an interior cost minimum near the prediction",
         criterion_bottleneck},
        {"coarse start is cheap and never adds outer couplings",
         criterion_coarse_init},
    };

    int passed = 0;
    const int total = static_cast<int>(std::size(criteria));
    for (int i = 0; i < total; ++i) {
        const auto t0 = std::chrono::steady_clock::now();
        std::string failure;
        try {
            criteria[i].run();
        } catch (const check_failure& f) {
            failure = f.message;
        } catch (const std::exception& e) {
            failure = std::string("unexpected error: ") + e.what();
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (failure.empty()) {
            ++passed;
            std::printf("[PASS] %2d/%d %s (%.2fs)\n", i + 1, total, criteria[i].name, secs);
        } else {
            std::printf("[FAIL] %2d/%d %s (%.2fs): %s\n", i + 1, total, criteria[i].name,
                        secs, failure.c_str());
        }
        std::fflush(stdout);
    }
    std::printf("%d/%d criteria passed\n", passed, total);
    return passed == total ? 0 : 1;
}
