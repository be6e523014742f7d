#include "hjb/policy.hpp"

#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <string>

#include "hjb/errors.hpp"

namespace hjb {

Eigen::VectorXd policy_evaluate(const assembled_system& sys, double* rel_residual) {
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.compute(sys.matrix);
    if (lu.info() != Eigen::Success)
        throw singular_system("policy system factorization failed: " + lu.lastErrorMessage());
    Eigen::VectorXd v = lu.solve(sys.rhs);
    if (lu.info() != Eigen::Success || !v.allFinite())
        throw singular_system("policy system solve produced no finite solution");

    const double scale = std::max(1.0, sys.rhs.size() ? sys.rhs.lpNorm<Eigen::Infinity>() : 0.0);
    const double rel =
        sys.rhs.size() ? (sys.matrix * v - sys.rhs).lpNorm<Eigen::Infinity>() / scale : 0.0;
    if (rel > linear_rel_tol)
        throw singular_system("policy evaluation residual " + std::to_string(rel) +
                              " exceeds tolerance");
    if (rel_residual) *rel_residual = rel;
    return v;
}

int improve_node(const problem_spec& spec, int node, std::span<const double> v_all,
                 direction dir, double* best_residual) {
    const int nk = spec.control_count();
    int best = 0;
    double best_r = row_residual(spec, node, 0, v_all);
    for (int k = 1; k < nk; ++k) {
        const double r = row_residual(spec, node, k, v_all);
        const bool wins = dir == direction::minimize ? r < best_r : r > best_r;
        if (wins) {
            best = k;
            best_r = r;
        }
    }
    if (best_residual) *best_residual = best_r;
    return best;
}

namespace {

/// Dense value field: fixed data everywhere it exists, the current iterate
/// on the unknowns, zero elsewhere (stencils must not reach that far).
std::vector<double> dense_values(const problem_spec& spec, std::span<const int> unknowns,
                                 std::span<const double> values, const fixed_values& fixed) {
    std::vector<double> v_all(spec.g.node_count(), 0.0);
    for (int node = 0; node < spec.g.node_count(); ++node)
        if (fixed.has(node)) v_all[node] = fixed[node];
    if (!values.empty())
        for (std::size_t i = 0; i < unknowns.size(); ++i) v_all[unknowns[i]] = values[i];
    return v_all;
}

} // namespace

std::vector<int> policy_improve(const problem_spec& spec, std::span<const int> unknowns,
                                std::span<const double> values, const fixed_values& fixed,
                                direction dir) {
    if (values.size() != unknowns.size())
        throw config_error("value vector size does not match the unknown set");
    const std::vector<double> v_all = dense_values(spec, unknowns, values, fixed);
    std::vector<int> policy(unknowns.size());
    for (std::size_t i = 0; i < unknowns.size(); ++i)
        policy[i] = improve_node(spec, unknowns[i], v_all, dir);
    return policy;
}

howard_result howard_solve(const problem_spec& spec, std::span<const int> unknowns,
                           const fixed_values& fixed, const howard_options& opts) {
    if (opts.max_iters < 1) throw config_error("howard_solve needs max_iters >= 1");
    const int m = static_cast<int>(unknowns.size());
    howard_result res;
    if (m == 0) {
        res.converged = true;
        return res;
    }

    std::vector<double> v_all = dense_values(spec, unknowns, {}, fixed);
    std::vector<int> policy;
    if (!opts.policy0.empty()) {
        if (static_cast<int>(opts.policy0.size()) != m)
            throw config_error("initial policy size does not match the unknown set");
        for (int k : opts.policy0)
            if (k < 0 || k >= spec.control_count())
                throw config_error("initial policy entry " + std::to_string(k) +
                                   " is out of range");
        policy.assign(opts.policy0.begin(), opts.policy0.end());
    } else if (!opts.v0.empty()) {
        if (static_cast<int>(opts.v0.size()) != m)
            throw config_error("initial value size does not match the unknown set");
        for (int i = 0; i < m; ++i) v_all[unknowns[i]] = opts.v0[i];
        policy.resize(m);
        for (int i = 0; i < m; ++i) policy[i] = improve_node(spec, unknowns[i], v_all, opts.dir);
    } else {
        policy.assign(m, 0);
    }

    std::vector<double> v_prev;
    std::vector<double> v_cur(m);
    for (int it = 1; it <= opts.max_iters; ++it) {
        const auto sys = assemble_system(spec, unknowns, policy, fixed);
        double rel = 0.0;
        const Eigen::VectorXd v = policy_evaluate(sys, &rel);
        res.linear_residual = std::max(res.linear_residual, rel);
        for (int i = 0; i < m; ++i) v_cur[i] = v[i];
        res.iterations = it;

        if (!v_prev.empty()) {
            double diff = 0.0;
            for (int i = 0; i < m; ++i) diff = std::max(diff, std::fabs(v_cur[i] - v_prev[i]));
            if (v_cur == v_prev || diff <= opts.tol) {
                res.iterations = it - 1; // k of the first repeated iterate
                res.converged = true;
                break;
            }
        }
        v_prev = v_cur;

        for (int i = 0; i < m; ++i) v_all[unknowns[i]] = v_cur[i];
        bool changed = false;
        for (int i = 0; i < m; ++i) {
            const int k = improve_node(spec, unknowns[i], v_all, opts.dir);
            if (k != policy[i]) {
                policy[i] = k;
                changed = true;
            }
        }
        if (!changed) {
            // Re-evaluating an unchanged policy would reproduce the iterate
            // bitwise, so the next value comparison is already decided.
            res.converged = true;
            break;
        }
    }

    for (int i = 0; i < m; ++i) v_all[unknowns[i]] = v_cur[i];
    res.values = std::move(v_cur);
    res.policy = std::move(policy);
    double worst = 0.0;
    for (int i = 0; i < m; ++i) {
        double r = 0.0;
        improve_node(spec, unknowns[i], v_all, opts.dir, &r);
        worst = std::max(worst, std::fabs(r));
    }
    res.residual_inf = worst;
    return res;
}

} // namespace hjb
