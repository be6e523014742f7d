#include "hjb/scheme.hpp"

#include <cmath>
#include <string>

#include "hjb/errors.hpp"
#include "row_core.hpp"

namespace hjb {

void problem_spec::validate() const {
    if (!(discount > 0) || !std::isfinite(discount))
        throw config_error("discount rate must be positive and finite");
    if (controls.empty()) throw config_error("control set is empty");
    if (!node_eval && (!dynamics || !running_cost))
        throw config_error("dynamics and running_cost are required");
    const int n = g.node_count();
    if (!target_mask.empty() && static_cast<int>(target_mask.size()) != n)
        throw config_error("target_mask size does not match the grid");
    if (!obstacle_values.empty() && static_cast<int>(obstacle_values.size()) != n)
        throw config_error("obstacle_values size does not match the grid");
    if (scheme == scheme_kind::semi_lagrangian && discount * time_step() >= 1.0)
        throw cfl_violation("time step " + std::to_string(time_step()) +
                            " is too large for discount rate " + std::to_string(discount));

    bool any_dirichlet = false;
    for (int node = 0; node < n; ++node) {
        const point x = g.coord(node);
        if (g.is_dirichlet(node)) {
            any_dirichlet = true;
            if (exit_cost && !std::isfinite(exit_cost(x)))
                throw config_error("exit cost is not finite at node " + std::to_string(node));
            continue;
        }
        for (int k = 0; k < base_control_count(); ++k) {
            point f{};
            double l = 0.0;
            detail::spec_eval{*this, k}(node, x, f, l);
            for (int a = 0; a < g.dim(); ++a)
                if (!std::isfinite(f[a]))
                    throw config_error("dynamics value is not finite at node " +
                                       std::to_string(node));
            if (!std::isfinite(l))
                throw config_error("running cost is not finite at node " + std::to_string(node));
        }
        if (!obstacle_values.empty() && !std::isfinite(obstacle_values[node]))
            throw config_error("stop value is not finite at node " + std::to_string(node));
    }
    if (any_dirichlet && !exit_cost)
        throw config_error("exit_cost is required when the grid has Dirichlet nodes");
}

fixed_values fixed_values::dirichlet(const problem_spec& spec) {
    fixed_values fv(spec.g.node_count());
    for (int node = 0; node < spec.g.node_count(); ++node)
        if (spec.g.is_dirichlet(node)) fv.set(node, spec.exit_cost(spec.g.coord(node)));
    return fv;
}

std::vector<std::pair<int, double>> interp_weights(const grid& g, const point& p) {
    detail::cell_weights cw;
    detail::compute_cell_weights(g, p, cw);
    return {cw.w.begin(), cw.w.begin() + cw.n};
}

namespace {

/// Fills `row` through the shared row core, folding fixed columns into the
/// rhs. Target nodes and the stop half of a doubled control set produce
/// identity rows directly.
void build_row(const problem_spec& spec, int node, int k, const fixed_values* fold,
               system_row& row) {
    row.node = node;
    row.entries.clear();
    if (spec.is_target(node)) {
        row.entries.emplace_back(node, 1.0);
        row.rhs = 0.0;
        return;
    }
    if (k >= spec.base_control_count()) {
        if (spec.obstacle_values.empty() || k >= spec.control_count())
            throw config_error("control index " + std::to_string(k) + " is out of range");
        row.entries.emplace_back(node, 1.0);
        row.rhs = spec.obstacle_values[node];
        return;
    }
    double folded = 0.0;
    const double rhs = detail::scheme_row(
        spec.g, spec.scheme, spec.discount, node, detail::spec_eval{spec, k},
        [&](int col, double coeff) {
            if (fold && fold->has(col))
                folded += coeff * (*fold)[col];
            else
                row.entries.emplace_back(col, coeff);
        });
    row.rhs = rhs - folded;
}

} // namespace

system_row assemble_row(const problem_spec& spec, int node, int k, const fixed_values* fold) {
    system_row row;
    build_row(spec, node, k, fold, row);
    return row;
}

double row_residual(const problem_spec& spec, int node, int k, std::span<const double> v_all) {
    if (spec.is_target(node)) return -v_all[node];
    if (k >= spec.base_control_count()) {
        if (spec.obstacle_values.empty() || k >= spec.control_count())
            throw config_error("control index " + std::to_string(k) + " is out of range");
        return spec.obstacle_values[node] - v_all[node];
    }
    double dot = 0.0;
    const double rhs =
        detail::scheme_row(spec.g, spec.scheme, spec.discount, node, detail::spec_eval{spec, k},
                           [&](int col, double coeff) { dot += coeff * v_all[col]; });
    return rhs - dot;
}

assembled_system assemble_system(const problem_spec& spec, std::span<const int> unknowns,
                                 std::span<const int> policy, const fixed_values& fixed) {
    if (unknowns.size() != policy.size())
        throw config_error("policy size does not match the unknown set");
    const int m = static_cast<int>(unknowns.size());
    std::vector<int> local(spec.g.node_count(), -1);
    for (int i = 0; i < m; ++i) local[unknowns[i]] = i;

    assembled_system sys;
    sys.unknowns.assign(unknowns.begin(), unknowns.end());
    sys.policy.assign(policy.begin(), policy.end());
    sys.rhs.resize(m);
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(static_cast<std::size_t>(m) * (2 * spec.g.dim() + 1));

    system_row row;
    for (int i = 0; i < m; ++i) {
        build_row(spec, unknowns[i], policy[i], &fixed, row);
        for (const auto& [col, coeff] : row.entries) {
            const int j = local[col];
            if (j < 0)
                throw missing_fixed_value("row " + std::to_string(unknowns[i]) +
                                          " couples to node " + std::to_string(col) +
                                          " which is neither unknown nor fixed");
            triplets.emplace_back(i, j, coeff);
        }
        sys.rhs[i] = row.rhs;
    }
    sys.matrix.resize(m, m);
    sys.matrix.setFromTriplets(triplets.begin(), triplets.end());
    return sys;
}

} // namespace hjb
