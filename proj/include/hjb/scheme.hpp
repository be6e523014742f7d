#pragma once

#include <Eigen/Sparse>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "hjb/grid.hpp"

namespace hjb {

/// One control value; entries are problem-defined (a signed speed, a unit
/// vector, a steering rate, ...).
using control = std::vector<double>;

enum class scheme_kind { upwind, semi_lagrangian };

/// Stationary discounted control problem on a grid, together with the
/// discretization that turns it into the family of linear systems
/// B(a) V = c(a), one row per non-Dirichlet node:
///
///  - upwind: first-order directional differences per axis, row scaled by
///    1/discount so the diagonal is 1 + sum |f_axis| / (h * discount);
///  - semi_lagrangian: V_i - (1 - discount*dt) * I[V](x_i + dt f) = dt * l,
///    with multilinear interpolation I and dt = min axis spacing. Feet are
///    clipped to the domain box and to one-cell reach so rows never couple
///    nodes further than one cell away (keeps decompositions valid).
///
/// Rows are monotone: positive diagonal, nonpositive off-diagonals, inverse
/// entrywise nonnegative. The row residual used throughout is
///     r_i(a) = c_i(a) - (B(a) V)_i,
/// and policy improvement minimizes it; at the solution min_a r_i(a) = 0.
///
/// dynamics/running_cost/exit_cost must be pure and thread-safe; they are
/// called concurrently from subdomain workers.
struct problem_spec {
    grid g;
    std::function<point(const point&, const control&)> dynamics;
    std::function<double(const point&, const control&)> running_cost;
    std::function<double(const point&)> exit_cost;
    double discount = 1.0;
    std::vector<control> controls;
    scheme_kind scheme = scheme_kind::upwind;

    /// Nodes where the equation is replaced by V = 0 (identity row, zero rhs)
    /// for every control. Empty or g.node_count() entries.
    std::vector<char> target_mask;

    /// Optional stop values W. When present the control set is doubled:
    /// indices [0, controls.size()) keep the scheme rows, the upper half
    /// replaces the row with V_i = W_i (stopping at value W). Empty or
    /// g.node_count() entries.
    std::vector<double> obstacle_values;

    /// Optional node-aware evaluation hook; when set it supplies f and l
    /// instead of dynamics/running_cost (used to freeze one player of a
    /// game). `k` is always a base control index.
    std::function<void(int node, const point& x, int k, point& f, double& l)> node_eval;

    int base_control_count() const { return static_cast<int>(controls.size()); }
    int control_count() const {
        return obstacle_values.empty() ? base_control_count() : 2 * base_control_count();
    }
    bool is_target(int node) const {
        return !target_mask.empty() && target_mask[node] != 0;
    }
    double time_step() const { return g.min_spacing(); }

    /// Checks structural fields and samples f, l, g over all nodes and
    /// controls for finiteness. Throws on violation.
    void validate() const;
};

/// Sparse row of B(a) V = c(a) in global node columns (diagonal included).
struct system_row {
    int node = -1;
    std::vector<std::pair<int, double>> entries;
    double rhs = 0.0;
};

/// Known values outside the unknown set (Dirichlet data and frozen nodes),
/// stored densely with a presence mask.
class fixed_values {
public:
    fixed_values() = default;
    explicit fixed_values(int node_count)
        : value_(node_count, 0.0), present_(node_count, 0) {}

    /// g sampled on all Dirichlet nodes.
    static fixed_values dirichlet(const problem_spec& spec);

    void set(int node, double v) {
        value_[node] = v;
        present_[node] = 1;
    }
    bool has(int node) const { return !present_.empty() && present_[node] != 0; }
    double operator[](int node) const { return value_[node]; }
    int size() const { return static_cast<int>(value_.size()); }

private:
    std::vector<double> value_;
    std::vector<char> present_;
};

/// Multilinear interpolation weights for `p` on the cell containing it:
/// (node, weight) pairs with weights >= 0 summing to 1; a point on a node
/// returns that single node with weight 1. Throws point_outside_domain when
/// p leaves the closed box on a non-periodic axis.
std::vector<std::pair<int, double>> interp_weights(const grid& g, const point& p);

/// Row of the scheme for `node` under control index k (which may address the
/// stop half of a doubled control set). Columns found in `fold` are folded
/// into the rhs (rhs -= coeff * value) and dropped from the entry list.
system_row assemble_row(const problem_spec& spec, int node, int k,
                        const fixed_values* fold = nullptr);

/// Residual r = rhs - row . values of the row for (node, k); `v_all` carries
/// current values for every node the stencil can touch.
double row_residual(const problem_spec& spec, int node, int k,
                    std::span<const double> v_all);

/// Square system over `unknowns` (sorted global ids) for one policy (control
/// index per unknown). Couplings to nodes outside the unknown set are folded
/// through `fixed`; a stencil neighbor that is neither throws
/// missing_fixed_value.
struct assembled_system {
    std::vector<int> unknowns;
    std::vector<int> policy;
    Eigen::SparseMatrix<double> matrix;
    Eigen::VectorXd rhs;
};

assembled_system assemble_system(const problem_spec& spec, std::span<const int> unknowns,
                                 std::span<const int> policy, const fixed_values& fixed);

} // namespace hjb
