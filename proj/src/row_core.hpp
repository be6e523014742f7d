#pragma once

// Internal row-assembly core shared by the scheme module and the game
// module. Rows are emitted through a sink callback so the same logic can
// fill sparse triplets, fold fixed values, or accumulate a residual dot
// product without allocating.

#include <array>
#include <cassert>
#include <cmath>
#include <utility>

#include "hjb/errors.hpp"
#include "hjb/grid.hpp"
#include "hjb/scheme.hpp"

namespace hjb::detail {

/// Interpolation weights below this are dropped (then the rest renormalized)
/// so stencils stay minimal and exact-node feet give single-entry rows.
inline constexpr double weight_prune = 1e-13;

/// Cell weights for up to 3 axes (8 corners), allocation-free.
struct cell_weights {
    std::array<std::pair<int, double>, 8> w;
    int n = 0;
};

/// Multilinear weights of the cell containing p. Periodic axes wrap; on
/// non-periodic axes p must lie in the closed box up to a small relative
/// slack (callers clip feet first). Weights are pruned and renormalized to
/// sum to 1.
inline void compute_cell_weights(const grid& g, const point& p, cell_weights& out) {
    int c0[max_dim] = {0, 0, 0};
    int c1[max_dim] = {0, 0, 0};
    double frac[max_dim] = {0.0, 0.0, 0.0};
    const int dim = g.dim();
    for (int a = 0; a < dim; ++a) {
        const int n = g.count(a);
        double t = (p[a] - g.lo(a)) / g.spacing(a);
        if (g.periodic(a)) {
            t = std::fmod(t, static_cast<double>(n));
            if (t < 0) t += n;
            if (t >= n) t = 0;
            int c = static_cast<int>(std::floor(t));
            if (c > n - 1) c = n - 1;
            c0[a] = c;
            c1[a] = (c + 1) % n;
            frac[a] = t - c;
        } else {
            if (t < -1e-9 || t > (n - 1) + 1e-9)
                throw point_outside_domain("interpolation point leaves the domain box on axis " +
                                           std::to_string(a));
            if (t < 0) t = 0;
            if (t > n - 1) t = n - 1;
            int c = static_cast<int>(std::floor(t));
            if (c > n - 2) c = n - 2;
            c0[a] = c;
            c1[a] = c + 1;
            frac[a] = t - c;
            if (frac[a] < 0) frac[a] = 0;
            if (frac[a] > 1) frac[a] = 1;
        }
    }
    out.n = 0;
    double sum = 0.0;
    int multi[max_dim] = {0, 0, 0};
    for (int mask = 0; mask < (1 << dim); ++mask) {
        double w = 1.0;
        for (int a = 0; a < dim; ++a) {
            const bool up = (mask >> a) & 1;
            w *= up ? frac[a] : 1.0 - frac[a];
            multi[a] = up ? c1[a] : c0[a];
        }
        if (w <= weight_prune) continue;
        out.w[out.n++] = {g.flat_index({multi, static_cast<std::size_t>(dim)}), w};
        sum += w;
    }
    assert(out.n > 0);
    for (int i = 0; i < out.n; ++i) out.w[i].second /= sum;
}

/// Emits the scheme row of `node` for one fixed control: sink(col, coeff)
/// once per column (diagonal included), returns the rhs. `fl(node, x, f, l)`
/// supplies the dynamics value and running cost with the control baked in.
template <class Fl, class Sink>
double scheme_row(const grid& g, scheme_kind kind, double lambda, int node, const Fl& fl,
                  Sink&& sink) {
    const point x = g.coord(node);
    point f{};
    double l = 0.0;
    fl(node, x, f, l);

    if (kind == scheme_kind::upwind) {
        double diag = 1.0;
        for (int a = 0; a < g.dim(); ++a) {
            const double hl = g.spacing(a) * lambda;
            const double fp = f[a] > 0 ? f[a] : 0.0;
            const double fm = f[a] < 0 ? f[a] : 0.0;
            diag += (fp - fm) / hl;
            if (fp > 0) {
                const int up = g.neighbor(node, a, +1);
                assert(up >= 0);
                sink(up, -fp / hl);
            }
            if (fm < 0) {
                const int dn = g.neighbor(node, a, -1);
                assert(dn >= 0);
                sink(dn, fm / hl);
            }
        }
        sink(node, diag);
        return l / lambda;
    }

    const double dt = g.min_spacing();
    if (lambda * dt >= 1.0)
        throw cfl_violation("time step " + std::to_string(dt) +
                            " is too large for discount rate " + std::to_string(lambda));
    const double beta = 1.0 - lambda * dt;
    point foot = x;
    for (int a = 0; a < g.dim(); ++a) {
        const double h = g.spacing(a);
        double disp = dt * f[a];
        if (disp > h) disp = h;
        if (disp < -h) disp = -h;
        foot[a] = x[a] + disp;
        if (!g.periodic(a)) {
            if (foot[a] < g.lo(a)) foot[a] = g.lo(a);
            if (foot[a] > g.hi(a)) foot[a] = g.hi(a);
        }
    }
    cell_weights cw;
    compute_cell_weights(g, foot, cw);
    double diag = 1.0;
    for (int i = 0; i < cw.n; ++i) {
        if (cw.w[i].first == node)
            diag -= beta * cw.w[i].second;
        else
            sink(cw.w[i].first, -beta * cw.w[i].second);
    }
    sink(node, diag);
    return dt * l;
}

/// Evaluator adapter for a plain problem_spec and base control index k
/// (node_eval hook wins when set).
struct spec_eval {
    const problem_spec& spec;
    int k;
    void operator()(int node, const point& x, point& f, double& l) const {
        if (spec.node_eval) {
            spec.node_eval(node, x, k, f, l);
        } else {
            f = spec.dynamics(x, spec.controls[k]);
            l = spec.running_cost(x, spec.controls[k]);
        }
    }
};

} // namespace hjb::detail
