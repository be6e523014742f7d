#include "hjb/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hjb/errors.hpp"

namespace hjb {

namespace {

int conforming_cells(double lo, double hi, double dx, int axis) {
    if (!(dx > 0.0))
        throw non_conforming_spacing("dx must be positive on axis " + std::to_string(axis));
    if (!(hi > lo))
        throw dimension_out_of_range("hi must exceed lo on axis " + std::to_string(axis));
    const double ratio = (hi - lo) / dx;
    const double rounded = std::round(ratio);
    if (std::abs(ratio - rounded) > 1e-6 * std::max(1.0, std::abs(ratio)))
        throw non_conforming_spacing("dx = " + std::to_string(dx) + " does not tile [" +
                                     std::to_string(lo) + ", " + std::to_string(hi) +
                                     "] on axis " + std::to_string(axis));
    return static_cast<int>(rounded);
}

} // namespace

grid grid::build(std::span<const double> lo, std::span<const double> hi,
                 std::span<const double> dx) {
    return build(lo, hi, dx, std::span<const bool>{});
}

grid grid::build(std::span<const double> lo, std::span<const double> hi,
                 std::span<const double> dx, std::span<const bool> periodic) {
    const int d = static_cast<int>(lo.size());
    if (d < 1 || d > max_dim)
        throw dimension_out_of_range("grid dimension must be 1..3, got " + std::to_string(d));
    if (hi.size() != lo.size() || dx.size() != lo.size() ||
        (!periodic.empty() && periodic.size() != lo.size()))
        throw dimension_out_of_range("lo/hi/dx/periodic extents disagree");

    auto data = std::make_shared<grid::data>();
    data->dim = d;
    for (int a = 0; a < d; ++a) {
        const int cells = conforming_cells(lo[a], hi[a], dx[a], a);
        const bool wrap = !periodic.empty() && periodic[a];
        const int n = wrap ? cells : cells + 1;
        if (n < 3)
            throw non_conforming_spacing("axis " + std::to_string(a) +
                                         " needs at least 3 nodes, got " + std::to_string(n));
        data->counts[a] = n;
        data->lo[a] = lo[a];
        data->hi[a] = hi[a];
        data->periodic[a] = wrap;
        data->h[a] = wrap ? (hi[a] - lo[a]) / n : (hi[a] - lo[a]) / (n - 1);
        data->coords[a].resize(n);
        for (int i = 0; i < n; ++i)
            data->coords[a][i] = lo[a] + i * data->h[a];
        if (!wrap)
            data->coords[a][n - 1] = hi[a];
    }
    data->total = 1;
    for (int a = d - 1; a >= 0; --a) {
        data->stride[a] = data->total;
        data->total *= data->counts[a];
    }

    grid g;
    g.d_ = data;
    data->interior.reserve(data->total);
    for (int i = 0; i < data->total; ++i)
        if (g.classify(i) == node_class::interior)
            data->interior.push_back(i);
    // classify() only needs the geometric fields, so seeding interior here is safe.
    g.d_ = std::move(data);
    return g;
}

double grid::min_spacing() const {
    double h = d_->h[0];
    for (int a = 1; a < d_->dim; ++a)
        h = std::min(h, d_->h[a]);
    return h;
}

int grid::flat_index(std::span<const int> multi) const {
    int id = 0;
    for (int a = 0; a < d_->dim; ++a)
        id += multi[a] * d_->stride[a];
    return id;
}

std::array<int, max_dim> grid::multi_index(int node) const {
    std::array<int, max_dim> m{};
    for (int a = 0; a < d_->dim; ++a) {
        m[a] = node / d_->stride[a];
        node -= m[a] * d_->stride[a];
    }
    return m;
}

point grid::coord(int node) const {
    const auto m = multi_index(node);
    point x{};
    for (int a = 0; a < d_->dim; ++a)
        x[a] = d_->coords[a][m[a]];
    return x;
}

node_class grid::classify(int node) const {
    const auto m = multi_index(node);
    for (int a = 0; a < d_->dim; ++a) {
        if (d_->periodic[a])
            continue;
        if (m[a] == 0 || m[a] == d_->counts[a] - 1)
            return node_class::dirichlet;
    }
    return node_class::interior;
}

int grid::neighbor(int node, int axis, int dir) const {
    const auto m = multi_index(node);
    int i = m[axis] + dir;
    const int n = d_->counts[axis];
    if (d_->periodic[axis]) {
        i = (i % n + n) % n;
    } else if (i < 0 || i >= n) {
        return -1;
    }
    return node + (i - m[axis]) * d_->stride[axis];
}

namespace {

// Per-axis slab/separator labels: values >= 0 are slab ids, -2 marks a
// separator plane position. Index space is the full axis (0..count-1);
// positions outside the partitioned range keep -1 (Dirichlet rim).
std::vector<int> axis_labels(int count, bool periodic, int splits, int axis) {
    std::vector<int> label(count, -1);
    if (splits < 1)
        throw too_many_splits("splits must be >= 1 on axis " + std::to_string(axis));
    const int first = periodic ? 0 : 1;
    const int positions = periodic ? count : count - 2;
    const int separators = splits == 1 ? 0 : (periodic ? splits : splits - 1);
    const int slab_total = positions - separators;
    if (slab_total < splits)
        throw too_many_splits("axis " + std::to_string(axis) + " has " +
                              std::to_string(positions) + " nodes, too few for " +
                              std::to_string(splits) + " slabs");
    const int base = slab_total / splits;
    const int rem = slab_total % splits;
    int pos = first;
    for (int s = 0; s < splits; ++s) {
        const int size = base + (s < rem ? 1 : 0);
        for (int k = 0; k < size; ++k)
            label[pos++] = s;
        const bool needs_sep = periodic ? true : s < splits - 1;
        if (splits > 1 && needs_sep)
            label[pos++] = -2;
    }
    return label;
}

} // namespace

decomposition decompose(const grid& g, std::span<const int> splits) {
    const int d = g.dim();
    if (static_cast<int>(splits.size()) != d)
        throw dimension_out_of_range("splits extent must match grid dimension");

    decomposition dec;
    int n_sub = 1;
    std::array<std::vector<int>, max_dim> labels;
    for (int a = 0; a < d; ++a) {
        dec.splits[a] = splits[a];
        labels[a] = axis_labels(g.count(a), g.periodic(a), splits[a], a);
        n_sub *= splits[a];
    }
    dec.subdomains.assign(n_sub, {});
    dec.owner.assign(g.node_count(), decomposition::owner_dirichlet);

    for (int node = 0; node < g.node_count(); ++node) {
        if (g.is_dirichlet(node))
            continue;
        const auto m = g.multi_index(node);
        bool border = false;
        int sub = 0;
        for (int a = 0; a < d; ++a) {
            const int l = labels[a][m[a]];
            if (l == -2) {
                border = true;
                break;
            }
            sub = sub * splits[a] + l;
        }
        if (border) {
            dec.owner[node] = decomposition::owner_interface;
            dec.interface_nodes.push_back(node);
        } else {
            dec.owner[node] = sub;
            dec.subdomains[sub].push_back(node);
        }
    }
    return dec;
}

int optimal_splits(std::int64_t n_total, int d) {
    if (n_total < 2 || d < 1 || d > max_dim)
        throw dimension_out_of_range("optimal_splits needs n_total >= 2 and d in 1..3");
    for (int n = 2;; ++n) {
        // work bound (n^d (n-1) d)^d, saturating well above any node count
        long double t = 1.0L;
        for (int k = 0; k < d; ++k)
            t *= n;
        t *= (n - 1) * d;
        long double bound = 1.0L;
        for (int k = 0; k < d; ++k)
            bound *= t;
        if (bound >= static_cast<long double>(n_total))
            return n;
    }
}

} // namespace hjb
