#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

namespace hjb {

inline constexpr int max_dim = 3;

/// Grid point / vector in up to max_dim coordinates (unused entries zero).
using point = std::array<double, max_dim>;

enum class node_class : unsigned char { interior, dirichlet };

/// Uniform tensor grid over an axis-aligned box. Nodes are addressed by a
/// flat row-major index (last axis fastest). Axes may be periodic: a periodic
/// axis identifies hi with lo, carries counts = (hi-lo)/dx nodes covering
/// [lo, hi) and has no boundary nodes of its own.
///
/// Immutable after construction; copies share state and are cheap. Safe to
/// read from multiple threads.
class grid {
public:
    grid() = default;

    /// Throws dimension_out_of_range for d outside 1..3 or mismatched spans,
    /// non_conforming_spacing when dx does not tile an axis.
    static grid build(std::span<const double> lo, std::span<const double> hi,
                      std::span<const double> dx);
    static grid build(std::span<const double> lo, std::span<const double> hi,
                      std::span<const double> dx, std::span<const bool> periodic);

    int dim() const { return d_->dim; }
    int count(int axis) const { return d_->counts[axis]; }
    int node_count() const { return d_->total; }
    double lo(int axis) const { return d_->lo[axis]; }
    double hi(int axis) const { return d_->hi[axis]; }
    double spacing(int axis) const { return d_->h[axis]; }
    double min_spacing() const;
    bool periodic(int axis) const { return d_->periodic[axis]; }

    int flat_index(std::span<const int> multi) const;
    std::array<int, max_dim> multi_index(int node) const;
    point coord(int node) const;
    double axis_coord(int axis, int i) const { return d_->coords[axis][i]; }

    node_class classify(int node) const;
    bool is_dirichlet(int node) const { return classify(node) == node_class::dirichlet; }

    /// Neighbor one step along `axis` in direction `dir` (+1 or -1).
    /// Wraps on periodic axes; returns -1 past a non-periodic edge.
    int neighbor(int node, int axis, int dir) const;

    /// All non-Dirichlet nodes, ascending.
    const std::vector<int>& interior_nodes() const { return d_->interior; }

private:
    struct data {
        int dim = 0;
        int total = 0;
        std::array<int, max_dim> counts{};
        std::array<int, max_dim> stride{};
        std::array<double, max_dim> lo{}, hi{}, h{};
        std::array<bool, max_dim> periodic{};
        std::array<std::vector<double>, max_dim> coords;
        std::vector<int> interior;
    };
    std::shared_ptr<const data> d_;
};

/// Partition of a grid's non-Dirichlet nodes into subdomain index sets plus a
/// set of border (interface) nodes lying on one-node-thick axis-aligned split
/// planes. Every neighbor of a subdomain node is in the same subdomain, the
/// interface, or the Dirichlet boundary, so subdomain systems couple only
/// through the interface.
struct decomposition {
    static constexpr int owner_dirichlet = -1;
    static constexpr int owner_interface = -2;

    std::array<int, max_dim> splits{1, 1, 1};
    std::vector<std::vector<int>> subdomains; ///< sorted global node ids
    std::vector<int> interface_nodes;         ///< sorted global node ids
    std::vector<int> owner;                   ///< per node: subdomain id or owner_* marker

    int subdomain_count() const { return static_cast<int>(subdomains.size()); }
};

/// Split the grid into prod(splits) subdomains. splits[a] >= 1 slabs per axis,
/// separated by one-node planes; earlier slabs absorb remainder nodes. Throws
/// too_many_splits when a slab would be empty.
decomposition decompose(const grid& g, std::span<const int> splits);

/// Smallest per-axis split count N >= 2 whose predicted work bound
/// (N^d (N-1) d)^d reaches n_total. Used to pre-select sweep ranges.
int optimal_splits(std::int64_t n_total, int d);

} // namespace hjb
