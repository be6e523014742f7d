#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hjb/grid.hpp"
#include "hjb/pha.hpp"
#include "hjb/problems.hpp"

namespace hjb {

enum class algorithm_kind { classic, pha, maxmin };
enum class report_format { csv, aligned_text };
enum class scheme_override { problem_default, upwind, semi_lagrangian };

/// One benchmark experiment: a catalog problem swept over grid spacings and
/// domain splits. Field comments give the config-file key each field mirrors.
struct experiment_config {
    std::string problem_name = "eikonal1d";                     ///< problem.name
    int control_count = 0;                                      ///< problem.controls
    double dubins_speed = 1.0;                                  ///< problem.dubins_speed
    scheme_override scheme = scheme_override::problem_default;  ///< problem.scheme
    std::vector<double> dx_list;                                ///< sweep.dx
    /// sweep.splits — each entry lists per-axis split counts ("2x2"); a
    /// single number broadcasts to every axis. Empty list defaults to the
    /// single-domain split at run time.
    std::vector<std::vector<int>> splits_list;
    algorithm_kind algorithm = algorithm_kind::classic;  ///< solver.algorithm
    init_mode init = init_mode::zero;                    ///< solver.init
    int coarse_points = 4;                               ///< solver.coarse_points
    double epsilon = 1e-10;                              ///< solver.eps
    int max_outer = 1000;                                ///< solver.max_outer
    int max_inner = 1000;                                ///< solver.max_inner
    int worker_count = 1;                                ///< solver.workers
    bool interface_recursive = false;                    ///< solver.recursive
    report_format format = report_format::csv;           ///< output.format
    std::string output_csv;                              ///< output.csv
    std::string output_dump;                             ///< output.dump

    /// Structural checks with config-key paths in the messages: positive
    /// conforming spacings (the catalog domain is [-1,1] per axis), positive
    /// split counts, sane solver limits. Throws config_error.
    void validate() const;
};

/// Parses flat key=value text: one pair per line, '#' starts a comment,
/// blank lines ignored, keys dotted as in the experiment_config field docs.
/// Unknown keys and malformed values throw config_error naming the key.
experiment_config parse_config(const std::string& text);

/// Applies one key=value pair (the config-file grammar) to an existing
/// config — the CLI uses this to let flags override file values.
void set_config_key(experiment_config& cfg, const std::string& key,
                    const std::string& value);

/// One experiment cell: a (dx, splits) pair. Optional fields are empty when
/// the cell's algorithm does not produce them or the cell failed; a failed
/// cell carries the reason in `error` and keeps its place in the sweep.
struct report_row {
    double dx = 0.0;
    std::vector<int> splits;
    std::optional<long long> classic_iters;
    std::optional<double> classic_time_s;
    std::optional<long long> pha_outer_iters;
    std::optional<double> par_time_max_s;   ///< critical-path parallel time, summed over outers
    std::optional<long long> par_iters_max; ///< max subdomain iterations per outer, summed
    std::optional<double> seq_time_s;
    std::optional<long long> seq_iters;
    std::optional<double> total_time_s;
    std::optional<double> linf_error; ///< sup-norm error vs. the exact solution, when known
    std::string error;

    bool operator==(const report_row&) const = default;
};

/// One solved cell with its full value field, for dumping and inspection.
struct cell_result {
    report_row row;
    grid g;
    std::vector<double> values; ///< per node; empty when the cell failed
    double build_time_s = 0.0;  ///< problem construction + decomposition (not solving)
};

/// Builds and solves a single (dx, splits) cell under cfg's algorithm.
/// classic fills the classic_* columns; pha and maxmin fill the pha-side
/// columns (pha additionally runs classic on the same grid for comparison
/// unless `with_classic` is false). Failures propagate; run_experiment is
/// the layer that captures them per row.
cell_result run_cell(const experiment_config& cfg, double dx,
                     std::span<const int> splits, bool with_classic = true);

/// Runs the full sweep: one row per (dx, splits) pair, in dx-major order.
/// For algorithm=pha the classic comparison runs once per dx and its columns
/// are repeated across that dx's rows. Cells that fail keep their row with
/// `error` set; the sweep continues. `on_cell` (when given) observes every
/// finished row together with its construction time.
std::vector<report_row> run_experiment(
    const experiment_config& cfg,
    const std::function<void(const report_row&, double build_time_s)>& on_cell = {});

/// Serializes rows. csv: fixed header
///   dx,splits,classic_iters,classic_time_s,pha_outer_iters,par_time_max_s,
///   par_iters_max,seq_time_s,seq_iters,total_time_s,linf_error
/// with empty fields for missing values, splits as axis counts joined by
/// 'x', doubles at 17 significant digits; a failed row is followed by a
/// '# error: ...' comment line. aligned_text: padded columns for reading.
std::string emit_report(const std::vector<report_row>& rows, report_format format);

/// Plain-text grid function: comment header '# dims counts lo hi', then one
/// line per node in flat (row-major) order — coordinates then value, space
/// separated, 17 significant digits. Throws io_error naming the path.
void dump_grid_function(const grid& g, std::span<const double> values,
                        const std::string& path);

} // namespace hjb
