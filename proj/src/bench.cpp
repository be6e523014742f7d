#include "hjb/bench.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>

#include "hjb/errors.hpp"
#include "hjb/maxmin.hpp"
#include "hjb/policy.hpp"

namespace hjb {

namespace {

using clock_type = std::chrono::steady_clock;

double seconds_since(clock_type::time_point t0) {
    return std::chrono::duration<double>(clock_type::now() - t0).count();
}

std::string trim(std::string_view s) {
    auto issp = [](unsigned char c) { return std::isspace(c) != 0; };
    while (!s.empty() && issp(s.front())) s.remove_prefix(1);
    while (!s.empty() && issp(s.back())) s.remove_suffix(1);
    return std::string(s);
}

/// Comma-separated items, trimmed; empty items dropped so "a, b," is lenient.
std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= s.size()) {
        const std::size_t comma = s.find(',', start);
        const std::size_t end = comma == std::string::npos ? s.size() : comma;
        const std::string item = trim(std::string_view(s).substr(start, end - start));
        if (!item.empty()) out.push_back(item);
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

double parse_double_value(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const double v = std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw config_error(key + ": not a number: '" + value + "'");
    }
}

int parse_int_value(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const long v = std::stol(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return static_cast<int>(v);
    } catch (const std::exception&) {
        throw config_error(key + ": not an integer: '" + value + "'");
    }
}

bool parse_bool_value(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1" || value == "yes") return true;
    if (value == "false" || value == "0" || value == "no") return false;
    throw config_error(key + ": not a boolean: '" + value + "'");
}

/// "2x2" -> {2,2}; a bare number stays one entry (broadcast at run time).
std::vector<int> parse_splits_token(const std::string& key, const std::string& token) {
    std::vector<int> out;
    std::size_t start = 0;
    while (start <= token.size()) {
        const std::size_t x = token.find('x', start);
        const std::size_t end = x == std::string::npos ? token.size() : x;
        out.push_back(parse_int_value(key, token.substr(start, end - start)));
        if (x == std::string::npos) break;
        start = x + 1;
    }
    if (out.empty() || static_cast<int>(out.size()) > max_dim)
        throw config_error(key + ": bad splits entry '" + token + "'");
    return out;
}

std::string fmt_g(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string splits_str(const std::vector<int>& s) {
    std::string out;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (i) out += 'x';
        out += std::to_string(s[i]);
    }
    return out;
}

std::vector<int> broadcast_splits(std::span<const int> sp, int dim) {
    std::vector<int> v(sp.begin(), sp.end());
    if (v.size() == 1 && dim > 1) v.assign(dim, v[0]);
    return v;
}

builtin_problem_result build_problem(const experiment_config& cfg, double dx) {
    problem_options opt;
    opt.control_count = cfg.control_count;
    opt.dubins_speed = cfg.dubins_speed;
    auto pb = builtin_problem(cfg.problem_name, dx, opt);
    if (cfg.scheme == scheme_override::upwind)
        pb.spec.scheme = scheme_kind::upwind;
    else if (cfg.scheme == scheme_override::semi_lagrangian)
        pb.spec.scheme = scheme_kind::semi_lagrangian;
    return pb;
}

std::optional<double> oracle_error(const builtin_problem_result& pb,
                                   std::span<const double> values) {
    if (!pb.oracle || values.empty()) return std::nullopt;
    double e = 0.0;
    for (int node = 0; node < pb.spec.g.node_count(); ++node)
        e = std::max(e, std::fabs(values[node] - pb.oracle(pb.spec.g.coord(node))));
    return e;
}

std::vector<double> embed_full(const problem_spec& spec, const fixed_values& fixed,
                               std::span<const double> interior_values) {
    std::vector<double> v(spec.g.node_count(), 0.0);
    for (int node = 0; node < spec.g.node_count(); ++node)
        if (fixed.has(node)) v[node] = fixed[node];
    const auto& in = spec.g.interior_nodes();
    for (std::size_t i = 0; i < in.size(); ++i) v[in[i]] = interior_values[i];
    return v;
}

pha_config make_pha_config(const experiment_config& cfg) {
    pha_config pc;
    pc.epsilon = cfg.epsilon;
    pc.max_outer = cfg.max_outer;
    pc.max_inner = cfg.max_inner;
    pc.worker_count = cfg.worker_count;
    pc.init = cfg.init;
    pc.coarse_points = cfg.coarse_points;
    pc.interface_recursive = cfg.interface_recursive;
    return pc;
}

void fill_outer_columns(report_row& row, const solve_report& rep) {
    row.pha_outer_iters = rep.outer_iterations;
    double par_t = 0.0, seq_t = 0.0;
    long long par_i = 0, seq_i = 0;
    for (const auto& s : rep.outer) {
        par_t += s.par_time_s;
        par_i += s.par_iters_max;
        seq_t += s.seq_time_s;
        seq_i += s.seq_iters;
    }
    row.par_time_max_s = par_t;
    row.par_iters_max = par_i;
    row.seq_time_s = seq_t;
    row.seq_iters = seq_i;
    row.total_time_s = rep.total_time_s;
}

std::string sanitize_message(std::string msg) {
    for (char& c : msg)
        if (c == '\n' || c == '\r') c = ' ';
    return msg;
}

} // namespace

void set_config_key(experiment_config& cfg, const std::string& key,
                    const std::string& value) {
    if (key == "problem.name") {
        cfg.problem_name = value;
    } else if (key == "problem.controls") {
        cfg.control_count = parse_int_value(key, value);
    } else if (key == "problem.dubins_speed") {
        cfg.dubins_speed = parse_double_value(key, value);
    } else if (key == "problem.scheme") {
        if (value == "default")
            cfg.scheme = scheme_override::problem_default;
        else if (value == "upwind")
            cfg.scheme = scheme_override::upwind;
        else if (value == "semi_lagrangian")
            cfg.scheme = scheme_override::semi_lagrangian;
        else
            throw config_error("problem.scheme: unknown scheme '" + value + "'");
    } else if (key == "sweep.dx") {
        cfg.dx_list.clear();
        for (const auto& item : split_list(value))
            cfg.dx_list.push_back(parse_double_value(key, item));
    } else if (key == "sweep.splits") {
        cfg.splits_list.clear();
        for (const auto& item : split_list(value))
            cfg.splits_list.push_back(parse_splits_token(key, item));
    } else if (key == "solver.algorithm") {
        if (value == "classic")
            cfg.algorithm = algorithm_kind::classic;
        else if (value == "pha")
            cfg.algorithm = algorithm_kind::pha;
        else if (value == "maxmin")
            cfg.algorithm = algorithm_kind::maxmin;
        else
            throw config_error("solver.algorithm: unknown algorithm '" + value + "'");
    } else if (key == "solver.init") {
        if (value == "zero")
            cfg.init = init_mode::zero;
        else if (value == "coarse")
            cfg.init = init_mode::coarse;
        else
            throw config_error("solver.init: unknown init mode '" + value + "'");
    } else if (key == "solver.coarse_points") {
        cfg.coarse_points = parse_int_value(key, value);
    } else if (key == "solver.eps") {
        cfg.epsilon = parse_double_value(key, value);
    } else if (key == "solver.max_outer") {
        cfg.max_outer = parse_int_value(key, value);
    } else if (key == "solver.max_inner") {
        cfg.max_inner = parse_int_value(key, value);
    } else if (key == "solver.workers") {
        cfg.worker_count = parse_int_value(key, value);
    } else if (key == "solver.recursive") {
        cfg.interface_recursive = parse_bool_value(key, value);
    } else if (key == "output.format") {
        if (value == "csv")
            cfg.format = report_format::csv;
        else if (value == "aligned_text")
            cfg.format = report_format::aligned_text;
        else
            throw config_error("output.format: unknown format '" + value + "'");
    } else if (key == "output.csv") {
        cfg.output_csv = value;
    } else if (key == "output.dump") {
        cfg.output_dump = value;
    } else {
        throw config_error("unknown config key: '" + key + "'");
    }
}

experiment_config parse_config(const std::string& text) {
    experiment_config cfg;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        const std::string stripped = trim(line);
        if (stripped.empty()) continue;
        const auto eq = stripped.find('=');
        if (eq == std::string::npos)
            throw config_error("line " + std::to_string(lineno) +
                               ": expected key=value, got '" + stripped + "'");
        const std::string key = trim(std::string_view(stripped).substr(0, eq));
        const std::string value = trim(std::string_view(stripped).substr(eq + 1));
        if (key.empty())
            throw config_error("line " + std::to_string(lineno) + ": empty key");
        set_config_key(cfg, key, value);
    }
    return cfg;
}

void experiment_config::validate() const {
    for (const double dx : dx_list) {
        if (!(dx > 0.0) || !std::isfinite(dx))
            throw config_error("sweep.dx: spacing must be positive, got " + fmt_g(dx));
        const double cells = 2.0 / dx; // every catalog problem lives on [-1,1] axes
        if (std::fabs(cells - std::round(cells)) > 1e-9 * std::max(1.0, cells))
            throw config_error("sweep.dx: " + fmt_g(dx) + " does not tile [-1,1]");
    }
    for (const auto& sp : splits_list)
        for (const int n : sp)
            if (n < 1)
                throw config_error("sweep.splits: split counts must be >= 1, got " +
                                   std::to_string(n));
    if (control_count < 0)
        throw config_error("problem.controls: must be >= 0");
    if (!(dubins_speed > 0.0) || !std::isfinite(dubins_speed))
        throw config_error("problem.dubins_speed: must be positive and finite");
    if (!(epsilon >= 0.0) || !std::isfinite(epsilon))
        throw config_error("solver.eps: must be >= 0 and finite");
    if (max_outer < 1) throw config_error("solver.max_outer: must be >= 1");
    if (max_inner < 1) throw config_error("solver.max_inner: must be >= 1");
    if (worker_count < 1) throw config_error("solver.workers: must be >= 1");
    if (coarse_points < 2)
        throw config_error("solver.coarse_points: need at least 2 points per axis");
}

cell_result run_cell(const experiment_config& cfg, double dx, std::span<const int> splits,
                     bool with_classic) {
    cell_result out;
    const auto t_build = clock_type::now();
    auto pb = build_problem(cfg, dx);
    out.g = pb.spec.g;
    out.row.dx = dx;
    out.row.splits = broadcast_splits(splits, pb.spec.g.dim());
    out.build_time_s = seconds_since(t_build);

    const bool run_classic =
        cfg.algorithm == algorithm_kind::classic ||
        (cfg.algorithm == algorithm_kind::pha && with_classic);
    if (run_classic) {
        const auto& unknowns = pb.spec.g.interior_nodes();
        const auto fixed = fixed_values::dirichlet(pb.spec);
        howard_options ho;
        ho.max_iters = cfg.max_inner;
        const auto t = clock_type::now();
        const auto hr = howard_solve(pb.spec, unknowns, fixed, ho);
        out.row.classic_time_s = seconds_since(t);
        out.row.classic_iters = hr.iterations;
        if (cfg.algorithm == algorithm_kind::classic)
            out.values = embed_full(pb.spec, fixed, hr.values);
    }

    if (cfg.algorithm != algorithm_kind::classic) {
        const auto t_dec = clock_type::now();
        const auto dec = decompose(pb.spec.g, out.row.splits);
        out.build_time_s += seconds_since(t_dec);
        const auto pc = make_pha_config(cfg);
        const solve_report rep = cfg.algorithm == algorithm_kind::pha
                                     ? pha_solve(pb.spec, dec, pc)
                                     : maxmin_solve(make_game(pb), dec, pc);
        fill_outer_columns(out.row, rep);
        out.values = rep.values;
    }

    out.row.linf_error = oracle_error(pb, out.values);
    return out;
}

std::vector<report_row> run_experiment(
    const experiment_config& cfg,
    const std::function<void(const report_row&, double build_time_s)>& on_cell) {
    std::vector<report_row> rows;
    const std::vector<std::vector<int>> splits_norm =
        cfg.splits_list.empty() ? std::vector<std::vector<int>>{{1}} : cfg.splits_list;
    for (const double dx : cfg.dx_list) {
        // One classic run per dx: reused verbatim for classic rows and as the
        // comparison columns of that dx's pha rows.
        std::optional<cell_result> classic_once;
        for (const auto& sp : splits_norm) {
            report_row row;
            row.dx = dx;
            row.splits = sp;
            double build_s = 0.0;
            try {
                if (cfg.algorithm != algorithm_kind::maxmin && !classic_once) {
                    experiment_config ccfg = cfg;
                    ccfg.algorithm = algorithm_kind::classic;
                    classic_once = run_cell(ccfg, dx, sp, false);
                }
                if (cfg.algorithm == algorithm_kind::classic) {
                    row = classic_once->row;
                    row.splits = broadcast_splits(sp, classic_once->g.dim());
                    build_s = classic_once->build_time_s;
                } else {
                    auto cell = run_cell(cfg, dx, sp, false);
                    row = cell.row;
                    build_s = cell.build_time_s;
                    if (cfg.algorithm == algorithm_kind::pha) {
                        row.classic_iters = classic_once->row.classic_iters;
                        row.classic_time_s = classic_once->row.classic_time_s;
                    }
                }
            } catch (const error& e) {
                row.error = e.what();
            }
            rows.push_back(row);
            if (on_cell) on_cell(rows.back(), build_s);
        }
    }
    return rows;
}

namespace {

constexpr const char* csv_header =
    "dx,splits,classic_iters,classic_time_s,pha_outer_iters,par_time_max_s,"
    "par_iters_max,seq_time_s,seq_iters,total_time_s,linf_error";

std::string opt_ll(const std::optional<long long>& v) {
    return v ? std::to_string(*v) : std::string();
}

std::string opt_g(const std::optional<double>& v) { return v ? fmt_g(*v) : std::string(); }

std::vector<std::string> row_fields(const report_row& r) {
    return {fmt_g(r.dx),           splits_str(r.splits),  opt_ll(r.classic_iters),
            opt_g(r.classic_time_s), opt_ll(r.pha_outer_iters), opt_g(r.par_time_max_s),
            opt_ll(r.par_iters_max), opt_g(r.seq_time_s),  opt_ll(r.seq_iters),
            opt_g(r.total_time_s),   opt_g(r.linf_error)};
}

std::string emit_csv(const std::vector<report_row>& rows) {
    std::string out = csv_header;
    out += '\n';
    for (const auto& r : rows) {
        const auto fields = row_fields(r);
        for (std::size_t i = 0; i < fields.size(); ++i) {
            if (i) out += ',';
            out += fields[i];
        }
        out += '\n';
        if (!r.error.empty()) out += "# error: " + sanitize_message(r.error) + '\n';
    }
    return out;
}

std::string fmt_short(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

std::string emit_aligned(const std::vector<report_row>& rows) {
    const std::vector<std::string> header = {"dx",         "splits",     "Classic it.",
                                             "Classic t.", "outer",      "t.(par.p.)",
                                             "it.(par.)",  "t.(it.p.)",  "it.(it.p.)",
                                             "Total t.",   "Linf err."};
    std::vector<std::vector<std::string>> table{header};
    std::vector<std::string> notes(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& r = rows[i];
        auto cell_d = [](const std::optional<double>& v) {
            return v ? fmt_short(*v) : std::string("-");
        };
        auto cell_i = [](const std::optional<long long>& v) {
            return v ? std::to_string(*v) : std::string("-");
        };
        table.push_back({fmt_short(r.dx), splits_str(r.splits), cell_i(r.classic_iters),
                         cell_d(r.classic_time_s), cell_i(r.pha_outer_iters),
                         cell_d(r.par_time_max_s), cell_i(r.par_iters_max),
                         cell_d(r.seq_time_s), cell_i(r.seq_iters), cell_d(r.total_time_s),
                         cell_d(r.linf_error)});
        if (!r.error.empty()) notes[i] = "  # error: " + sanitize_message(r.error);
    }
    std::vector<std::size_t> width(header.size(), 0);
    for (const auto& row : table)
        for (std::size_t c = 0; c < row.size(); ++c)
            width[c] = std::max(width[c], row[c].size());
    std::string out;
    for (std::size_t ri = 0; ri < table.size(); ++ri) {
        for (std::size_t c = 0; c < table[ri].size(); ++c) {
            if (c) out += "  ";
            out += table[ri][c];
            out.append(width[c] - table[ri][c].size(), ' ');
        }
        while (!out.empty() && out.back() == ' ') out.pop_back();
        if (ri > 0) out += notes[ri - 1];
        out += '\n';
    }
    return out;
}

} // namespace

std::string emit_report(const std::vector<report_row>& rows, report_format format) {
    return format == report_format::csv ? emit_csv(rows) : emit_aligned(rows);
}

void dump_grid_function(const grid& g, std::span<const double> values,
                        const std::string& path) {
    if (static_cast<int>(values.size()) != g.node_count())
        throw config_error("dump: got " + std::to_string(values.size()) +
                           " values for " + std::to_string(g.node_count()) + " nodes");
    std::ofstream out(path);
    if (!out) throw io_error("cannot open for writing: " + path);
    out << "# " << g.dim();
    for (int a = 0; a < g.dim(); ++a) out << ' ' << g.count(a);
    for (int a = 0; a < g.dim(); ++a) out << ' ' << fmt_g(g.lo(a));
    for (int a = 0; a < g.dim(); ++a) out << ' ' << fmt_g(g.hi(a));
    out << '\n';
    for (int node = 0; node < g.node_count(); ++node) {
        const point c = g.coord(node);
        for (int a = 0; a < g.dim(); ++a) out << fmt_g(c[a]) << ' ';
        out << fmt_g(values[node]) << '\n';
    }
    out.flush();
    if (!out) throw io_error("write failed: " + path);
}

} // namespace hjb
