#ifndef AVESOR_TOOLS_CLI_APP_HPP
#define AVESOR_TOOLS_CLI_APP_HPP

// The avesor command-line tool.  run_cli() is the whole program; main()
// only forwards argv and the standard streams.
//
// Exit codes: 0 success, 1 solve did not converge or a check failed,
// 2 usage or input error, 3 numerical failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "avesor/avesor.hpp"

namespace avesor::cli {

inline constexpr int exit_ok = 0;
inline constexpr int exit_not_converged = 1;
inline constexpr int exit_check_failed = 1;
inline constexpr int exit_usage = 2;
inline constexpr int exit_numerical = 3;

inline constexpr double relaxed_tol = 1e-6;

struct usage_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Tabular output.

using Cell = std::variant<std::monostate, long long, double, std::string, bool>;

struct Table {
    std::string command;
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
    std::vector<std::string> notes;
};

enum class Format { table, csv, json };

inline std::string format_double(double v, const char* fmt)
{
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[48];
    std::snprintf(buf, sizeof buf, fmt, v);
    return buf;
}

inline std::string cell_text(const Cell& c, bool exact)
{
    return std::visit(
        [&](const auto& v) -> std::string {
            using V = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<V, std::monostate>) return exact ? "" : "-";
            else if constexpr (std::is_same_v<V, long long>) return std::to_string(v);
            else if constexpr (std::is_same_v<V, double>) return format_double(v, exact ? "%.17g" : "%.6g");
            else if constexpr (std::is_same_v<V, bool>) return v ? "true" : "false";
            else return v;
        },
        c);
}

inline std::string csv_field(const std::string& s)
{
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    return out + '"';
}

inline void write_table(std::ostream& out, const Table& t)
{
    std::vector<std::size_t> width(t.columns.size());
    for (std::size_t j = 0; j < t.columns.size(); ++j) width[j] = t.columns[j].size();
    std::vector<std::vector<std::string>> text;
    for (const auto& row : t.rows) {
        auto& r = text.emplace_back();
        for (std::size_t j = 0; j < row.size(); ++j) {
            r.push_back(cell_text(row[j], false));
            width[j] = std::max(width[j], r.back().size());
        }
    }
    const auto line = [&](const std::vector<std::string>& cells) {
        for (std::size_t j = 0; j < cells.size(); ++j) {
            if (j) out << "  ";
            out << cells[j] << std::string(width[j] - cells[j].size(), ' ');
        }
        out << '\n';
    };
    line(t.columns);
    for (const auto& r : text) line(r);
    for (const auto& n : t.notes) out << "# " << n << '\n';
}

inline void write_csv(std::ostream& out, const Table& t)
{
    for (std::size_t j = 0; j < t.columns.size(); ++j) out << (j ? "," : "") << csv_field(t.columns[j]);
    out << '\n';
    for (const auto& row : t.rows) {
        for (std::size_t j = 0; j < row.size(); ++j) out << (j ? "," : "") << csv_field(cell_text(row[j], true));
        out << '\n';
    }
}

inline nlohmann::json to_json(const Table& t)
{
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : t.rows) {
        nlohmann::json obj = nlohmann::json::object();
        for (std::size_t j = 0; j < row.size(); ++j) {
            obj[t.columns[j]] = std::visit(
                [](const auto& v) -> nlohmann::json {
                    using V = std::decay_t<decltype(v)>;
                    if constexpr (std::is_same_v<V, std::monostate>) return nullptr;
                    else if constexpr (std::is_same_v<V, double>) {
                        if (!std::isfinite(v)) return nullptr;
                        return v;
                    } else return v;
                },
                row[j]);
        }
        rows.push_back(std::move(obj));
    }
    return {{"command", t.command}, {"columns", t.columns}, {"rows", rows}, {"notes", t.notes}};
}

inline void emit(const Table& t, Format f, const std::string& out_path, std::ostream& out)
{
    std::ofstream file;
    std::ostream* os = &out;
    if (!out_path.empty()) {
        file.open(out_path);
        if (!file) throw error(errc::io_error, "cannot write '" + out_path + "'");
        os = &file;
    }
    switch (f) {
        case Format::table: write_table(*os, t); break;
        case Format::csv: write_csv(*os, t); break;
        case Format::json: *os << to_json(t).dump(2) << '\n'; break;
    }
}

// ---------------------------------------------------------------------------
// Argument parsing helpers.

inline std::vector<std::string> split(const std::string& s, char sep)
{
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep)) out.push_back(cur);
    if (!s.empty() && s.back() == sep) out.emplace_back();
    return out;
}

inline double parse_double(const std::string& s, const std::string& what)
{
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::logic_error&) {
        throw usage_error("invalid " + what + " '" + s + "'");
    }
    if (used != s.size() || !std::isfinite(v)) throw usage_error("invalid " + what + " '" + s + "'");
    return v;
}

inline long long parse_int(const std::string& s, const std::string& what)
{
    std::size_t used = 0;
    long long v = 0;
    try {
        v = std::stoll(s, &used);
    } catch (const std::logic_error&) {
        throw usage_error("invalid " + what + " '" + s + "'");
    }
    if (used != s.size()) throw usage_error("invalid " + what + " '" + s + "'");
    return v;
}

/// "8,16,32", "1000..5000" (step = lo) or "1000..5000/500".
inline std::vector<int> parse_sizes(const std::string& s)
{
    std::vector<int> out;
    const auto dots = s.find("..");
    if (dots != std::string::npos) {
        const std::string rest = s.substr(dots + 2);
        const auto slash = rest.find('/');
        const long long lo = parse_int(s.substr(0, dots), "size");
        const long long hi = parse_int(rest.substr(0, slash), "size");
        const long long step = slash == std::string::npos ? lo : parse_int(rest.substr(slash + 1), "step");
        if (lo < 1 || step < 1 || hi < lo) throw usage_error("invalid size range '" + s + "'");
        for (long long v = lo; v <= hi; v += step) out.push_back(static_cast<int>(v));
        return out;
    }
    for (const auto& part : split(s, ',')) {
        const long long v = parse_int(part, "size");
        if (v < 1 || v > 1'000'000'000) throw usage_error("invalid size '" + part + "'");
        out.push_back(static_cast<int>(v));
    }
    return out;
}

inline std::vector<double> parse_nu_list(const std::string& s)
{
    std::vector<double> out;
    for (const auto& part : split(s, ',')) {
        const double v = parse_double(part, "nu");
        if (!(v > 0.0 && v < 1.0)) throw usage_error("nu must lie in (0, 1), got " + part);
        out.push_back(v);
    }
    if (out.empty()) throw usage_error("empty nu list");
    return out;
}

inline GridSpec parse_grid(const std::string& s)
{
    try {
        return GridSpec::parse(s);
    } catch (const error& e) {
        throw usage_error(e.what());
    }
}

/// A problem named on the command line, built lazily.
struct ProblemSpec {
    enum class Kind { ex41, ex42, mm } kind;
    int size = 0;
    std::string matrix_path;
    std::string b_path;

    std::string label() const
    {
        switch (kind) {
            case Kind::ex41: return "ex41:" + std::to_string(size);
            case Kind::ex42: return "ex42:" + std::to_string(size);
            case Kind::mm: return "mm:" + matrix_path;
        }
        return {};
    }

    AveProblem build() const
    {
        switch (kind) {
            case Kind::ex41: return gen_ex41(size);
            case Kind::ex42: return gen_ex42(size);
            case Kind::mm: {
                AveProblem p = load_problem(matrix_path, b_path);
                p.label = label();
                return p;
            }
        }
        throw usage_error("unknown problem kind");
    }
};

/// ex41:<sizes> | ex42:<sizes> | mm:<path>[,<bpath>]
inline std::vector<ProblemSpec> parse_problem(const std::string& s)
{
    const auto colon = s.find(':');
    if (colon == std::string::npos) throw usage_error("problem must look like ex41:n, ex42:m or mm:path, got '" + s + "'");
    const std::string kind = s.substr(0, colon), arg = s.substr(colon + 1);
    if (arg.empty()) throw usage_error("empty problem argument in '" + s + "'");
    std::vector<ProblemSpec> out;
    if (kind == "ex41" || kind == "ex42") {
        const auto k = kind == "ex41" ? ProblemSpec::Kind::ex41 : ProblemSpec::Kind::ex42;
        for (int n : parse_sizes(arg)) {
            if (n < 2) throw usage_error(kind + " size must be >= 2");
            out.push_back({k, n, {}, {}});
        }
    } else if (kind == "mm") {
        const auto comma = arg.find(',');
        out.push_back({ProblemSpec::Kind::mm, 0, arg.substr(0, comma),
                       comma == std::string::npos ? std::string{} : arg.substr(comma + 1)});
    } else {
        throw usage_error("unknown problem kind '" + kind + "'");
    }
    return out;
}

inline std::vector<ProblemSpec> parse_problems(const std::vector<std::string>& specs)
{
    std::vector<ProblemSpec> out;
    for (const auto& s : specs) {
        auto part = parse_problem(s);
        out.insert(out.end(), part.begin(), part.end());
    }
    if (out.empty()) throw usage_error("no problems given");
    return out;
}

struct MethodSpec {
    enum class Kind { sorlo, sorlaopt, sorlopt, sorlno, newton, sor } kind;
    double omega = 0.0; ///< only for sor:omega

    std::string name() const
    {
        switch (kind) {
            case Kind::sorlo: return "SORLo";
            case Kind::sorlaopt: return "SORLaopt";
            case Kind::sorlopt: return "SORLopt";
            case Kind::sorlno: return "SORLno";
            case Kind::newton: return "NT";
            case Kind::sor: return "SOR(" + format_double(omega, "%.6g") + ")";
        }
        return {};
    }
};

inline MethodSpec parse_method(const std::string& s)
{
    using K = MethodSpec::Kind;
    static const std::map<std::string, K> names{{"sorlo", K::sorlo},     {"sorlaopt", K::sorlaopt},
                                                {"sorlopt", K::sorlopt}, {"sorlno", K::sorlno},
                                                {"newton", K::newton},   {"nt", K::newton}};
    if (auto it = names.find(s); it != names.end()) return {it->second, 0.0};
    if (s.rfind("sor:", 0) == 0) {
        const double w = parse_double(s.substr(4), "omega");
        if (!(w > 0.0 && w < 2.0)) throw usage_error("omega must lie in (0, 2), got " + s.substr(4));
        return {K::sor, w};
    }
    throw usage_error("unknown method '" + s + "'");
}

inline std::vector<MethodSpec> parse_methods(const std::string& s)
{
    std::vector<MethodSpec> out;
    for (const auto& part : split(s, ',')) out.push_back(parse_method(part));
    if (out.empty()) throw usage_error("no methods given");
    return out;
}

// ---------------------------------------------------------------------------
// Shared options and the per-problem context.

struct CommonOptions {
    std::string format = "table";
    std::string out_path;
    std::optional<double> tol;
    bool relaxed = false;
    int max_iter = 100;
    std::optional<double> nu;
    std::optional<double> rho;
    std::string x0_path;
    std::string grid = "0.01:0.01:1.99";
    unsigned workers = 1;

    Format parsed_format() const
    {
        if (format == "table") return Format::table;
        if (format == "csv") return Format::csv;
        if (format == "json") return Format::json;
        throw usage_error("unknown format '" + format + "'");
    }

    double resolved_tol() const
    {
        if (tol && relaxed) throw usage_error("--tol and --relaxed are mutually exclusive");
        if (relaxed) return relaxed_tol;
        const double t = tol.value_or(1e-8);
        if (!(t > 0.0)) throw usage_error("--tol must be positive");
        return t;
    }

    void validate_scalars() const
    {
        if (nu && !(*nu > 0.0 && *nu < 1.0)) throw usage_error("--nu must lie in (0, 1)");
        if (rho && !(*rho >= 0.0 && *rho < 1.0)) throw usage_error("--rho must lie in [0, 1)");
        if (max_iter < 1) throw usage_error("--max-iter must be >= 1");
    }

    SolverSettings settings(int n) const
    {
        SolverSettings s;
        s.tol = resolved_tol();
        s.max_iter = max_iter;
        if (!x0_path.empty()) {
            const Vector x0 = load_vector(x0_path);
            if (x0.size() != n) throw usage_error("--x0 length does not match the problem order");
            s.x0 = x0;
            s.y0 = x0;
        }
        return s;
    }
};

/// A built problem with lazily resolved nu and rho.  nu comes from --nu, then
/// the problem's cached value, then inverse power iteration.
struct Context {
    AveProblem problem;
    const CommonOptions* opts;
    std::optional<SpectralResult> estimate;

    const SpectralResult& spectral()
    {
        if (!estimate) {
            estimate = nu_estimate(problem.a);
            if (!estimate->converged) {
                throw error(errc::numerical_breakdown, "nu estimate did not converge for " + problem.label);
            }
        }
        return *estimate;
    }

    double nu()
    {
        if (opts->nu) return *opts->nu;
        if (problem.nu) return *problem.nu;
        const double v = spectral().nu;
        if (!(v > 0.0 && v < 1.0)) {
            throw error(errc::domain_error,
                        problem.label + ": estimated nu = " + format_double(v, "%.6g") + " is outside (0, 1)");
        }
        problem.nu = v;
        return v;
    }

    /// Spectral radius of A^{-1}; equals nu for SPD matrices.  Empty when it
    /// cannot be determined without --rho.
    std::optional<double> rho()
    {
        if (opts->rho) return *opts->rho;
        if (problem.a.spd_hint()) return nu();
        return std::nullopt;
    }
};

inline Context make_context(const ProblemSpec& spec, const CommonOptions& opts)
{
    return Context{spec.build(), &opts, std::nullopt};
}

struct MethodRun {
    double omega = std::numeric_limits<double>::quiet_NaN();
    SolveReport report;
    double seconds = 0.0;
};

inline MethodRun run_method(Context& ctx, const MethodSpec& m, const SolverSettings& s, const std::vector<double>& grid,
                            unsigned workers)
{
    using K = MethodSpec::Kind;
    const auto t0 = std::chrono::steady_clock::now();
    MethodRun run;
    SolverSettings st = s;
    switch (m.kind) {
        case K::newton:
            run.report = generalized_newton(ctx.problem, st);
            break;
        case K::sorlno: {
            auto best = sweep_optimal(ctx.problem, grid, st, workers);
            run.omega = best.omega;
            run.report = std::move(best.report);
            break;
        }
        default: {
            if (m.kind == K::sor) run.omega = m.omega;
            else if (m.kind == K::sorlaopt) run.omega = omega_aopt(ctx.nu());
            else if (m.kind == K::sorlopt) run.omega = omega_opt(ctx.nu());
            else {
                const auto rho = ctx.rho();
                if (!rho) throw usage_error(ctx.problem.label + ": SORLo on a non-SPD matrix needs --rho");
                run.omega = omega_guo(*rho);
            }
            st.omega = run.omega;
            run.report = sor_like(ctx.problem, st);
        }
    }
    run.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return run;
}

inline Cell opt_cell(const std::optional<double>& v)
{
    if (v) return *v;
    return std::monostate{};
}

// ---------------------------------------------------------------------------
// Commands.

inline Table cmd_solve(const std::vector<ProblemSpec>& problems, const MethodSpec& method, const CommonOptions& o,
                       bool history, int& status)
{
    const auto grid = parse_grid(o.grid).points();
    Table t;
    t.command = "solve";
    if (history) t.columns = {"problem", "k", "residual", "error_norm"};
    else t.columns = {"problem", "n", "method", "omega", "nu", "iterations", "residual", "converged", "factorizations",
                      "time_s"};
    status = exit_ok;
    for (const auto& spec : problems) {
        Context ctx = make_context(spec, o);
        const auto run = run_method(ctx, method, o.settings(ctx.problem.n()), grid, o.workers);
        const auto& r = run.report;
        if (!r.converged) status = exit_not_converged;
        if (history) {
            for (std::size_t k = 0; k < r.residual_history.size(); ++k) {
                Cell e = std::monostate{};
                if (k < r.error_norm_history.size()) e = r.error_norm_history[k];
                t.rows.push_back({ctx.problem.label, static_cast<long long>(k), r.residual_history[k], e});
            }
            continue;
        }
        std::optional<double> nu;
        if (o.nu || ctx.problem.nu) nu = ctx.nu();
        t.rows.push_back({ctx.problem.label, static_cast<long long>(ctx.problem.n()), method.name(),
                          std::isnan(run.omega) ? Cell{} : Cell{run.omega}, opt_cell(nu),
                          static_cast<long long>(r.iterations), r.final_residual(), r.converged,
                          static_cast<long long>(r.factorizations), run.seconds});
    }
    if (!history) t.notes.push_back("time_s is wall-clock on this machine and is not comparable across machines");
    return t;
}

inline std::vector<std::string> bundle_columns()
{
    return {"source", "nu", "rho", "omega_o", "omega_no", "omega_aopt", "omega_opt", "tnorm_opt", "eta_over_tau",
            "region", "region_lo", "region_hi", "omega_o_in_region"};
}

inline std::vector<Cell> bundle_row(const std::string& source, double nu, std::optional<double> rho,
                                    std::optional<double> omega_no)
{
    const auto p = param_bundle(nu, rho.value_or(nu));
    Cell wo = std::monostate{}, in = std::monostate{}, rc = std::monostate{};
    if (rho) {
        wo = p.omega_o;
        in = p.omega_o_in_region;
        rc = *rho;
    }
    return {source, nu, rc, wo, opt_cell(omega_no), p.omega_aopt, p.omega_opt, p.tnorm_at_opt, p.eta_ratio_at_aopt,
            std::string(to_string(p.region.kind)), p.region.lo, p.region.hi, in};
}

inline Table cmd_params(const std::vector<ProblemSpec>& problems, const std::optional<std::string>& nu_list,
                        const CommonOptions& o, bool with_sweep)
{
    Table t;
    t.command = "params";
    t.columns = bundle_columns();
    if (nu_list) {
        for (double nu : parse_nu_list(*nu_list)) {
            t.rows.push_back(bundle_row("nu=" + format_double(nu, "%.6g"), nu, o.rho.value_or(nu), std::nullopt));
        }
        return t;
    }
    const auto grid = parse_grid(o.grid).points();
    for (const auto& spec : problems) {
        Context ctx = make_context(spec, o);
        const double nu = ctx.nu();
        std::optional<double> wno;
        if (with_sweep) wno = sweep_optimal(ctx.problem, grid, o.settings(ctx.problem.n()), o.workers).omega;
        t.rows.push_back(bundle_row(ctx.problem.label, nu, ctx.rho(), wno));
    }
    if (!with_sweep) t.notes.push_back("omega_no is filled only with --with-sweep");
    return t;
}

inline Table cmd_region(const std::vector<ProblemSpec>& problems, const std::optional<std::string>& nu_list,
                        const CommonOptions& o)
{
    Table t;
    t.command = "region";
    t.columns = {"source", "nu", "region", "lo", "hi"};
    const auto row = [&](const std::string& src, double nu) {
        const auto r = convergent_region(nu);
        t.rows.push_back({src, nu, std::string(to_string(r.kind)), r.lo, r.hi});
    };
    if (nu_list) {
        for (double nu : parse_nu_list(*nu_list)) row("nu=" + format_double(nu, "%.6g"), nu);
        return t;
    }
    for (const auto& spec : problems) {
        Context ctx = make_context(spec, o);
        row(ctx.problem.label, ctx.nu());
    }
    return t;
}

inline Table cmd_sweep(const std::vector<ProblemSpec>& problems, const CommonOptions& o, bool all)
{
    const auto grid = parse_grid(o.grid).points();
    for (double w : grid) {
        if (!(w > 0.0 && w < 2.0)) throw usage_error("sweep grid values must lie in (0, 2)");
    }
    Table t;
    t.command = "sweep";
    if (all) t.columns = {"problem", "omega", "iterations", "residual", "converged"};
    else t.columns = {"problem", "omega_no", "iterations", "residual", "grid_points"};
    for (const auto& spec : problems) {
        Context ctx = make_context(spec, o);
        const SolverSettings base = o.settings(ctx.problem.n());
        if (!all) {
            const auto best = sweep_optimal(ctx.problem, grid, base, o.workers);
            t.rows.push_back({ctx.problem.label, best.omega, static_cast<long long>(best.report.iterations),
                              best.report.final_residual(), static_cast<long long>(grid.size())});
            continue;
        }
        const Factorization fa = factorize(ctx.problem.a);
        for (double w : grid) {
            SolverSettings s = base;
            s.omega = w;
            try {
                const auto r = sor_like(ctx.problem, fa, s);
                t.rows.push_back({ctx.problem.label, w, static_cast<long long>(r.iterations), r.final_residual(),
                                  r.converged});
            } catch (const error& e) {
                if (e.code() != errc::numerical_breakdown) throw;
                t.rows.push_back({ctx.problem.label, w, Cell{}, std::numeric_limits<double>::infinity(), false});
            }
        }
    }
    return t;
}

inline Table cmd_curves(const std::string& what, const std::string& nu_spec, const std::optional<std::string>& grid_spec)
{
    Table t;
    t.command = "curves";
    if (what == "roots") {
        const GridSpec g = parse_grid(grid_spec.value_or("0.01:0.01:0.99"));
        t.columns = {"nu", "omega1", "omega2", "omega3", "omega4"};
        for (double nu : g.points()) {
            if (!(nu > 0.0 && nu < 1.0)) throw usage_error("roots grid values must lie in (0, 1)");
            std::vector<Cell> row{nu};
            for (auto which : {RegionEndpoint::lower_below_branch, RegionEndpoint::upper_below_branch,
                               RegionEndpoint::lower_above_branch, RegionEndpoint::upper_above_branch}) {
                try {
                    row.push_back(region_endpoint(which, nu));
                } catch (const error&) {
                    row.push_back(std::monostate{});
                }
            }
            t.rows.push_back(std::move(row));
        }
        return t;
    }

    const bool g1 = what == "g1prime";
    const GridSpec g = parse_grid(grid_spec.value_or(g1 ? "0.01:0.01:0.99" : "0.01:0.01:1.99"));
    const std::vector<double> nus = parse_nu_list(nu_spec);
    t.columns = {"omega", "value", "nu"};
    for (double w : g.points()) {
        if (!(w > 0.0 && w < (g1 ? 1.0 : 2.0))) {
            throw usage_error(std::string("curve grid values must lie in ") + (g1 ? "(0, 1)" : "(0, 2)"));
        }
    }
    double (*fn)(double, double) = nullptr;
    if (what == "f") fn = [](double nu, double w) { return f_eval(nu, w); };
    else if (what == "lambda") fn = [](double nu, double w) { return lambda_max(nu, w); };
    else if (what == "eta") fn = [](double nu, double w) { return eta(nu, w); };
    else if (g1) fn = [](double nu, double w) { return g1_derivative(nu, w); };
    else throw usage_error("unknown curve '" + what + "' (expected f, lambda, eta, g1prime or roots)");
    for (double nu : nus) {
        for (double w : g.points()) t.rows.push_back({w, fn(nu, w), nu});
    }
    return t;
}

/// nu grids at the given resolution on either side of the branch point,
/// keeping a 1e-6 margin for the finite-difference slope checks.
inline std::pair<GridSpec, GridSpec> appendix_nu_grids(double res)
{
    const double branch = std::numbers::sqrt2 / 2.0;
    const double margin = 1e-6;
    auto k_hi = static_cast<long long>(std::floor((branch - margin) / res - 1e-9));
    auto k_lo = static_cast<long long>(std::ceil((branch + margin) / res + 1e-9));
    auto k_top = static_cast<long long>(std::floor((1.0 - margin) / res - 1e-9));
    if (k_hi < 1 || k_lo > k_top) throw usage_error("--resolution is too coarse");
    return {GridSpec{res, res, static_cast<double>(k_hi) * res},
            GridSpec{static_cast<double>(k_lo) * res, res, static_cast<double>(k_top) * res}};
}

inline Table cmd_verify_appendix(double res, unsigned workers, bool& all_pass)
{
    if (!(res > 0.0 && res <= 0.1)) throw usage_error("--resolution must lie in (0, 0.1]");
    const auto [below, above] = appendix_nu_grids(res);
    const auto nu_range = [](const GridSpec& g) {
        return format_double(g.lo, "%.6g") + ":" + format_double(g.step, "%.6g") + ":" +
               format_double(g.at(g.count() - 1), "%.6g");
    };

    Table t;
    t.command = "verify-appendix";
    t.columns = {"check", "nu_grid", "evaluated", "violations", "min_value", "argmin_nu", "argmin_omega", "pass"};
    all_pass = true;
    const auto add = [&](const std::string& name, const GridSpec& g, const ScanReport& r) {
        const bool ok = r.holds();
        all_pass = all_pass && ok;
        t.rows.push_back({name, nu_range(g), static_cast<long long>(r.evaluated),
                          static_cast<long long>(r.violations.size()), r.min_value, r.argmin.nu,
                          std::isnan(r.argmin.omega) ? Cell{} : Cell{r.argmin.omega}, ok});
    };
    add("delta1_positive_below_branch", below, scan_delta(DeltaId::d1, below));
    add("delta2_positive_below_branch", below, scan_delta(DeltaId::d2, below));
    add("delta1_positive_above_branch", above, scan_delta(DeltaId::d1, above));
    add("delta3_positive_above_branch", above, scan_delta(DeltaId::d3, above));

    const GridSpec unit{res, res, static_cast<double>(static_cast<long long>(std::floor((1.0 - res) / res + 1e-9))) * res};
    add("g1prime_positive", unit, scan_g1_derivative(unit, unit, workers));

    add("omega1_increasing", below, check_root_monotonicity(RegionEndpoint::lower_below_branch, below));
    add("omega2_decreasing", below, check_root_monotonicity(RegionEndpoint::upper_below_branch, below));
    add("omega3_increasing", above, check_root_monotonicity(RegionEndpoint::lower_above_branch, above));
    add("omega4_decreasing", above, check_root_monotonicity(RegionEndpoint::upper_above_branch, above));
    t.notes.push_back("monotonicity rows report sign * d(endpoint)/d(nu); argmin_omega is the endpoint value there");
    return t;
}

inline Table cmd_bench(const std::vector<ProblemSpec>& problems, const std::vector<MethodSpec>& methods,
                       const CommonOptions& o)
{
    const auto grid = parse_grid(o.grid).points();
    Table t;
    t.command = "bench";
    t.columns = {"problem", "n", "method", "omega", "iterations", "residual", "converged", "time_s_noncomparable"};
    for (const auto& spec : problems) {
        Context ctx = make_context(spec, o);
        const SolverSettings s = o.settings(ctx.problem.n());
        for (const auto& m : methods) {
            MethodRun run;
            try {
                run = run_method(ctx, m, s, grid, o.workers);
            } catch (const error& e) {
                if (e.code() != errc::numerical_breakdown && e.code() != errc::no_convergent_omega) throw;
                t.rows.push_back({ctx.problem.label, static_cast<long long>(ctx.problem.n()), m.name(), Cell{},
                                  Cell{}, Cell{}, false, Cell{}});
                continue;
            }
            const auto& r = run.report;
            t.rows.push_back({ctx.problem.label, static_cast<long long>(ctx.problem.n()), m.name(),
                              std::isnan(run.omega) ? Cell{} : Cell{run.omega}, static_cast<long long>(r.iterations),
                              r.final_residual(), r.converged, run.seconds});
        }
    }
    t.notes.push_back("time column is wall-clock on this machine and is not comparable across machines");
    return t;
}

// ---------------------------------------------------------------------------
// Entry point.

inline int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"SOR-like and generalized Newton solvers for absolute value equations Ax - |x| = b"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "Show help for all subcommands");

    CommonOptions o;
    std::vector<std::string> problem_specs;
    std::optional<std::string> nu_list;
    std::string method = "sorlopt";
    std::string methods = "sorlo,sorlaopt,sorlopt,newton";
    std::string curve = "f";
    std::optional<std::string> curve_grid;
    double resolution = 0.001;
    bool with_sweep = false, history = false, all_points = false;

    const auto add_output = [&](CLI::App* c) {
        c->add_option("--format", o.format, "Output format: table, csv or json")->capture_default_str();
        c->add_option("--out", o.out_path, "Write output to this file instead of stdout");
    };
    const auto add_solver = [&](CLI::App* c) {
        c->add_option("--tol", o.tol, "Stop once RES <= tol (default 1e-8)");
        c->add_flag("--relaxed", o.relaxed, "Use the relaxed stopping tolerance 1e-6");
        c->add_option("--max-iter", o.max_iter, "Iteration cap")->capture_default_str();
        c->add_option("--x0", o.x0_path, "Initial vector file; x0 = y0 = its contents");
        c->add_option("--rho", o.rho, "Spectral radius of A^-1 (needed for SORLo on non-SPD A)");
        c->add_option("--workers", o.workers, "Worker threads for sweeps")->capture_default_str();
    };

    auto* solve = app.add_subcommand("solve", "Solve one or more problems with one method");
    solve->add_option("--problem", problem_specs, "ex41:n | ex42:m | mm:path[,bpath]; sizes may be lists or lo..hi")
        ->required();
    solve->add_option("--method", method, "sorlo, sorlaopt, sorlopt, sorlno, newton or sor:<omega>")
        ->capture_default_str();
    solve->add_option("--nu", o.nu, "Use this nu instead of estimating it");
    solve->add_option("--grid", o.grid, "omega grid lo:step:hi for sorlno")->capture_default_str();
    solve->add_flag("--history", history, "Emit the residual history instead of the summary");
    add_solver(solve);
    add_output(solve);

    auto* params = app.add_subcommand("params", "Parameter table for problems or nu values");
    params->add_option("--problem", problem_specs, "Problem spec (see solve)");
    params->add_option("--nu", nu_list, "Comma-separated nu values instead of problems");
    params->add_flag("--with-sweep", with_sweep, "Fill omega_no by sweeping the grid");
    params->add_option("--grid", o.grid, "omega grid for --with-sweep")->capture_default_str();
    add_solver(params);
    add_output(params);

    auto* region = app.add_subcommand("region", "Convergent omega region");
    region->add_option("--problem", problem_specs, "Problem spec (see solve)");
    region->add_option("--nu", nu_list, "Comma-separated nu values instead of problems");
    add_output(region);

    auto* sweep = app.add_subcommand("sweep", "Find the experimentally best omega on a grid");
    sweep->add_option("--problem", problem_specs, "Problem spec (see solve)")->required();
    sweep->add_option("--grid", o.grid, "omega grid lo:step:hi")->capture_default_str();
    sweep->add_flag("--all", all_points, "Emit every grid point instead of the best one");
    add_solver(sweep);
    add_output(sweep);

    auto* curves = app.add_subcommand("curves", "CSV data for f, lambda_max, eta, (g1)' or the region endpoints");
    curves->add_option("--what", curve, "f, lambda, eta, g1prime or roots")->capture_default_str();
    curves->add_option("--nu", nu_list, "Comma-separated nu values");
    curves->add_option("--grid", curve_grid, "omega grid (nu grid for roots)");
    add_output(curves);

    auto* verify = app.add_subcommand("verify-appendix", "Grid checks of the region-analysis sign claims");
    verify->add_option("--resolution", resolution, "Grid step for nu and omega")->capture_default_str();
    verify->add_option("--workers", o.workers, "Worker threads for the 2-D scan (0 = hardware)");
    add_output(verify);

    auto* bench = app.add_subcommand("bench", "Run several methods over a suite of problems");
    bench->add_option("--suite", problem_specs, "Problem specs (see solve)");
    bench->add_option("--methods", methods, "Comma-separated methods")->capture_default_str();
    bench->add_option("--nu", o.nu, "Use this nu instead of estimating it");
    bench->add_option("--grid", o.grid, "omega grid for sorlno")->capture_default_str();
    add_solver(bench);
    add_output(bench);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return exit_ok;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return exit_ok;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return exit_usage;
    }

    try {
        const Format fmt = o.parsed_format();
        o.validate_scalars();
        int status = exit_ok;
        Table t;
        if (*solve) {
            t = cmd_solve(parse_problems(problem_specs), parse_method(method), o, history, status);
        } else if (*params || *region) {
            if (nu_list && !problem_specs.empty()) throw usage_error("give either --problem or --nu, not both");
            if (!nu_list && problem_specs.empty()) throw usage_error("give --problem or --nu");
            const auto probs = nu_list ? std::vector<ProblemSpec>{} : parse_problems(problem_specs);
            t = *params ? cmd_params(probs, nu_list, o, with_sweep) : cmd_region(probs, nu_list, o);
        } else if (*sweep) {
            t = cmd_sweep(parse_problems(problem_specs), o, all_points);
        } else if (*curves) {
            if (curve != "roots" && !nu_list) throw usage_error("curves needs --nu");
            t = cmd_curves(curve, nu_list.value_or(""), curve_grid);
        } else if (*verify) {
            bool pass = false;
            t = cmd_verify_appendix(resolution, o.workers, pass);
            if (!pass) status = exit_check_failed;
        } else if (*bench) {
            if (problem_specs.empty()) throw usage_error("bench needs a non-empty --suite");
            t = cmd_bench(parse_problems(problem_specs), parse_methods(methods), o);
        }
        emit(t, fmt, o.out_path, out);
        return status;
    } catch (const usage_error& e) {
        err << "error: " << e.what() << '\n';
        return exit_usage;
    } catch (const error& e) {
        err << "error: " << e.what() << '\n';
        if (e.step()) err << "  at iteration " << *e.step() << '\n';
        return e.is_numerical() || e.code() == errc::domain_error ? exit_numerical : exit_usage;
    }
}

} // namespace avesor::cli

#endif // AVESOR_TOOLS_CLI_APP_HPP
