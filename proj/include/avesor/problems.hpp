#ifndef AVESOR_PROBLEMS_HPP
#define AVESOR_PROBLEMS_HPP

// Test problem generators and MatrixMarket / plain-text vector I/O.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "avesor/ave_problem.hpp"
#include "avesor/error.hpp"
#include "avesor/linalg.hpp"

namespace avesor {

/// (-1, 1, -1, 1, ...) of length n.
inline Vector alternating_solution(int n)
{
    Vector x(n);
    for (int i = 0; i < n; ++i) x[i] = (i % 2 == 0) ? -1.0 : 1.0;
    return x;
}

/// b = A x* - |x*|, so that x* solves the AVE.
inline Vector build_b(const Matrix& a, const Vector& x_star)
{
    if (x_star.size() != a.n()) throw error(errc::invalid_dimension, "build_b: x* has wrong length");
    return a.multiply(x_star) - x_star.cwiseAbs();
}

inline AveProblem make_problem(Matrix a, Vector x_star, std::string label)
{
    AveProblem p;
    p.b = build_b(a, x_star);
    p.a = std::move(a);
    p.x_star = std::move(x_star);
    p.label = std::move(label);
    return p;
}

/// A = tridiag(-1, 8, -1) of order n with the alternating solution.
inline AveProblem gen_ex41(int n)
{
    if (n < 2) throw error(errc::invalid_dimension, "gen_ex41: n must be >= 2");
    return make_problem(tridiag(n, -1.0, 8.0, -1.0), alternating_solution(n), "ex41:" + std::to_string(n));
}

/// A = Tridiag(-I_m, tridiag(-1, 8, -1), -I_m) of order m^2 with the
/// alternating solution.
inline AveProblem gen_ex42(int m)
{
    if (m < 2) throw error(errc::invalid_dimension, "gen_ex42: m must be >= 2");
    Matrix a = block_tridiag(m, tridiag(m, -1.0, 8.0, -1.0));
    return make_problem(std::move(a), alternating_solution(m * m), "ex42:" + std::to_string(m));
}

// ---------------------------------------------------------------------------
// MatrixMarket.

namespace detail {

inline std::string lower(std::string s)
{
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

[[noreturn]] inline void mm_fail(const std::string& src, int line, const std::string& msg)
{
    throw error(errc::parse_error, src + ":" + std::to_string(line) + ": " + msg);
}

inline bool blank_or_comment(const std::string& s)
{
    const auto p = s.find_first_not_of(" \t\r");
    return p == std::string::npos || s[p] == '%';
}

/// Sets the SPD hint when the matrix is symmetric and either strictly
/// diagonally dominant or admits a Cholesky factorization.
inline Matrix probe_spd(Matrix a)
{
    if (a.is_symmetric_diagonally_dominant()) return a.with_hint(SymmetryHint::symmetric_positive_definite);
    try {
        (void)factorize(a, FactorKind::cholesky);
        return a.with_hint(SymmetryHint::symmetric_positive_definite);
    } catch (const error&) {
        return a;
    }
}

} // namespace detail

/// Reads a real MatrixMarket matrix (coordinate or array; general, symmetric
/// or skew-symmetric).  Symmetric storage is expanded to full.
inline Matrix read_matrix_market(std::istream& in, const std::string& source = "<stream>")
{
    std::string line;
    int lineno = 0;
    if (!std::getline(in, line)) detail::mm_fail(source, 1, "empty input");
    ++lineno;

    std::istringstream hs(line);
    std::string banner, object, format, field, symmetry;
    hs >> banner >> object >> format >> field >> symmetry;
    if (banner != "%%MatrixMarket") detail::mm_fail(source, lineno, "missing %%MatrixMarket banner");
    object = detail::lower(object);
    format = detail::lower(format);
    field = detail::lower(field);
    symmetry = detail::lower(symmetry);
    if (object != "matrix") detail::mm_fail(source, lineno, "unsupported object '" + object + "'");
    if (format != "coordinate" && format != "array") detail::mm_fail(source, lineno, "unknown format '" + format + "'");
    if (field == "complex" || field == "pattern") {
        throw error(errc::unsupported_format, source + ": field '" + field + "' is not supported");
    }
    if (field != "real" && field != "integer" && field != "double") {
        detail::mm_fail(source, lineno, "unknown field '" + field + "'");
    }
    if (symmetry == "hermitian") throw error(errc::unsupported_format, source + ": hermitian storage is not supported");
    if (symmetry != "general" && symmetry != "symmetric" && symmetry != "skew-symmetric") {
        detail::mm_fail(source, lineno, "unknown symmetry '" + symmetry + "'");
    }
    const bool sym = symmetry == "symmetric";
    const bool skew = symmetry == "skew-symmetric";

    do {
        if (!std::getline(in, line)) detail::mm_fail(source, lineno + 1, "missing size line");
        ++lineno;
    } while (detail::blank_or_comment(line));

    long rows = 0, cols = 0, count = 0;
    {
        std::istringstream ss(line);
        if (format == "coordinate") {
            if (!(ss >> rows >> cols >> count)) detail::mm_fail(source, lineno, "bad size line");
        } else {
            if (!(ss >> rows >> cols)) detail::mm_fail(source, lineno, "bad size line");
            count = sym || skew ? rows * (rows + 1) / 2 : rows * cols;
            if (skew) count = rows * (rows - 1) / 2;
        }
    }
    if (rows <= 0 || cols <= 0) detail::mm_fail(source, lineno, "dimensions must be positive");
    if (rows != cols) {
        throw error(errc::invalid_dimension,
                    source + ": matrix is " + std::to_string(rows) + "x" + std::to_string(cols) + ", not square");
    }
    const int n = static_cast<int>(rows);

    std::vector<MatrixEntry> entries;
    entries.reserve(static_cast<std::size_t>(sym || skew ? 2 * count : count));
    const auto add = [&](long i, long j, double v) {
        if (!std::isfinite(v)) detail::mm_fail(source, lineno, "non-finite value");
        entries.push_back({static_cast<int>(i), static_cast<int>(j), v});
        if (i != j && sym) entries.push_back({static_cast<int>(j), static_cast<int>(i), v});
        if (i != j && skew) entries.push_back({static_cast<int>(j), static_cast<int>(i), -v});
    };

    long seen = 0;
    long arr_i = 0, arr_j = 0; // array format walks columns
    if (format == "array" && skew) arr_i = 1;
    while (seen < count) {
        if (!std::getline(in, line)) detail::mm_fail(source, lineno + 1, "unexpected end of file after " + std::to_string(seen) + " entries");
        ++lineno;
        if (detail::blank_or_comment(line)) continue;
        std::istringstream ss(line);
        if (format == "coordinate") {
            long i = 0, j = 0;
            double v = 0.0;
            if (!(ss >> i >> j >> v)) detail::mm_fail(source, lineno, "bad entry line");
            if (i < 1 || i > rows || j < 1 || j > cols) detail::mm_fail(source, lineno, "index out of range");
            if ((sym || skew) && j > i) detail::mm_fail(source, lineno, "upper-triangle entry in symmetric storage");
            if (skew && i == j) detail::mm_fail(source, lineno, "diagonal entry in skew-symmetric storage");
            add(i - 1, j - 1, v);
        } else {
            double v = 0.0;
            if (!(ss >> v)) detail::mm_fail(source, lineno, "bad value line");
            if (v != 0.0) add(arr_i, arr_j, v);
            ++arr_i;
            if (arr_i >= rows) {
                ++arr_j;
                arr_i = (sym) ? arr_j : (skew ? arr_j + 1 : 0);
            }
        }
        ++seen;
    }

    Matrix a;
    try {
        a = Matrix::from_entries(n, std::move(entries));
    } catch (const error& e) {
        throw error(errc::parse_error, source + ": " + e.what());
    }
    return sym ? detail::probe_spd(std::move(a)) : a;
}

inline Matrix load_matrix_market(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw error(errc::io_error, "cannot open '" + path + "'");
    return read_matrix_market(in, path);
}

namespace detail {

inline std::string format_g17(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace detail

/// Writes coordinate real format; symmetric matrices are stored as their
/// lower triangle.
inline void write_matrix_market(std::ostream& out, const Matrix& a)
{
    const bool sym = a.is_symmetric();
    std::vector<MatrixEntry> es = a.entries();
    if (sym) std::erase_if(es, [](const MatrixEntry& e) { return e.col > e.row; });
    // MatrixMarket lists column-major; any order is accepted on read.
    out << "%%MatrixMarket matrix coordinate real " << (sym ? "symmetric" : "general") << '\n';
    out << a.n() << ' ' << a.n() << ' ' << es.size() << '\n';
    for (const auto& e : es) out << e.row + 1 << ' ' << e.col + 1 << ' ' << detail::format_g17(e.value) << '\n';
}

inline void save_matrix_market(const std::string& path, const Matrix& a)
{
    std::ofstream out(path);
    if (!out) throw error(errc::io_error, "cannot write '" + path + "'");
    write_matrix_market(out, a);
}

/// Plain-text vector: one value per line; blank lines and lines starting
/// with '%' or '#' are ignored.
inline Vector read_vector(std::istream& in, const std::string& source = "<stream>")
{
    std::vector<double> vals;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto p = line.find_first_not_of(" \t\r");
        if (p == std::string::npos || line[p] == '%' || line[p] == '#') continue;
        std::istringstream ss(line);
        double v = 0.0;
        std::string rest;
        if (!(ss >> v) || (ss >> rest)) detail::mm_fail(source, lineno, "expected one number per line");
        if (!std::isfinite(v)) detail::mm_fail(source, lineno, "non-finite value");
        vals.push_back(v);
    }
    return Eigen::Map<const Vector>(vals.data(), static_cast<Eigen::Index>(vals.size()));
}

inline Vector load_vector(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw error(errc::io_error, "cannot open '" + path + "'");
    return read_vector(in, path);
}

inline void write_vector(std::ostream& out, const Vector& v)
{
    for (Eigen::Index i = 0; i < v.size(); ++i) out << detail::format_g17(v[i]) << '\n';
}

/// Problem from a MatrixMarket matrix.  Without a b file the right-hand side
/// is built from the alternating solution, which is then recorded as x*.
inline AveProblem load_problem(const std::string& matrix_path, const std::string& b_path = {})
{
    Matrix a = load_matrix_market(matrix_path);
    if (b_path.empty()) {
        const int n = a.n();
        return make_problem(std::move(a), alternating_solution(n), "mm:" + matrix_path);
    }
    AveProblem p;
    p.b = load_vector(b_path);
    if (p.b.size() != a.n()) throw error(errc::invalid_dimension, "b file length does not match the matrix order");
    p.a = std::move(a);
    p.label = "mm:" + matrix_path;
    return p;
}

} // namespace avesor

#endif // AVESOR_PROBLEMS_HPP
