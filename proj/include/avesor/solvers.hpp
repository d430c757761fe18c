#ifndef AVESOR_SOLVERS_HPP
#define AVESOR_SOLVERS_HPP

#include <cmath>
#include <cstddef>
#include <future>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "avesor/ave_problem.hpp"
#include "avesor/error.hpp"
#include "avesor/linalg.hpp"

namespace avesor {

struct SolverSettings {
    double omega = 1.0;       ///< relaxation parameter; ignored by Newton
    double tol = 1e-8;        ///< stop once RES <= tol
    int max_iter = 100;
    std::optional<Vector> x0; ///< zero when absent
    std::optional<Vector> y0; ///< zero when absent

    void validate(int n) const
    {
        if (!(tol > 0.0)) throw error(errc::domain_error, "solver tol must be positive");
        if (max_iter < 1) throw error(errc::domain_error, "solver max_iter must be >= 1");
        if ((x0 && x0->size() != n) || (y0 && y0->size() != n)) {
            throw error(errc::invalid_dimension, "initial vectors must have length " + std::to_string(n));
        }
    }
};

enum class SolveMethod { sor_like, newton };

inline const char* to_string(SolveMethod m) noexcept { return m == SolveMethod::sor_like ? "sor-like" : "newton"; }

struct SolveReport {
    SolveMethod method = SolveMethod::sor_like;
    double omega = 1.0;
    bool converged = false;
    int iterations = 0;
    std::vector<double> residual_history; ///< RES at x^(0), ..., x^(iterations)
    Vector solution;
    std::vector<double> error_norm_history; ///< omega-weighted error, only when x* is known
    int factorizations = 0;

    double final_residual() const { return residual_history.empty() ? NAN : residual_history.back(); }
};

/// sqrt(||e_x||^2 + omega^{-2} ||e_y||^2), the norm in which the SOR-like
/// error contracts.
inline double weighted_error_norm(const Vector& ex, const Vector& ey, double omega)
{
    return std::sqrt(ex.squaredNorm() + ey.squaredNorm() / (omega * omega));
}

/// SOR-like iteration on a caller-supplied factorization of A:
///
///     x+ = (1 - omega) x + omega A^{-1} (y + b)
///     y+ = (1 - omega) y + omega |x+|
///
/// RES is evaluated on x^(k) before each update, so `iterations` counts
/// completed (x, y) updates and the initial residual is history[0].
inline SolveReport sor_like(const AveProblem& problem, const Factorization& fa, const SolverSettings& settings)
{
    const int n = problem.n();
    settings.validate(n);
    if (fa.n() != n) throw error(errc::invalid_dimension, "sor_like: factorization order does not match A");
    const double w = settings.omega;
    if (!(w > 0.0 && w < 2.0)) throw error(errc::domain_error, "sor_like: omega must lie in (0, 2)");

    SolveReport rep;
    rep.method = SolveMethod::sor_like;
    rep.omega = w;
    Vector x = settings.x0 ? *settings.x0 : Vector::Zero(n);
    Vector y = settings.y0 ? *settings.y0 : Vector::Zero(n);

    std::optional<Vector> y_star;
    if (problem.x_star) y_star = problem.x_star->cwiseAbs();

    for (int k = 0;; ++k) {
        const double res = residual(problem.a, problem.b, x);
        rep.residual_history.push_back(res);
        if (y_star) rep.error_norm_history.push_back(weighted_error_norm(*problem.x_star - x, *y_star - y, w));
        if (res <= settings.tol) {
            rep.converged = true;
            rep.iterations = k;
            break;
        }
        if (k == settings.max_iter) {
            rep.iterations = k;
            break;
        }
        x = (1.0 - w) * x + w * fa.solve(y + problem.b);
        if (!x.allFinite()) throw error(errc::numerical_breakdown, "sor_like: non-finite iterate", k + 1);
        y = (1.0 - w) * y + w * x.cwiseAbs();
    }
    rep.solution = std::move(x);
    return rep;
}

/// SOR-like iteration; factors A exactly once.
inline SolveReport sor_like(const AveProblem& problem, const SolverSettings& settings)
{
    settings.validate(problem.n());
    const Factorization fa = factorize(problem.a);
    SolveReport rep = sor_like(problem, fa, settings);
    rep.factorizations = 1;
    return rep;
}

/// Generalized Newton: [A - D(x^(k))] x^(k+1) = b with D = diag(sgn(x)).
/// The shifted matrix changes every step and is refactored each time.
inline SolveReport generalized_newton(const AveProblem& problem, const SolverSettings& settings)
{
    const int n = problem.n();
    settings.validate(n);

    SolveReport rep;
    rep.method = SolveMethod::newton;
    rep.omega = NAN;
    Vector x = settings.x0 ? *settings.x0 : Vector::Zero(n);

    for (int k = 0;; ++k) {
        const double res = residual(problem.a, problem.b, x);
        rep.residual_history.push_back(res);
        if (res <= settings.tol) {
            rep.converged = true;
            rep.iterations = k;
            break;
        }
        if (k == settings.max_iter) {
            rep.iterations = k;
            break;
        }
        const Matrix shifted = problem.a.minus_diagonal(sign_vector(x));
        try {
            const Factorization f = factorize(shifted);
            ++rep.factorizations;
            x = f.solve(problem.b);
        } catch (const error& e) {
            const std::string what = e.what();
            throw error(e.code(), "generalized_newton: " + what.substr(to_string(e.code()).size() + 2), k + 1);
        }
        if (!x.allFinite()) throw error(errc::numerical_breakdown, "generalized_newton: non-finite iterate", k + 1);
    }
    rep.solution = std::move(x);
    return rep;
}

struct SweepResult {
    double omega;
    SolveReport report;
};

/// Runs the SOR-like iteration for every omega in the grid (one shared
/// factorization) and returns the first grid value, in grid order, that
/// attains the smallest iteration count among converged runs.
inline SweepResult sweep_optimal(const AveProblem& problem, std::span<const double> omega_grid,
                                 const SolverSettings& settings, unsigned workers = 1)
{
    if (omega_grid.empty()) throw error(errc::domain_error, "sweep_optimal: empty omega grid");
    for (double w : omega_grid) {
        if (!(w > 0.0 && w < 2.0)) throw error(errc::domain_error, "sweep_optimal: grid values must lie in (0, 2)");
    }
    settings.validate(problem.n());
    const Factorization fa = factorize(problem.a);

    const auto run = [&](std::size_t i) -> std::optional<SolveReport> {
        SolverSettings s = settings;
        s.omega = omega_grid[i];
        try {
            return sor_like(problem, fa, s);
        } catch (const error& e) {
            if (e.code() == errc::numerical_breakdown) return std::nullopt; // diverged to overflow
            throw;
        }
    };

    std::vector<std::optional<SolveReport>> reports(omega_grid.size());
    if (workers <= 1) {
        for (std::size_t i = 0; i < omega_grid.size(); ++i) reports[i] = run(i);
    } else {
        std::vector<std::future<void>> jobs;
        for (unsigned t = 0; t < workers; ++t) {
            jobs.push_back(std::async(std::launch::async, [&, t] {
                for (std::size_t i = t; i < omega_grid.size(); i += workers) reports[i] = run(i);
            }));
        }
        for (auto& j : jobs) j.get();
    }

    std::optional<std::size_t> best;
    for (std::size_t i = 0; i < reports.size(); ++i) {
        if (!reports[i] || !reports[i]->converged) continue;
        if (!best || reports[i]->iterations < reports[*best]->iterations) best = i;
    }
    if (!best) throw error(errc::no_convergent_omega, "sweep_optimal: no grid value converged");
    SweepResult out{omega_grid[*best], std::move(*reports[*best])};
    out.report.factorizations = 1;
    return out;
}

} // namespace avesor

#endif // AVESOR_SOLVERS_HPP
