#ifndef AVESOR_SPECTRAL_HPP
#define AVESOR_SPECTRAL_HPP

#include <cmath>
#include <optional>

#include "avesor/error.hpp"
#include "avesor/linalg.hpp"

namespace avesor {

struct SpectralOptions {
    double tol = 1e-8;
    int max_iter = 2000;
    std::optional<Vector> x0; ///< defaults to the all-ones vector
};

struct SpectralResult {
    double nu = 0.0;                  ///< ||A^{-1}||_2
    double lambda_min_estimate = 0.0; ///< lambda_min(A) for SPD A, sigma_min(A)^2 otherwise
    int iterations = 0;
    bool converged = false;
    std::optional<double> rho;        ///< rho(A^{-1}); only known on the SPD path
};

/// Estimates nu = ||A^{-1}||_2 by inverse power iteration.
///
/// SPD input (by hint) iterates with A^{-1} and nu = 1/lambda_min(A).  Any
/// other matrix iterates with (A^T A)^{-1}, applied as a solve with A
/// followed by a solve with A^T on one LU factorization, and
/// nu = 1/sigma_min(A).
///
/// The iteration stops when the eigenvalue estimate changes by at most
/// tol relative to itself, or when the current vector is already an
/// eigenvector to within tol.  Hitting max_iter leaves converged = false.
inline SpectralResult nu_estimate(const Matrix& a, const SpectralOptions& opt = {})
{
    if (!(opt.tol > 0.0)) throw error(errc::domain_error, "nu_estimate: tol must be positive");
    if (opt.max_iter < 1) throw error(errc::domain_error, "nu_estimate: max_iter must be >= 1");

    const int n = a.n();
    Vector x = opt.x0 ? *opt.x0 : Vector::Ones(n);
    if (x.size() != n) throw error(errc::invalid_dimension, "nu_estimate: x0 has wrong length");
    if (!x.allFinite() || x.norm() == 0.0) throw error(errc::domain_error, "nu_estimate: x0 must be finite and nonzero");
    x /= x.norm();

    const bool spd = a.spd_hint();
    const Factorization f = factorize(a);

    SpectralResult res;
    double previous = 0.0;
    for (int k = 1; k <= opt.max_iter; ++k) {
        Vector y = f.solve(x);
        if (!spd) y = f.solve_transpose(y);
        const double mu = x.dot(y) / x.dot(x); // Rayleigh quotient of the inverse operator
        if (!std::isfinite(mu) || mu == 0.0) {
            throw error(errc::numerical_breakdown, "inverse power iteration produced a degenerate iterate", k);
        }
        const double lambda = 1.0 / mu;
        const double eig_residual = (y - mu * x).norm();
        const double ynorm = y.norm();
        if (!std::isfinite(ynorm) || ynorm == 0.0) {
            throw error(errc::numerical_breakdown, "inverse power iteration produced a degenerate iterate", k);
        }

        res.iterations = k;
        res.lambda_min_estimate = lambda;
        const bool settled = (k > 1 && std::abs(lambda - previous) <= opt.tol * std::abs(lambda))
                          || eig_residual <= opt.tol * std::abs(mu);
        previous = lambda;
        x = y / ynorm;
        if (settled) {
            res.converged = true;
            break;
        }
    }

    if (spd) {
        res.nu = 1.0 / res.lambda_min_estimate;
        res.rho = res.nu;
    } else {
        res.nu = 1.0 / std::sqrt(res.lambda_min_estimate);
    }
    return res;
}

} // namespace avesor

#endif // AVESOR_SPECTRAL_HPP
