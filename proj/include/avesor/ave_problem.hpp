#ifndef AVESOR_AVE_PROBLEM_HPP
#define AVESOR_AVE_PROBLEM_HPP

#include <optional>
#include <string>

#include "avesor/error.hpp"
#include "avesor/linalg.hpp"

namespace avesor {

/// RES = ||A x - |x| - b||_2.
inline double residual(const Matrix& a, const Vector& b, const Vector& x)
{
    if (b.size() != a.n() || x.size() != a.n()) {
        throw error(errc::invalid_dimension, "residual: dimensions of A, b and x disagree");
    }
    return (a.multiply(x) - x.cwiseAbs() - b).norm();
}

/// One instance of A x - |x| = b, optionally with its known solution and a
/// cached nu = ||A^{-1}||_2.
struct AveProblem {
    Matrix a;
    Vector b;
    std::optional<Vector> x_star;
    std::optional<double> nu;
    std::string label;

    int n() const noexcept { return a.n(); }

    /// Throws if the bundle is inconsistent: wrong lengths, a known solution
    /// with residual above `tol`, or a cached nu outside (0, 1).
    void validate(double tol = 1e-10) const
    {
        if (b.size() != a.n()) throw error(errc::invalid_dimension, "problem '" + label + "': b has wrong length");
        if (!b.allFinite()) throw error(errc::domain_error, "problem '" + label + "': b is not finite");
        if (x_star) {
            if (x_star->size() != a.n()) {
                throw error(errc::invalid_dimension, "problem '" + label + "': x* has wrong length");
            }
            const double r = residual(a, b, *x_star);
            if (!(r <= tol)) {
                throw error(errc::domain_error,
                            "problem '" + label + "': x* has residual " + std::to_string(r) + " > tolerance");
            }
        }
        if (nu && !(*nu > 0.0 && *nu < 1.0)) {
            throw error(errc::domain_error, "problem '" + label + "': nu must lie in (0, 1)");
        }
    }
};

} // namespace avesor

#endif // AVESOR_AVE_PROBLEM_HPP
