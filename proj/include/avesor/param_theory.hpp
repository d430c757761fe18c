#ifndef AVESOR_PARAM_THEORY_HPP
#define AVESOR_PARAM_THEORY_HPP

// Scalar theory of the SOR-like iteration for Ax - |x| = b.
//
// Everything here is a function of nu = ||A^{-1}||_2 in (0, 1) and the
// relaxation parameter omega in (0, 2).  The error of the iteration, measured
// in the omega-weighted norm sqrt(||e_x||^2 + omega^{-2} ||e_y||^2), contracts
// at least by ||T(nu, omega)||_2 per step, where
//
//     T = [ a   c   ]      a = |1 - omega|,  c = omega^2 nu.
//         [ a   a+c ]
//
// With H = T^T T the bound is sqrt(lambda_max(H)), and lambda_max(H) is the
// larger root of  lambda^2 - (3a^2 + 2c^2 + 2ac) lambda + a^4 = 0.

#include <algorithm>
#include <cmath>
#include <concepts>
#include <numbers>
#include <string>

#include "avesor/error.hpp"

namespace avesor {

/// Relative distance of 2 nu^2 - 1 from zero below which nu is treated as
/// the branch point sqrt(2)/2.
inline constexpr double branch_tolerance = 1e-10;

template <std::floating_point T = double>
inline T tau()
{
    return T(2) / (T(3) + std::sqrt(T(5)));
}

namespace detail {

template <std::floating_point T>
inline void check_nu(T nu, const char* where)
{
    if (!(nu > T(0) && nu < T(1))) {
        throw error(errc::domain_error, std::string(where) + ": nu must lie in (0, 1), got " + std::to_string(double(nu)));
    }
}

template <std::floating_point T>
inline void check_omega(T omega, const char* where)
{
    if (!(omega > T(0) && omega < T(2))) {
        throw error(errc::domain_error,
                    std::string(where) + ": omega must lie in (0, 2), got " + std::to_string(double(omega)));
    }
}

/// 3a^2 + 2c^2 + 2ac, the trace of H.
template <std::floating_point T>
inline T trace_h(T nu, T omega)
{
    const T a = std::abs(T(1) - omega);
    const T c = omega * omega * nu;
    return T(3) * a * a + T(2) * c * c + T(2) * a * c;
}

} // namespace detail

/// lambda_max(H(nu, omega)) from the closed form.
template <std::floating_point T>
inline T lambda_max(T nu, T omega)
{
    detail::check_nu(nu, "lambda_max");
    detail::check_omega(omega, "lambda_max");
    const T a = std::abs(T(1) - omega);
    const T p = detail::trace_h(nu, omega);
    const T a4 = a * a * a * a;
    return (p + std::sqrt(std::max(T(0), p * p - T(4) * a4))) / T(2);
}

/// ||T(nu, omega)||_2, the per-step contraction bound.
template <std::floating_point T>
inline T tnorm(T nu, T omega)
{
    return std::sqrt(lambda_max(nu, omega));
}

/// f(nu, omega) = 3a^2 + 2c^2 + 2ac - a^4 - 1.  Negative exactly on the
/// convergent region.
template <std::floating_point T>
inline T f_eval(T nu, T omega)
{
    detail::check_nu(nu, "f_eval");
    detail::check_omega(omega, "f_eval");
    const T a = std::abs(T(1) - omega);
    return detail::trace_h(nu, omega) - a * a * a * a - T(1);
}

/// g(nu, omega) = 2 lambda_max(H); same minimizer as tnorm.
template <std::floating_point T>
inline T g_eval(T nu, T omega)
{
    detail::check_nu(nu, "g_eval");
    detail::check_omega(omega, "g_eval");
    const T a = std::abs(T(1) - omega);
    const T p = detail::trace_h(nu, omega);
    return p + std::sqrt(std::max(T(0), p * p - T(4) * a * a * a * a));
}

/// Pieces of the left-branch derivative.  `r` is the trace of H for omega < 1
/// and `s` its derivative in omega.
template <std::floating_point T>
struct LeftBranchTerms {
    T r;
    T s;
    T ds; ///< s'(omega)
};

template <std::floating_point T>
inline LeftBranchTerms<T> left_branch_terms(T nu, T omega)
{
    const T w = omega;
    const T d = w - T(1);
    return {
        T(3) * d * d + T(2) * nu * nu * w * w * w * w + T(2) * nu * w * w * (T(1) - w),
        T(6) * d + T(8) * nu * nu * w * w * w + T(2) * nu * (T(2) * w - T(3) * w * w),
        T(6) + T(24) * nu * nu * w * w + T(2) * nu * (T(2) - T(6) * w),
    };
}

/// g'(omega) on the left branch, extended continuously to the closed interval
/// [0, 1].  This is the function whose root is the optimal omega.
template <std::floating_point T>
inline T g_derivative_left(T nu, T omega)
{
    detail::check_nu(nu, "g_derivative_left");
    if (!(omega >= T(0) && omega <= T(1))) {
        throw error(errc::domain_error, "g_derivative_left: omega must lie in [0, 1]");
    }
    const auto [r, s, ds] = left_branch_terms(nu, omega);
    (void)ds;
    const T d = omega - T(1);
    const T d3 = d * d * d;
    return s + (r * s - T(8) * d3) / std::sqrt(r * r - T(4) * d3 * d);
}

/// g'(omega) on the right branch (1, 2).
template <std::floating_point T>
inline T g_derivative_right(T nu, T omega)
{
    detail::check_nu(nu, "g_derivative_right");
    if (!(omega > T(1) && omega < T(2))) {
        throw error(errc::domain_error, "g_derivative_right: omega must lie in (1, 2)");
    }
    const T w = omega;
    const T d = w - T(1);
    const T q = T(3) * d * d + T(2) * nu * nu * w * w * w * w + T(2) * nu * w * w * d;
    const T t = T(6) * d + T(8) * nu * nu * w * w * w + T(2) * nu * (T(3) * w * w - T(2) * w);
    const T d3 = d * d * d;
    return t + (q * t - T(8) * d3) / std::sqrt(q * q - T(4) * d3 * d);
}

/// g'(omega) on (0, 1) or (1, 2).  g has a kink at omega = 1.
template <std::floating_point T>
inline T g_derivative(T nu, T omega)
{
    detail::check_nu(nu, "g_derivative");
    detail::check_omega(omega, "g_derivative");
    if (omega == T(1)) throw error(errc::non_differentiable_point, "g is not differentiable at omega = 1");
    return omega < T(1) ? g_derivative_left(nu, omega) : g_derivative_right(nu, omega);
}

// ---------------------------------------------------------------------------
// Convergent region.

enum class RegionCase { below_branch, above_branch, at_branch };

inline const char* to_string(RegionCase c) noexcept
{
    switch (c) {
        case RegionCase::below_branch: return "Omega1";
        case RegionCase::above_branch: return "Omega2";
        case RegionCase::at_branch:    return "Omega3";
    }
    return "?";
}

template <std::floating_point T = double>
struct Region {
    RegionCase kind;
    T lo;
    T hi;

    bool contains(T omega) const noexcept { return omega > lo && omega < hi; }
};

/// The four closed-form zeros of f that bound the region.  The first two
/// apply for nu < sqrt(2)/2, the last two for nu > sqrt(2)/2.
enum class RegionEndpoint { lower_below_branch, upper_below_branch, lower_above_branch, upper_above_branch };

template <std::floating_point T>
struct EndpointTerms {
    T alpha; ///< 4 - 2nu
    T beta;  ///< 2nu^2 - 1
    T xi;    ///< 4 + 2nu
    T gamma; ///< sqrt((1 - nu)(nu + 5))
    T zeta;  ///< sqrt((nu + 1)(5 - nu))
};

template <std::floating_point T>
inline EndpointTerms<T> endpoint_terms(T nu)
{
    return {T(4) - T(2) * nu, T(2) * nu * nu - T(1), T(4) + T(2) * nu, std::sqrt(-(nu - T(1)) * (nu + T(5))),
            std::sqrt(-(nu + T(1)) * (nu - T(5)))};
}

/// Quantity under the outer square root of the endpoint formula.  Realness
/// of the endpoint is radicand >= 0.
template <std::floating_point T>
inline T endpoint_radicand(RegionEndpoint which, T nu)
{
    const auto k = endpoint_terms(nu);
    const T p = -(T(8) * nu * nu * nu - T(16) * nu * nu + T(4) * nu - T(1));
    const T q = (T(8) * nu * nu - T(2) * nu) * k.gamma;
    switch (which) {
        case RegionEndpoint::lower_below_branch:
        case RegionEndpoint::lower_above_branch: return p - q;
        case RegionEndpoint::upper_above_branch: return p + q;
        case RegionEndpoint::upper_below_branch:
            return (T(8) * nu * nu * nu + T(16) * nu * nu + T(4) * nu + T(1)) + (T(8) * nu * nu + T(2) * nu) * k.zeta;
    }
    return T(0);
}

template <std::floating_point T>
inline T region_endpoint(RegionEndpoint which, T nu)
{
    detail::check_nu(nu, "region_endpoint");
    const auto k = endpoint_terms(nu);
    if (std::abs(k.beta) < T(branch_tolerance)) {
        throw error(errc::domain_error, "region_endpoint: nu is at the branch point sqrt(2)/2");
    }
    const bool below = k.beta < T(0);
    const bool wants_below =
        which == RegionEndpoint::lower_below_branch || which == RegionEndpoint::upper_below_branch;
    if (below != wants_below) {
        throw error(errc::domain_error, "region_endpoint: endpoint not defined on this side of sqrt(2)/2");
    }
    const T rad = endpoint_radicand(which, nu);
    if (rad < T(0)) throw error(errc::numerical_breakdown, "region_endpoint: negative radicand");
    const T root = std::sqrt(rad);
    const T two_beta = T(2) * k.beta;
    switch (which) {
        case RegionEndpoint::lower_below_branch: return -k.alpha / (T(4) * k.beta) + k.gamma / two_beta - root / two_beta;
        case RegionEndpoint::upper_below_branch: return -k.xi / (T(4) * k.beta) - k.zeta / two_beta + root / two_beta;
        case RegionEndpoint::lower_above_branch: return -k.alpha / (T(4) * k.beta) + k.gamma / two_beta + root / two_beta;
        case RegionEndpoint::upper_above_branch: return -k.alpha / (T(4) * k.beta) - k.gamma / two_beta + root / two_beta;
    }
    return T(0);
}

/// Lower endpoint at nu = sqrt(2)/2 (approximately 0.4579); the upper one is 1.
template <std::floating_point T = double>
inline T branch_point_lower_endpoint()
{
    const T s2 = std::sqrt(T(2));
    return -T(1) / T(7) - s2 / T(28) + std::sqrt(T(242) + T(64) * s2) / T(28);
}

/// Open interval of omega on which f(nu, .) < 0, hence ||T||_2 < 1.
template <std::floating_point T>
inline Region<T> convergent_region(T nu)
{
    detail::check_nu(nu, "convergent_region");
    const T beta = T(2) * nu * nu - T(1);
    if (std::abs(beta) < T(branch_tolerance)) {
        return {RegionCase::at_branch, branch_point_lower_endpoint<T>(), T(1)};
    }
    if (beta < T(0)) {
        return {RegionCase::below_branch, region_endpoint(RegionEndpoint::lower_below_branch, nu),
                region_endpoint(RegionEndpoint::upper_below_branch, nu)};
    }
    return {RegionCase::above_branch, region_endpoint(RegionEndpoint::lower_above_branch, nu),
            region_endpoint(RegionEndpoint::upper_above_branch, nu)};
}

// ---------------------------------------------------------------------------
// Parameter choices.

/// Minimizer of ||T(nu, .)||_2: 1 for nu <= 1/4, otherwise the zero of the
/// left-branch derivative on (0, 1), located by bisection from [0, 1].
/// Stops when |g'| <= tol or the bracket is narrower than tol.
template <std::floating_point T>
inline T omega_opt(T nu, T tol = T(1e-12), int max_iter = 200)
{
    detail::check_nu(nu, "omega_opt");
    if (!(tol > T(0))) throw error(errc::domain_error, "omega_opt: tol must be positive");
    if (nu <= T(0.25)) return T(1);

    T lo = T(0), hi = T(1);
    for (int it = 0; it < max_iter; ++it) {
        const T mid = (lo + hi) / T(2);
        const T v = g_derivative_left(nu, mid);
        if (!std::isfinite(v)) throw error(errc::numerical_breakdown, "omega_opt: non-finite derivative", it);
        if (std::abs(v) <= tol || hi - lo <= tol) return mid;
        (v < T(0) ? lo : hi) = mid;
    }
    throw error(errc::numerical_breakdown, "omega_opt: bisection did not terminate within the iteration cap");
}

/// Minimizer of eta(nu, .) = max(|1 - omega|, nu omega^2), i.e. the root of
/// 1 - omega = nu omega^2 in (0, 1).
template <std::floating_point T>
inline T omega_aopt(T nu)
{
    detail::check_nu(nu, "omega_aopt");
    // (sqrt(4nu+1) - 1) / (2nu), rationalized so that nu -> 0 is stable.
    return T(2) / (std::sqrt(T(4) * nu + T(1)) + T(1));
}

/// The competing choice 2 / (1 + sqrt(1 - rho)) with rho = rho(A^{-1}).
template <std::floating_point T>
inline T omega_guo(T rho)
{
    if (!(rho >= T(0) && rho < T(1))) throw error(errc::domain_error, "omega_guo: rho must lie in [0, 1)");
    return T(2) / (T(1) + std::sqrt(T(1) - rho));
}

template <std::floating_point T>
inline T eta(T nu, T omega)
{
    detail::check_nu(nu, "eta");
    detail::check_omega(omega, "eta");
    return std::max(std::abs(T(1) - omega), nu * omega * omega);
}

/// eta / tau, an upper bound of tnorm.
template <std::floating_point T>
inline T eta_ratio(T nu, T omega)
{
    return eta(nu, omega) / tau<T>();
}

template <std::floating_point T = double>
struct ParamBundle {
    T nu;
    T rho;
    T omega_o;
    T omega_aopt;
    T omega_opt;
    T tnorm_at_opt;
    T eta_ratio_at_aopt;
    Region<T> region;
    T tau;
    bool omega_o_in_region;
};

/// All derived parameters for one nu.  `rho` defaults to nu, which is exact
/// for symmetric positive definite A.
template <std::floating_point T>
inline ParamBundle<T> param_bundle(T nu, T rho)
{
    detail::check_nu(nu, "param_bundle");
    ParamBundle<T> p{};
    p.nu = nu;
    p.rho = rho;
    p.omega_o = omega_guo(rho);
    p.omega_aopt = omega_aopt(nu);
    p.omega_opt = omega_opt(nu);
    p.tnorm_at_opt = tnorm(nu, p.omega_opt);
    p.eta_ratio_at_aopt = eta_ratio(nu, p.omega_aopt);
    p.region = convergent_region(nu);
    p.tau = tau<T>();
    p.omega_o_in_region = p.region.contains(p.omega_o);
    return p;
}

template <std::floating_point T>
inline ParamBundle<T> param_bundle(T nu)
{
    return param_bundle(nu, nu);
}

} // namespace avesor

#endif // AVESOR_PARAM_THEORY_HPP
