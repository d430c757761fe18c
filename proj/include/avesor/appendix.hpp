#ifndef AVESOR_APPENDIX_HPP
#define AVESOR_APPENDIX_HPP

// Numerical checks of the sign and monotonicity claims that the parameter
// theory relies on: realness of the region endpoints (through the Delta
// functions), monotonicity of the endpoints in nu, and positivity of the
// second derivative of g on the left branch.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <future>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "avesor/error.hpp"
#include "avesor/param_theory.hpp"

namespace avesor {

/// MATLAB-style grid lo:step:hi.  Points are lo + i*step, never accumulated.
struct GridSpec {
    double lo;
    double step;
    double hi;

    std::size_t count() const
    {
        if (!(step > 0.0) || hi < lo) return 0;
        return static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
    }

    double at(std::size_t i) const { return lo + static_cast<double>(i) * step; }

    std::vector<double> points() const
    {
        std::vector<double> v(count());
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = at(i);
        return v;
    }

    /// Parses "lo:step:hi".
    static GridSpec parse(const std::string& s)
    {
        const auto c1 = s.find(':');
        const auto c2 = c1 == std::string::npos ? std::string::npos : s.find(':', c1 + 1);
        if (c2 == std::string::npos) throw error(errc::parse_error, "grid must look like lo:step:hi, got '" + s + "'");
        try {
            GridSpec g{};
            g.lo = std::stod(s.substr(0, c1));
            g.step = std::stod(s.substr(c1 + 1, c2 - c1 - 1));
            g.hi = std::stod(s.substr(c2 + 1));
            if (!(g.step > 0.0) || g.hi < g.lo) throw error(errc::parse_error, "grid '" + s + "' is empty");
            return g;
        } catch (const std::logic_error&) {
            throw error(errc::parse_error, "grid must look like lo:step:hi, got '" + s + "'");
        }
    }
};

struct ScanPoint {
    double nu;
    double omega; ///< endpoint value for endpoint scans, NaN for other nu-only scans
    double value;
};

/// Result of evaluating a quantity over a grid against a positivity
/// predicate.  `violations` is empty iff the predicate held at every
/// evaluated point.
struct ScanReport {
    GridSpec nu_grid{};
    std::optional<GridSpec> omega_grid;
    std::size_t evaluated = 0;
    double min_value = std::numeric_limits<double>::infinity();
    ScanPoint argmin{std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN(),
                     std::numeric_limits<double>::infinity()};
    std::vector<ScanPoint> violations;
    std::vector<ScanPoint> skipped;

    bool holds() const noexcept { return violations.empty() && evaluated > 0; }

    void record(const ScanPoint& p, bool ok)
    {
        ++evaluated;
        if (p.value < min_value) {
            min_value = p.value;
            argmin = p;
        }
        if (!ok) violations.push_back(p);
    }

    void merge(const ScanReport& other)
    {
        evaluated += other.evaluated;
        if (other.min_value < min_value) {
            min_value = other.min_value;
            argmin = other.argmin;
        }
        violations.insert(violations.end(), other.violations.begin(), other.violations.end());
        skipped.insert(skipped.end(), other.skipped.begin(), other.skipped.end());
    }
};

// ---------------------------------------------------------------------------
// Delta functions.

struct DeltaValues {
    double d1; ///< radicand of the lower endpoints, both sides of the branch point
    double d2; ///< radicand of the upper endpoint below the branch point
    double d3; ///< radicand of the upper endpoint above the branch point
};

/// Evaluates the three Delta functions in their nu/gamma and nu/zeta form.
/// Algebraically these equal `endpoint_radicand`, which uses the
/// gamma*(8nu^2 -+ 2nu) form instead.
inline DeltaValues delta_values(double nu)
{
    detail::check_nu(nu, "delta_values");
    if (std::abs(2.0 * nu * nu - 1.0) < branch_tolerance) {
        throw error(errc::domain_error, "delta_values: nu is at the branch point sqrt(2)/2");
    }
    const double gamma = std::sqrt(-(nu - 1.0) * (nu + 5.0));
    const double zeta = std::sqrt(-(nu + 1.0) * (nu - 5.0));
    const double nu2 = nu * nu, nu3 = nu2 * nu;
    const double lead = -(8.0 * nu3 - 16.0 * nu2 + 4.0 * nu - 1.0);
    const double gpart = nu / gamma * (8.0 * nu3 + 30.0 * nu2 - 48.0 * nu + 10.0);
    return {
        lead + gpart,
        (8.0 * nu3 + 16.0 * nu2 + 4.0 * nu + 1.0) - nu / zeta * (8.0 * nu3 - 30.0 * nu2 - 48.0 * nu - 10.0),
        lead - gpart,
    };
}

enum class DeltaId { d1, d2, d3 };

inline double delta_component(const DeltaValues& d, DeltaId id)
{
    switch (id) {
        case DeltaId::d1: return d.d1;
        case DeltaId::d2: return d.d2;
        case DeltaId::d3: return d.d3;
    }
    return std::numeric_limits<double>::quiet_NaN();
}

/// Checks Delta_id(nu) > 0 on every grid point.
inline ScanReport scan_delta(DeltaId id, const GridSpec& nu_grid)
{
    ScanReport rep;
    rep.nu_grid = nu_grid;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t i = 0; i < nu_grid.count(); ++i) {
        const double nu = nu_grid.at(i);
        if (std::abs(2.0 * nu * nu - 1.0) < branch_tolerance) {
            rep.skipped.push_back({nu, nan, nan});
            continue;
        }
        const double v = delta_component(delta_values(nu), id);
        rep.record({nu, nan, v}, std::isfinite(v) && v > 0.0);
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Second derivative of g on the left branch.

struct G1DerivativeTerms {
    double value;
    double lower; ///< sqrt(r^2 - 4(omega - 1)^4); the value is undefined when this is not positive
};

inline G1DerivativeTerms g1_derivative_terms(double nu, double omega)
{
    const auto [r, s, ds] = left_branch_terms(nu, omega);
    const double d = omega - 1.0;
    const double d2 = d * d;
    const double upper1 = s * s + ds * r - 24.0 * d2;
    const double lower = std::sqrt(r * r - 4.0 * d2 * d2);
    const double u2base = r * s - 8.0 * d2 * d;
    const double upper2 = u2base * u2base;
    return {ds + upper1 / lower - upper2 / (lower * lower * lower), lower};
}

/// d/domega of the left-branch derivative of g, for omega in (0, 1).
inline double g1_derivative(double nu, double omega)
{
    detail::check_nu(nu, "g1_derivative");
    if (!(omega > 0.0 && omega < 1.0)) throw error(errc::domain_error, "g1_derivative: omega must lie in (0, 1)");
    return g1_derivative_terms(nu, omega).value;
}

/// Evaluates the left-branch second derivative of g over nu_grid x
/// omega_grid (both inside (0, 1)) and reports its minimum and any
/// non-positive values.  Points where the denominator vanishes are skipped.
/// Rows of nu are split across `workers` threads; results are merged in grid
/// order so the report does not depend on the thread count.
inline ScanReport scan_g1_derivative(const GridSpec& nu_grid, const GridSpec& omega_grid, unsigned workers = 0)
{
    const auto inside = [](const GridSpec& g) {
        return g.count() > 0 && g.lo > 0.0 && g.at(g.count() - 1) < 1.0;
    };
    if (!inside(nu_grid) || !inside(omega_grid)) {
        throw error(errc::domain_error, "scan_g1_derivative: grids must be nonempty and inside (0, 1)");
    }

    const std::size_t rows = nu_grid.count();
    if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, rows));

    const auto scan_rows = [&](std::size_t begin, std::size_t end) {
        ScanReport part;
        for (std::size_t i = begin; i < end; ++i) {
            const double nu = nu_grid.at(i);
            for (std::size_t j = 0; j < omega_grid.count(); ++j) {
                const double omega = omega_grid.at(j);
                const auto t = g1_derivative_terms(nu, omega);
                if (!(t.lower > 0.0) || !std::isfinite(t.value)) {
                    part.skipped.push_back({nu, omega, t.value});
                    continue;
                }
                part.record({nu, omega, t.value}, t.value > 0.0);
            }
        }
        return part;
    };

    std::vector<std::future<ScanReport>> parts;
    const std::size_t chunk = (rows + workers - 1) / workers;
    for (std::size_t b = 0; b < rows; b += chunk) {
        parts.push_back(std::async(workers > 1 ? std::launch::async : std::launch::deferred, scan_rows, b,
                                   std::min(rows, b + chunk)));
    }

    ScanReport rep;
    rep.nu_grid = nu_grid;
    rep.omega_grid = omega_grid;
    for (auto& p : parts) rep.merge(p.get());
    return rep;
}

// ---------------------------------------------------------------------------
// Region endpoints as functions of nu.

inline bool endpoint_below_branch(RegionEndpoint which)
{
    return which == RegionEndpoint::lower_below_branch || which == RegionEndpoint::upper_below_branch;
}

/// +1 for the endpoints claimed increasing in nu, -1 for the decreasing ones.
inline int expected_slope_sign(RegionEndpoint which)
{
    return (which == RegionEndpoint::lower_below_branch || which == RegionEndpoint::lower_above_branch) ? 1 : -1;
}

/// Finite-difference slope of a region endpoint in nu.  Each grid point must
/// show the expected sign (increasing lower endpoints, decreasing upper
/// ones) and a nonnegative radicand.  The recorded value is
/// sign * slope, so the minimum is the weakest margin.
inline ScanReport check_root_monotonicity(RegionEndpoint which, const GridSpec& nu_grid, double h = 1e-6)
{
    const double branch = std::numbers::sqrt2 / 2.0;
    const bool below = endpoint_below_branch(which);
    if (nu_grid.count() == 0) throw error(errc::domain_error, "check_root_monotonicity: empty grid");
    const double first = nu_grid.at(0), last = nu_grid.at(nu_grid.count() - 1);
    const bool ok_range = below ? (first - h > 0.0 && last + h < branch) : (first - h > branch && last + h < 1.0);
    if (!ok_range) throw error(errc::domain_error, "check_root_monotonicity: grid outside the endpoint's nu range");

    ScanReport rep;
    rep.nu_grid = nu_grid;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    const int sign = expected_slope_sign(which);
    for (std::size_t i = 0; i < nu_grid.count(); ++i) {
        const double nu = nu_grid.at(i);
        const double rad = endpoint_radicand(which, nu);
        const auto k = endpoint_terms(nu);
        const bool real = rad >= 0.0 && std::isfinite(k.gamma) && std::isfinite(k.zeta);
        if (!real) {
            rep.record({nu, nan, rad}, false);
            continue;
        }
        const double slope = (region_endpoint(which, nu + h) - region_endpoint(which, nu - h)) / (2.0 * h);
        const double margin = sign * slope;
        rep.record({nu, region_endpoint(which, nu), margin}, std::isfinite(margin) && margin > 0.0);
    }
    return rep;
}

} // namespace avesor

#endif // AVESOR_APPENDIX_HPP
