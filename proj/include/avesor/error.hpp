#ifndef AVESOR_ERROR_HPP
#define AVESOR_ERROR_HPP

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace avesor {

enum class errc {
    invalid_dimension,
    singular_matrix,
    not_positive_definite,
    domain_error,
    non_differentiable_point,
    numerical_breakdown,
    parse_error,
    unsupported_format,
    no_convergent_omega,
    io_error,
};

inline std::string_view to_string(errc code) noexcept
{
    switch (code) {
        case errc::invalid_dimension:        return "invalid-dimension";
        case errc::singular_matrix:          return "singular-matrix";
        case errc::not_positive_definite:    return "not-positive-definite";
        case errc::domain_error:             return "domain-error";
        case errc::non_differentiable_point: return "non-differentiable-point";
        case errc::numerical_breakdown:      return "numerical-breakdown";
        case errc::parse_error:              return "parse-error";
        case errc::unsupported_format:       return "unsupported-format";
        case errc::no_convergent_omega:      return "no-convergent-omega";
        case errc::io_error:                 return "io-error";
    }
    return "unknown";
}

/// Exception type for every failure raised by the library.  `step()` carries
/// the iteration index when the failure happened inside an iterative solve.
class error : public std::runtime_error {
public:
    error(errc code, const std::string& what, std::optional<int> step = std::nullopt)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code), step_(step)
    {
    }

    errc code() const noexcept { return code_; }
    std::optional<int> step() const noexcept { return step_; }

    /// True for failures of the numerical kind (as opposed to bad input).
    bool is_numerical() const noexcept
    {
        return code_ == errc::singular_matrix || code_ == errc::not_positive_definite
            || code_ == errc::numerical_breakdown || code_ == errc::no_convergent_omega;
    }

private:
    errc code_;
    std::optional<int> step_;
};

} // namespace avesor

#endif // AVESOR_ERROR_HPP
