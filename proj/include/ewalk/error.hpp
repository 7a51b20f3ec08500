#pragma once

#include <stdexcept>
#include <string>

namespace ewalk {

enum class Errc {
    non_positive_gap,
    degenerate_width,
    invalid_spectrum,
    invalid_rates,
    invalid_population,
    invalid_density,
    negative_population,
    rate_shape_mismatch,
    level_dependent_unsupported,
    not_normalizable,
    no_convergence,
    non_unique_fixed_point,
    empty_trajectory,
    infeasible_rates,
    unbiased_rates,
    zero_up_rate,
    mu_out_of_range,
    dimension_mismatch,
    no_unit_eigenvalue,
    length_mismatch,
    insufficient_tail,
    parse_error,
    schema_violation,
    unknown_field,
    io_error,
    invariant_violation,
};

const char* to_string(Errc code) noexcept;

// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

}  // namespace ewalk
