#pragma once

#include <array>
#include <string>
#include <string_view>

#include "pairstat/tomography.hpp"

namespace pairstat {

/// Locale-independent rendering with 17 significant digits ("%.17g"
/// semantics). Non-finite values render as inf, -inf, nan.
std::string format_number(double value);

/// {"basis": ["HH","HV","VH","VV"], "re": [[...]], "im": [[...]]}, row-major,
/// 17 significant digits.
std::string to_json(const DensityMatrix& rho);

/// Parses the format written by to_json. Throws std::invalid_argument on
/// malformed input or a matrix that is not a valid state.
DensityMatrix density_matrix_from_json(std::string_view text);

/// Parses {"r": [16 numbers]} (rates in standard projection order).
std::array<double, 16> rates_from_json(std::string_view text);

}  // namespace pairstat
