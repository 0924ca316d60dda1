#pragma once

// Recursive-descent parser shared by the polynomial and operator text formats.
// Derivative tokens (Dx, Dyy, Dxy, ...) are treated as formal commuting
// symbols, which is exact for input written in normal form (coefficients to
// the left of derivatives).

#include "qes/multipoly.hpp"

#include <map>
#include <string>
#include <string_view>

namespace qes::detail {

using FormalSum = std::map<Exponents, MultiPoly>;

FormalSum parse_formal(std::string_view text, const std::map<std::string, Rational>& constants);

}  // namespace qes::detail
