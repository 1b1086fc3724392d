#pragma once

#include <cmath>
#include <cstdint>

#include "mixlearn/errors.hpp"

namespace mixlearn {

// Ceiling of a sample-size formula value. The 1e-9 backoff absorbs float
// rounding when the formula lands exactly on an integer (e.g. log terms that
// are whole numbers analytically), so counts match hand evaluation.
inline std::int64_t count_ceil(double x) {
    if (!std::isfinite(x)) throw_numeric("sample-size formula produced a non-finite value");
    if (x > 9.0e18) throw_budget("sample-size formula exceeds a 64-bit count");
    const double c = std::ceil(x - 1e-9);
    return c < 1 ? 1 : static_cast<std::int64_t>(c);
}

}  // namespace mixlearn
