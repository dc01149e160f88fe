#pragma once

#include <stdexcept>
#include <string>

namespace wlsreg {

// Resolved residual scale c* is not strictly positive (e.g. more than half
// of the responses are exactly zero).
struct DegenerateScale : std::runtime_error {
    explicit DegenerateScale(const std::string& what) : std::runtime_error(what) {}
};

// Design matrix (with intercept column) has numerical rank < p.
struct RankDeficient : std::runtime_error {
    explicit RankDeficient(const std::string& what) : std::runtime_error(what) {}
};

// Objective or residuals evaluated to NaN/Inf where a finite value is required.
struct NonFinite : std::runtime_error {
    explicit NonFinite(const std::string& what) : std::runtime_error(what) {}
};

} // namespace wlsreg
