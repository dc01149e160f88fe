#include "wlsreg/weight.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace wlsreg {

namespace {

double alpha_star(const WeightParams& p) {
    return -2.0 * p.k * p.c / (-std::expm1(-p.k)); // -2kc / (1 - e^{-k})
}

} // namespace

void validate_weight_params(const WeightParams& p) {
    if (!(p.k > 0.0) || !std::isfinite(p.k)) {
        throw std::invalid_argument("WeightParams: k must be a positive finite number");
    }
    if (!(p.c > 0.0) || !std::isfinite(p.c)) {
        throw std::invalid_argument("WeightParams: c must be a positive finite number");
    }
}

std::vector<std::string> weight_params_warnings(const WeightParams& p) {
    std::vector<std::string> warnings;
    if (p.k < 1.0 || p.k > 10.0) {
        std::ostringstream msg;
        msg << "k = " << p.k << " is outside the usual steepness range [1, 10]";
        warnings.push_back(msg.str());
    }
    if (p.c <= 1.0) {
        std::ostringstream msg;
        msg << "c = " << p.c << " is at or below 1; cutoffs this small trade heavily "
            << "against efficiency";
        warnings.push_back(msg.str());
    }
    return warnings;
}

double weight(const WeightParams& p, double x) {
    const double ax = std::abs(x);
    if (ax <= p.c) {
        return 1.0;
    }
    // (e^{-k(1-c/ax)^2} - e^{-k}) / (1 - e^{-k}), written through expm1 of
    // k(1-t^2) = k (c/ax)(2 - c/ax) to avoid cancellation deep in the tail.
    const double s = p.c / ax;
    return std::exp(-p.k) * std::expm1(p.k * s * (2.0 - s)) / (-std::expm1(-p.k));
}

double weight_d1(const WeightParams& p, double x) {
    const double ax = std::abs(x);
    if (ax <= p.c) {
        return 0.0;
    }
    const double t = 1.0 - p.c / ax;
    const double sign = x > 0.0 ? 1.0 : -1.0;
    return alpha_star(p) * std::exp(-p.k * t * t) * t * sign / (x * x);
}

double weight_d2(const WeightParams& p, double x) {
    const double ax = std::abs(x);
    if (ax <= p.c) {
        return 0.0; // pinned to the left value at |x| = c; right limit jumps
    }
    const double t = 1.0 - p.c / ax;
    const double bracket = -2.0 * p.k * p.c * t * t / ax - (2.0 - 3.0 * p.c / ax);
    // |x|^3, not x^3: the second derivative of an even function is even.
    return alpha_star(p) * std::exp(-p.k * t * t) * bracket / (ax * ax * ax);
}

double psi(const WeightParams& p, double cstar, double r) {
    if (!std::isfinite(r)) {
        return std::numeric_limits<double>::quiet_NaN();
    }
    const double rsq = r * r;
    const double u = rsq / cstar;
    if (std::isinf(u)) {
        return tail_constant(p, cstar); // r^2 overflowed; psi has reached its limit
    }
    return weight(p, u) * rsq;
}

double tail_constant(const WeightParams& p, double cstar) {
    return 2.0 * p.c * p.k * cstar / std::expm1(p.k);
}

} // namespace wlsreg
