#pragma once

#include <string>
#include <vector>

namespace wlsreg {

// Tuning constants of the residual weight function: weight is exactly 1 up
// to the cutoff c and decays exponentially beyond it with steepness k.
// Larger c favors efficiency, smaller c favors robustness; k in [1, 10] and
// c > 1 are the usual operating ranges (soft guidance, see
// weight_params_warnings).
struct WeightParams {
    double k = 5.0;
    double c = 100.0;
};

// Hard invariants only (k > 0, c > 0, finite). Throws std::invalid_argument.
void validate_weight_params(const WeightParams& p);

// Soft range advice; empty when the parameters are in the usual ranges.
std::vector<std::string> weight_params_warnings(const WeightParams& p);

// w(x): 1 for |x| <= c, else (e^{-k(1-c/|x|)^2} - e^{-k}) / (1 - e^{-k}).
// Even, continuous, with values in (0, 1].
double weight(const WeightParams& p, double x);

// First derivative of w. Zero on [-c, c]; continuous at |x| = c.
double weight_d1(const WeightParams& p, double x);

// Second derivative of w away from |x| = c. Defined as 0 at |x| = c (the
// left value); the right limit there is alpha*/c^3 != 0, so w'' has a jump
// at the cutoff. The optimizer only needs it almost everywhere.
double weight_d2(const WeightParams& p, double x);

// Per-observation penalized square w(r^2/cstar) * r^2. Equals r^2 exactly
// while r^2 <= c*cstar, is bounded, and tends to tail_constant as |r| grows.
double psi(const WeightParams& p, double cstar, double r);

// lim_{|r| -> inf} psi = 2*c*k*cstar / (e^k - 1).
double tail_constant(const WeightParams& p, double cstar);

} // namespace wlsreg
