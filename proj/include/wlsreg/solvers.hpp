#pragma once

#include <chrono>
#include <cstdint>

#include "wlsreg/dataset.hpp"
#include "wlsreg/objective.hpp"
#include "wlsreg/weight.hpp"

namespace wlsreg {

enum class LineSearch {
    NewtonStep,   // alpha = -g^T v / (v^T H v), backtracking fallback
    Backtracking, // Armijo backtracking only
};

enum class InitializerKind {
    Lts,   // least trimmed squares (high-breakdown default)
    Ls,    // ordinary least squares
    Given, // caller-supplied starting point
};

struct FitConfig {
    WeightParams weight_params{};
    ScaleMode scale_mode = ScaleMode::MedianYSquared;

    double tolerance = 1e-8; // on the gradient norm
    int max_outer_cycles = 50;

    LineSearch line_search = LineSearch::NewtonStep;
    double armijo_slope = 0.3;    // in (0, 0.5]
    double backtrack_shrink = 0.8; // in (0, 1)

    InitializerKind initializer = InitializerKind::Lts;
    Coefficients given_initial; // used when initializer == Given

    std::uint64_t rng_seed = 0; // LTS subsampling
    int lts_n_starts = 500;
    int lts_h = 0; // 0 selects the default floor((n+p+1)/2)

    // Return the initializer instead of the CG output if the initializer has
    // the smaller objective (cannot trigger under monotone descent; kept as
    // a guard).
    bool keep_best_of_initializer = true;

    // Substitute c* = max(c*, 1e-12*(1+max y^2)) instead of refusing on a
    // degenerate scale. Off by default; exposed through the CLI.
    bool allow_scale_floor = false;
};

void validate_fit_config(const FitConfig& cfg);

struct FitResult {
    Coefficients beta;
    double objective = 0.0;
    double gradient_norm = 0.0;
    int iterations = 0;
    bool converged = false;
    std::chrono::duration<double> wall_time{0.0};
};

// Ordinary least squares via a rank-revealing orthogonal factorization.
// Throws RankDeficient when the design has numerical rank < p.
FitResult fit_ls(const Dataset& d);

// Least trimmed squares: minimizes the sum of the h smallest squared
// residuals with random elemental starts and concentration steps.
// h = 0 selects floor((n+p+1)/2). Deterministic given the seed; ties between
// starts resolve to the lowest start index. h = n reproduces fit_ls.
FitResult fit_lts(const Dataset& d, Eigen::Index h = 0, int n_starts = 500,
                  std::uint64_t seed = 0);

// Weighted least squares: nonlinear conjugate gradient (Fletcher-Reeves)
// on the weighted objective, restarted every p inner iterations, Newton
// step length with Armijo backtracking fallback. Objective values are
// non-increasing across accepted steps.
FitResult fit_wls(const Dataset& d, const FitConfig& cfg = {});

// Theoretical replacement breakdown point of the WLS estimator.
struct Rational {
    long long num = 0;
    long long den = 1;
    double value() const { return static_cast<double>(num) / static_cast<double>(den); }
};

// floor((n+1)/2)/n when p == 1, (floor((n-p)/2)+1)/n when p > 1.
// Requires n > p >= 1.
Rational rbp_theoretical(long long n, long long p);

} // namespace wlsreg
