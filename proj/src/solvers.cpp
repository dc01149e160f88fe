#include "wlsreg/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>
#include <vector>

#include "wlsreg/bench.hpp"

namespace wlsreg {

namespace {

using Clock = std::chrono::steady_clock;

Eigen::VectorXd solve_ls_rows(const Eigen::MatrixXd& design, const Eigen::VectorXd& y,
                              const std::vector<int>& rows, bool& ok) {
    const Eigen::Index p = design.cols();
    Eigen::MatrixXd sub(static_cast<Eigen::Index>(rows.size()), p);
    Eigen::VectorXd suby(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        sub.row(static_cast<Eigen::Index>(i)) = design.row(rows[i]);
        suby[static_cast<Eigen::Index>(i)] = y[rows[i]];
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(sub);
    ok = (qr.rank() == p);
    if (!ok) {
        return Eigen::VectorXd::Zero(p);
    }
    return qr.solve(suby);
}

// Indices of the h smallest squared residuals, with the deterministic
// (value, index) tie-break so the selection is invariant under residual
// scaling.
std::vector<int> best_h_rows(const Eigen::VectorXd& r, Eigen::Index h) {
    std::vector<std::pair<double, int>> order(static_cast<std::size_t>(r.size()));
    for (Eigen::Index i = 0; i < r.size(); ++i) {
        order[static_cast<std::size_t>(i)] = {r[i] * r[i], static_cast<int>(i)};
    }
    std::sort(order.begin(), order.end());
    std::vector<int> rows(static_cast<std::size_t>(h));
    for (Eigen::Index i = 0; i < h; ++i) {
        rows[static_cast<std::size_t>(i)] = order[static_cast<std::size_t>(i)].second;
    }
    std::sort(rows.begin(), rows.end());
    return rows;
}

double trimmed_sse(const Eigen::VectorXd& r, Eigen::Index h) {
    std::vector<double> sq(static_cast<std::size_t>(r.size()));
    for (Eigen::Index i = 0; i < r.size(); ++i) {
        sq[static_cast<std::size_t>(i)] = r[i] * r[i];
    }
    std::nth_element(sq.begin(), sq.begin() + h, sq.end());
    return std::accumulate(sq.begin(), sq.begin() + h, 0.0);
}

// Draws `count` distinct indices from [0, n) (partial Fisher-Yates).
std::vector<int> sample_indices(std::mt19937_64& gen, int n, int count) {
    std::vector<int> pool(static_cast<std::size_t>(n));
    std::iota(pool.begin(), pool.end(), 0);
    std::vector<int> out(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        std::uniform_int_distribution<int> pick(i, n - 1);
        std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(pick(gen))]);
        out[static_cast<std::size_t>(i)] = pool[static_cast<std::size_t>(i)];
    }
    return out;
}

} // namespace

void validate_fit_config(const FitConfig& cfg) {
    validate_weight_params(cfg.weight_params);
    if (!(cfg.tolerance > 0.0)) {
        throw std::invalid_argument("FitConfig: tolerance must be positive");
    }
    if (cfg.max_outer_cycles < 1) {
        throw std::invalid_argument("FitConfig: max_outer_cycles must be positive");
    }
    if (!(cfg.armijo_slope > 0.0) || cfg.armijo_slope > 0.5) {
        throw std::invalid_argument("FitConfig: armijo_slope must be in (0, 0.5]");
    }
    if (!(cfg.backtrack_shrink > 0.0) || !(cfg.backtrack_shrink < 1.0)) {
        throw std::invalid_argument("FitConfig: backtrack_shrink must be in (0, 1)");
    }
    if (cfg.lts_n_starts < 1) {
        throw std::invalid_argument("FitConfig: lts_n_starts must be positive");
    }
}

FitResult fit_ls(const Dataset& d) {
    const auto t0 = Clock::now();
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(d.design());
    if (qr.rank() < d.p()) {
        std::ostringstream msg;
        msg << "fit_ls: design matrix rank " << qr.rank() << " < p = " << d.p();
        throw RankDeficient(msg.str());
    }
    FitResult res;
    res.beta = qr.solve(d.y());
    const Eigen::VectorXd r = d.y() - d.design() * res.beta;
    res.objective = r.squaredNorm();
    res.gradient_norm = (-2.0 * d.design().transpose() * r).norm();
    res.iterations = 0;
    res.converged = true;
    res.wall_time = Clock::now() - t0;
    return res;
}

FitResult fit_lts(const Dataset& d, Eigen::Index h, int n_starts, std::uint64_t seed) {
    const auto t0 = Clock::now();
    const int n = static_cast<int>(d.n());
    const int p = static_cast<int>(d.p());
    if (h == 0) {
        h = (d.n() + d.p() + 1) / 2;
    }
    if (h < d.p() || h > d.n()) {
        std::ostringstream msg;
        msg << "fit_lts: h = " << h << " outside [p, n] = [" << p << ", " << n << "]";
        throw std::invalid_argument(msg.str());
    }
    if (h == d.n()) {
        FitResult res = fit_ls(d); // no trimming
        res.wall_time = Clock::now() - t0;
        return res;
    }

    constexpr int kResampleCap = 50;
    constexpr int kMaxCSteps = 100;

    bool have_best = false;
    double best_obj = std::numeric_limits<double>::infinity();
    Eigen::VectorXd best_beta;
    int total_csteps = 0;

    for (int s = 0; s < n_starts; ++s) {
        std::mt19937_64 gen(rng::derive_seed(seed, static_cast<std::uint64_t>(s)));

        // elemental start: exact fit on a random p-subset
        Eigen::VectorXd beta;
        bool ok = false;
        int attempts = 0;
        while (!ok) {
            if (attempts++ >= kResampleCap) {
                throw RankDeficient(
                    "fit_lts: could not find a nonsingular elemental p-subset");
            }
            const std::vector<int> rows = sample_indices(gen, n, p);
            beta = solve_ls_rows(d.design(), d.y(), rows, ok);
        }

        // concentration steps until the h-subset is stable
        std::vector<int> rows = best_h_rows(residuals(d, beta), h);
        for (int step = 0; step < kMaxCSteps; ++step) {
            bool sub_ok = false;
            const Eigen::VectorXd candidate = solve_ls_rows(d.design(), d.y(), rows, sub_ok);
            if (!sub_ok) {
                break; // degenerate h-subset; keep the current iterate
            }
            beta = candidate;
            ++total_csteps;
            std::vector<int> next = best_h_rows(residuals(d, beta), h);
            if (next == rows) {
                break;
            }
            rows = std::move(next);
        }

        const double obj = trimmed_sse(residuals(d, beta), h);
        if (!have_best || obj < best_obj) { // strict: ties keep the lowest start index
            have_best = true;
            best_obj = obj;
            best_beta = beta;
        }
    }

    FitResult res;
    res.beta = std::move(best_beta);
    res.objective = best_obj;
    res.gradient_norm = 0.0;
    res.iterations = total_csteps;
    res.converged = true;
    res.wall_time = Clock::now() - t0;
    return res;
}

namespace {

struct LineSearchOutcome {
    bool moved = false;
    Coefficients beta;
    double value = 0.0;
};

// Armijo backtracking from alpha0 along a descent direction v (g'v < 0).
LineSearchOutcome backtrack(const ObjectiveContext& ctx, const Coefficients& beta,
                            double value, const Eigen::VectorXd& g,
                            const Eigen::VectorXd& v, double alpha0,
                            const FitConfig& cfg) {
    LineSearchOutcome out;
    const double slope = g.dot(v);
    double alpha = alpha0;
    const double alpha_min =
        1e-20 * (1.0 + beta.norm()) / std::max(v.norm(), 1e-300);
    while (alpha > alpha_min) {
        Coefficients candidate = beta + alpha * v;
        const double cval = ctx.value(candidate);
        if (std::isfinite(cval) && cval <= value + cfg.armijo_slope * alpha * slope) {
            out.moved = true;
            out.beta = std::move(candidate);
            out.value = cval;
            return out;
        }
        alpha *= cfg.backtrack_shrink;
    }
    return out;
}

} // namespace

FitResult fit_wls(const Dataset& d, const FitConfig& cfg) {
    const auto t0 = Clock::now();
    validate_fit_config(cfg);

    const RankScreen screen = check_general_position_hint(d);
    if (!screen.full_rank) {
        throw RankDeficient("fit_wls: " + screen.diagnostic);
    }

    // initializer
    FitResult init;
    switch (cfg.initializer) {
        case InitializerKind::Lts:
            init = fit_lts(d, cfg.lts_h, cfg.lts_n_starts, cfg.rng_seed);
            break;
        case InitializerKind::Ls:
            init = fit_ls(d);
            break;
        case InitializerKind::Given:
            if (cfg.given_initial.size() != d.p() || !cfg.given_initial.allFinite()) {
                throw std::invalid_argument(
                    "fit_wls: given initial coefficients must be finite and of length p");
            }
            init.beta = cfg.given_initial;
            init.converged = true;
            break;
    }

    double cstar;
    try {
        cstar = compute_cstar(d, cfg.scale_mode, init.beta);
    } catch (const DegenerateScale&) {
        if (!cfg.allow_scale_floor) {
            throw;
        }
        const double ymax2 = d.y().cwiseAbs2().maxCoeff();
        cstar = 1e-12 * (1.0 + ymax2);
    }

    const ObjectiveContext ctx(d, cfg.weight_params, cstar);

    Coefficients beta = init.beta;
    double value = ctx.value(beta);
    if (!std::isfinite(value)) {
        throw NonFinite("fit_wls: objective is non-finite at the initializer");
    }
    const double init_value = value;

    Eigen::VectorXd g = ctx.gradient(beta);
    double gnorm = g.norm();
    int iterations = 0;
    bool converged = gnorm < cfg.tolerance;
    bool stuck = false;

    const Eigen::Index restart_len = d.p(); // direction restart every p steps

    for (int cycle = 0; cycle < cfg.max_outer_cycles && !converged && !stuck; ++cycle) {
        Eigen::VectorXd v = -g;
        bool steepest = true;
        for (Eigen::Index k = 0; k < restart_len; ++k) {
            if (g.dot(v) >= 0.0) {
                v = -g; // FR direction lost descent; fall back to steepest
                steepest = true;
            }

            LineSearchOutcome step;
            if (cfg.line_search == LineSearch::NewtonStep) {
                const Eigen::MatrixXd h = ctx.hessian(beta);
                const double curvature = v.dot(h * v);
                if (curvature > 0.0) {
                    const double alpha = -g.dot(v) / curvature;
                    Coefficients candidate = beta + alpha * v;
                    const double cval = ctx.value(candidate);
                    if (std::isfinite(cval) && cval <= value) {
                        step.moved = true;
                        step.beta = std::move(candidate);
                        step.value = cval;
                    }
                }
            }
            if (!step.moved) {
                step = backtrack(ctx, beta, value, g, v, 1.0, cfg);
            }
            if (!step.moved && !steepest) {
                v = -g; // retry along steepest descent before giving up
                steepest = true;
                step = backtrack(ctx, beta, value, g, v, 1.0, cfg);
            }
            if (!step.moved) {
                stuck = true; // no representable decrease left
                break;
            }

            beta = std::move(step.beta);
            value = step.value;
            ++iterations;

            Eigen::VectorXd g_next = ctx.gradient(beta);
            const double gnorm_next = g_next.norm();
            if (gnorm_next < cfg.tolerance) {
                g = std::move(g_next);
                gnorm = gnorm_next;
                converged = true;
                break;
            }
            if (k + 1 < restart_len) {
                const double fr = (gnorm_next * gnorm_next) / (gnorm * gnorm);
                v = -g_next + fr * v;
                steepest = false;
            }
            g = std::move(g_next);
            gnorm = gnorm_next;
        }
    }

    FitResult res;
    if (cfg.keep_best_of_initializer && init_value < value) {
        res.beta = init.beta;
        res.objective = init_value;
        res.gradient_norm = ctx.gradient(init.beta).norm();
        res.converged = res.gradient_norm < cfg.tolerance;
    } else {
        res.beta = std::move(beta);
        res.objective = value;
        res.gradient_norm = gnorm;
        res.converged = converged;
    }
    res.iterations = iterations;
    res.wall_time = Clock::now() - t0;
    return res;
}

Rational rbp_theoretical(long long n, long long p) {
    if (p < 1 || n <= p) {
        throw std::invalid_argument("rbp_theoretical: need n > p >= 1");
    }
    Rational r;
    r.den = n;
    r.num = (p == 1) ? (n + 1) / 2 : (n - p) / 2 + 1;
    return r;
}

} // namespace wlsreg
