#include "wlsreg/bench.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <thread>

namespace wlsreg {

namespace rng {

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

double GaussianSampler::operator()() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    double u1 = unit(gen_);
    while (u1 <= 0.0) {
        u1 = unit(gen_);
    }
    const double u2 = unit(gen_);
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * M_PI * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
}

} // namespace rng

const char* estimator_name(EstimatorKind kind) {
    switch (kind) {
        case EstimatorKind::Ls: return "ls";
        case EstimatorKind::Lts: return "lts";
        case EstimatorKind::Wls: return "wls";
    }
    return "?";
}

int SimulationSpec::contaminated_count() const {
    // nudge against binary round-up: 50 * 0.1 must give 5, not 6
    return static_cast<int>(std::ceil(n * epsilon - 1e-9));
}

Eigen::VectorXd SimulationSpec::resolved_replacement_point() const {
    if (replacement_point.size() > 0) {
        return replacement_point;
    }
    Eigen::VectorXd point = Eigen::VectorXd::Constant(p, 3.0);
    point[p - 1] = -3.0;
    return point;
}

Eigen::VectorXd SimulationSpec::emse_reference() const {
    if (scheme == Scheme::FixedBeta) {
        return beta0;
    }
    return Eigen::VectorXd::Zero(p);
}

void validate_simulation_spec(const SimulationSpec& spec) {
    if (spec.n < 1 || spec.p < 1) {
        throw std::invalid_argument("SimulationSpec: need n >= 1 and p >= 1");
    }
    if (!(spec.epsilon >= 0.0) || spec.epsilon >= 0.5) {
        throw std::invalid_argument("SimulationSpec: epsilon must be in [0, 0.5)");
    }
    if (spec.contaminated_count() > spec.n) {
        throw std::invalid_argument("SimulationSpec: ceil(n*epsilon) exceeds n");
    }
    // positive definiteness of the equicorrelated covariance
    if (spec.p > 1 && (spec.rho >= 1.0 || spec.rho <= -1.0 / (spec.p - 1))) {
        throw std::invalid_argument("SimulationSpec: rho outside (-1/(p-1), 1)");
    }
    if (spec.replications < 1) {
        throw std::invalid_argument("SimulationSpec: replications must be positive");
    }
    if (spec.scheme == SimulationSpec::Scheme::FixedBeta && spec.beta0.size() != spec.p) {
        throw std::invalid_argument("SimulationSpec: FixedBeta needs beta0 of length p");
    }
    if (spec.replacement_point.size() > 0 && spec.replacement_point.size() != spec.p) {
        throw std::invalid_argument("SimulationSpec: replacement point must have length p");
    }
}

Dataset gen_contaminated(const SimulationSpec& spec, int rep_index) {
    validate_simulation_spec(spec);
    const int n = spec.n;
    const int p = spec.p;
    rng::GaussianSampler gauss(spec.seed ^ static_cast<std::uint64_t>(rep_index));

    Eigen::MatrixXd carriers(n, p - 1);
    Eigen::VectorXd y(n);

    if (spec.scheme == SimulationSpec::Scheme::JointNormalReplace) {
        // symmetric square root of (1-rho) I + rho J:
        //   sqrt(Sigma) = b I + ((a-b)/p) J,  a = sqrt(1+(p-1)rho), b = sqrt(1-rho)
        const double a = std::sqrt(1.0 + (p - 1) * spec.rho);
        const double b = std::sqrt(1.0 - spec.rho);
        Eigen::VectorXd g(p);
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < p; ++j) {
                g[j] = gauss();
            }
            const double shift = (a - b) / p * g.sum();
            for (int j = 0; j < p - 1; ++j) {
                carriers(i, j) = b * g[j] + shift;
            }
            y[i] = b * g[p - 1] + shift;
        }
    } else {
        for (int i = 0; i < n; ++i) {
            double mean = spec.beta0[0];
            for (int j = 0; j < p - 1; ++j) {
                carriers(i, j) = gauss();
                mean += spec.beta0[j + 1] * carriers(i, j);
            }
            y[i] = mean + gauss();
        }
    }

    const int m = spec.contaminated_count();
    if (m > 0) {
        const Eigen::VectorXd point = spec.resolved_replacement_point();
        // distinct rows, uniformly chosen, from the same stream
        std::vector<int> pool(static_cast<std::size_t>(n));
        std::iota(pool.begin(), pool.end(), 0);
        for (int i = 0; i < m; ++i) {
            std::uniform_int_distribution<int> pick(i, n - 1);
            std::swap(pool[static_cast<std::size_t>(i)],
                      pool[static_cast<std::size_t>(pick(gauss.engine()))]);
            const int row = pool[static_cast<std::size_t>(i)];
            for (int j = 0; j < p - 1; ++j) {
                carriers(row, j) = point[j];
            }
            y[row] = point[p - 1];
        }
    }

    return Dataset(std::move(carriers), std::move(y));
}

double emse(const std::vector<Coefficients>& fits, const Coefficients& beta0) {
    if (fits.empty()) {
        throw std::invalid_argument("emse: no fits");
    }
    double sum = 0.0;
    for (const auto& fit : fits) {
        if (fit.size() != beta0.size()) {
            throw std::invalid_argument("emse: fit length differs from beta0");
        }
        sum += (fit - beta0).squaredNorm();
    }
    return sum / static_cast<double>(fits.size());
}

double relative_efficiency(double emse_ls, double emse_proc) {
    return emse_ls / emse_proc; // IEEE: 0/0 -> NaN, 0/x -> 0, x/0 -> inf
}

FitResult fit_estimator(EstimatorKind kind, const Dataset& d, const FitConfig& cfg) {
    switch (kind) {
        case EstimatorKind::Ls:
            return fit_ls(d);
        case EstimatorKind::Lts:
            return fit_lts(d, cfg.lts_h, cfg.lts_n_starts, cfg.rng_seed);
        case EstimatorKind::Wls:
            return fit_wls(d, cfg);
    }
    throw std::logic_error("fit_estimator: unknown estimator");
}

MetricsReport run_study(const SimulationSpec& spec,
                        const std::vector<EstimatorKind>& estimators,
                        const FitConfig& cfg, int threads) {
    validate_simulation_spec(spec);
    validate_fit_config(cfg);
    if (estimators.empty()) {
        throw std::invalid_argument("run_study: no estimators selected");
    }
    const int reps = spec.replications;
    threads = std::max(1, std::min(threads, reps));

    struct RepOutcome {
        bool ok = false;
        Coefficients beta;
        double seconds = 0.0;
    };
    std::vector<std::vector<RepOutcome>> results(
        estimators.size(), std::vector<RepOutcome>(static_cast<std::size_t>(reps)));

    auto worker = [&](int first, int stride) {
        for (int rep = first; rep < reps; rep += stride) {
            const Dataset data = gen_contaminated(spec, rep);
            FitConfig rep_cfg = cfg;
            rep_cfg.rng_seed = rng::derive_seed(cfg.rng_seed, static_cast<std::uint64_t>(rep));
            for (std::size_t e = 0; e < estimators.size(); ++e) {
                RepOutcome& out = results[e][static_cast<std::size_t>(rep)];
                const auto t0 = std::chrono::steady_clock::now();
                try {
                    FitResult fit = fit_estimator(estimators[e], data, rep_cfg);
                    out.ok = true;
                    out.beta = std::move(fit.beta);
                } catch (const std::exception&) {
                    out.ok = false;
                }
                out.seconds =
                    std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                        .count();
            }
        }
    };

    if (threads == 1) {
        worker(0, 1);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(threads));
        for (int t = 0; t < threads; ++t) {
            pool.emplace_back(worker, t, threads);
        }
        for (auto& th : pool) {
            th.join();
        }
    }

    const Eigen::VectorXd reference = spec.emse_reference();
    MetricsReport report;
    report.spec = spec;
    report.valid = true;

    double emse_ls = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t e = 0; e < estimators.size(); ++e) {
        EstimatorMetrics metrics;
        metrics.kind = estimators[e];
        std::vector<Coefficients> fits;
        fits.reserve(static_cast<std::size_t>(reps));
        for (int rep = 0; rep < reps; ++rep) { // fixed aggregation order
            const RepOutcome& out = results[e][static_cast<std::size_t>(rep)];
            if (out.ok) {
                fits.push_back(out.beta);
                metrics.total_time_seconds += out.seconds;
            } else {
                ++metrics.failures;
            }
        }
        metrics.emse = fits.empty() ? std::numeric_limits<double>::quiet_NaN()
                                    : emse(fits, reference);
        if (metrics.failures * 20 > reps) { // > 5%
            report.valid = false;
        }
        if (estimators[e] == EstimatorKind::Ls) {
            emse_ls = metrics.emse;
        }
        report.estimators.push_back(std::move(metrics));
    }
    for (auto& metrics : report.estimators) {
        metrics.re = relative_efficiency(emse_ls, metrics.emse);
    }
    return report;
}

double breakdown_probe(const Dataset& d, EstimatorKind kind, const FitConfig& cfg,
                       int m, double magnitude) {
    if (m < 0 || m >= d.n()) {
        throw std::invalid_argument("breakdown_probe: need 0 <= m < n");
    }
    const FitResult clean = fit_estimator(kind, d, cfg);

    double worst = 0.0;
    for (int pattern = 0; pattern < 2; ++pattern) {
        Eigen::MatrixXd carriers = d.carriers();
        Eigen::VectorXd y = d.y();
        for (int i = 0; i < m; ++i) {
            if (pattern == 0) { // bad leverage: (M, ..., M, -M)
                carriers.row(i).setConstant(magnitude);
                y[i] = -magnitude;
            } else { // vertical outlier: carriers untouched
                y[i] = magnitude;
            }
        }
        double deviation;
        try {
            const FitResult dirty =
                fit_estimator(kind, Dataset(std::move(carriers), std::move(y)), cfg);
            deviation = (dirty.beta - clean.beta).norm();
        } catch (const std::exception&) {
            deviation = std::numeric_limits<double>::infinity();
        }
        worst = std::max(worst, deviation);
    }
    return worst;
}

EquivarianceReport equivariance_probe(const Dataset& d, EstimatorKind kind,
                                      const FitConfig& cfg, int n_transforms,
                                      std::uint64_t seed) {
    const Eigen::Index p = d.p();
    const FitResult base = fit_estimator(kind, d, cfg);
    rng::GaussianSampler gauss(rng::derive_seed(seed, 0x5a5a5a5aULL));
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    EquivarianceReport report;
    for (int t = 0; t < n_transforms; ++t) {
        // regression shift
        Eigen::VectorXd b(p);
        for (Eigen::Index j = 0; j < p; ++j) {
            b[j] = 4.0 * unit(gauss.engine()) - 2.0;
        }
        {
            Dataset shifted(d.carriers(), d.y() + d.design() * b);
            const FitResult fit = fit_estimator(kind, shifted, cfg);
            report.regression_dev = std::max(
                report.regression_dev,
                (fit.beta - (base.beta + b)).cwiseAbs().maxCoeff());
        }

        // response scaling, away from zero
        double s = 0.5 + 2.5 * unit(gauss.engine());
        if (unit(gauss.engine()) < 0.5) {
            s = -s;
        }
        {
            Dataset scaled(d.carriers(), s * d.y());
            const FitResult fit = fit_estimator(kind, scaled, cfg);
            report.scale_dev = std::max(
                report.scale_dev, (fit.beta - s * base.beta).cwiseAbs().maxCoeff());
        }

        // affine map preserving the intercept column: first column of A is e1
        Eigen::MatrixXd a(p, p);
        while (true) {
            a.setZero();
            a(0, 0) = 1.0;
            for (Eigen::Index j = 1; j < p; ++j) {
                a(0, j) = 2.0 * unit(gauss.engine()) - 1.0;
                for (Eigen::Index i = 1; i < p; ++i) {
                    a(i, j) = 2.0 * unit(gauss.engine()) - 1.0;
                }
            }
            Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
            if (svd.singularValues().minCoeff() > 0.2) {
                break; // well-conditioned draw
            }
        }
        {
            const Eigen::MatrixXd new_design = d.design() * a;
            Dataset mapped(new_design.rightCols(p - 1), d.y());
            const FitResult fit = fit_estimator(kind, mapped, cfg);
            report.affine_dev = std::max(
                report.affine_dev, (a * fit.beta - base.beta).cwiseAbs().maxCoeff());
        }
    }
    return report;
}

} // namespace wlsreg
