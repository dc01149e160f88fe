// Command-line front end: fit estimators on CSV data, run Monte-Carlo
// comparison studies, probe breakdown/equivariance, and tabulate the weight
// function. Exit codes: 0 success, 1 input error, 2 non-convergence (or an
// invalid study report).
#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "wlsreg/bench.hpp"
#include "wlsreg/csv.hpp"
#include "wlsreg/dataset.hpp"
#include "wlsreg/solvers.hpp"
#include "wlsreg/weight.hpp"

namespace {

using namespace wlsreg;

struct EstimatorOptions {
    double k = 5.0;
    double c = 100.0;
    std::string scale_mode = "median-y2";
    double tolerance = 1e-8;
    int max_cycles = 50;
    std::string line_search = "newton";
    std::string initializer = "lts";
    int lts_starts = 500;
    int lts_h = 0;
    std::uint64_t seed = 0;
    bool scale_floor = false;
};

void add_estimator_options(CLI::App* cmd, EstimatorOptions& opt) {
    cmd->add_option("--k", opt.k, "Weight steepness k > 0");
    cmd->add_option("--c", opt.c, "Weight cutoff c > 0");
    cmd->add_option("--scale-mode", opt.scale_mode, "c* mode: median-y2 | median-initial-r2")
        ->check(CLI::IsMember({"median-y2", "median-initial-r2"}));
    cmd->add_option("--tol", opt.tolerance, "Gradient-norm tolerance");
    cmd->add_option("--max-cycles", opt.max_cycles, "Max conjugate-gradient restart cycles");
    cmd->add_option("--line-search", opt.line_search, "newton | backtracking")
        ->check(CLI::IsMember({"newton", "backtracking"}));
    cmd->add_option("--initializer", opt.initializer, "WLS start: lts | ls")
        ->check(CLI::IsMember({"lts", "ls"}));
    cmd->add_option("--lts-starts", opt.lts_starts, "Random elemental starts for LTS");
    cmd->add_option("--lts-h", opt.lts_h, "LTS coverage h (0 = floor((n+p+1)/2))");
    cmd->add_option("--seed", opt.seed, "RNG seed");
    cmd->add_flag("--scale-floor", opt.scale_floor,
                  "Substitute a tiny positive c* instead of refusing on degenerate scale");
}

FitConfig to_fit_config(const EstimatorOptions& opt) {
    FitConfig cfg;
    cfg.weight_params.k = opt.k;
    cfg.weight_params.c = opt.c;
    cfg.scale_mode = opt.scale_mode == "median-initial-r2"
                         ? ScaleMode::MedianInitialResidualSquared
                         : ScaleMode::MedianYSquared;
    cfg.tolerance = opt.tolerance;
    cfg.max_outer_cycles = opt.max_cycles;
    cfg.line_search =
        opt.line_search == "backtracking" ? LineSearch::Backtracking : LineSearch::NewtonStep;
    cfg.initializer = opt.initializer == "ls" ? InitializerKind::Ls : InitializerKind::Lts;
    cfg.lts_n_starts = opt.lts_starts;
    cfg.lts_h = opt.lts_h;
    cfg.rng_seed = opt.seed;
    cfg.allow_scale_floor = opt.scale_floor;
    return cfg;
}

EstimatorKind parse_estimator(const std::string& name) {
    if (name == "ls") return EstimatorKind::Ls;
    if (name == "lts") return EstimatorKind::Lts;
    if (name == "wls") return EstimatorKind::Wls;
    throw std::invalid_argument("unknown estimator '" + name + "'");
}

void warn_params(const WeightParams& params) {
    for (const auto& warning : weight_params_warnings(params)) {
        std::cerr << "warning: " << warning << "\n";
    }
}

// Synthetic clean-line data shared by the probe subcommands:
// carriers ~ N(0,1), beta_true = (1,...,1), y = X beta_true + noise*N(0,1).
Dataset synthetic_line_data(int n, int p, double noise, std::uint64_t seed) {
    rng::GaussianSampler gauss(rng::derive_seed(seed, 0xfeedULL));
    Eigen::MatrixXd carriers(n, p - 1);
    Eigen::VectorXd y(n);
    for (int i = 0; i < n; ++i) {
        double mean = 1.0;
        for (int j = 0; j < p - 1; ++j) {
            carriers(i, j) = gauss();
            mean += carriers(i, j);
        }
        y[i] = mean + noise * gauss();
    }
    return Dataset(std::move(carriers), std::move(y));
}

int cmd_fit(const std::string& input, const std::string& estimator,
            const EstimatorOptions& opt, const std::string& residuals_path) {
    const Dataset data = read_dataset_csv(input);
    const FitConfig cfg = to_fit_config(opt);
    warn_params(cfg.weight_params);

    const EstimatorKind kind = parse_estimator(estimator);
    const FitResult result = fit_estimator(kind, data, cfg);

    std::cout << "estimator: " << estimator_name(kind) << "\n";
    std::cout << "n: " << data.n() << "\np: " << data.p() << "\n";
    for (Eigen::Index j = 0; j < result.beta.size(); ++j) {
        std::cout << "beta[" << j << "]: " << format_double(result.beta[j]) << "\n";
    }
    std::cout << "objective: " << format_double(result.objective) << "\n";
    std::cout << "gradient_norm: " << format_double(result.gradient_norm) << "\n";
    std::cout << "iterations: " << result.iterations << "\n";
    std::cout << "converged: " << (result.converged ? "true" : "false") << "\n";
    std::cerr << "wall_time_seconds: " << result.wall_time.count() << "\n";

    if (!residuals_path.empty()) {
        const Eigen::VectorXd r = residuals(data, result.beta);
        std::vector<std::vector<double>> rows(static_cast<std::size_t>(r.size()));
        for (Eigen::Index i = 0; i < r.size(); ++i) {
            rows[static_cast<std::size_t>(i)] = {r[i]};
        }
        write_csv(residuals_path, {"residual"}, rows);
    }
    return result.converged ? 0 : 2;
}

int cmd_simulate(const SimulationSpec& spec, const std::vector<std::string>& estimator_names,
                 const EstimatorOptions& opt, int threads, const std::string& out_path,
                 bool omit_timing) {
    std::vector<EstimatorKind> kinds;
    for (const auto& name : estimator_names) {
        kinds.push_back(parse_estimator(name));
    }
    const FitConfig cfg = to_fit_config(opt);
    warn_params(cfg.weight_params);

    const MetricsReport report = run_study(spec, kinds, cfg, threads);

    std::printf("%4s %5s %6s %5s %12s %12s %10s %9s\n", "p", "n", "eps", "est", "emse",
                "tt_seconds", "re", "failures");
    for (const auto& metrics : report.estimators) {
        const double tt = omit_timing ? 0.0 : metrics.total_time_seconds;
        std::printf("%4d %5d %6.3f %5s %12.5g %12.5g %10.5g %9d\n", spec.p, spec.n,
                    spec.epsilon, estimator_name(metrics.kind), metrics.emse, tt, metrics.re,
                    metrics.failures);
    }

    if (!out_path.empty()) {
        std::ofstream out(out_path);
        if (!out) {
            throw CsvError("cannot write '" + out_path + "'");
        }
        out << "p,n,epsilon,estimator,emse,tt_seconds,re\n";
        for (const auto& metrics : report.estimators) {
            const double tt = omit_timing ? 0.0 : metrics.total_time_seconds;
            out << spec.p << ',' << spec.n << ',' << format_double(spec.epsilon) << ','
                << estimator_name(metrics.kind) << ',' << format_double(metrics.emse) << ','
                << format_double(tt) << ',' << format_double(metrics.re) << "\n";
        }
    }

    if (!report.valid) {
        std::cerr << "error: more than 5% of fits failed; report is invalid\n";
        return 2;
    }
    return 0;
}

int cmd_breakdown(const std::string& input, int n, int p, double noise, int m,
                  double magnitude, const std::string& estimator,
                  const EstimatorOptions& opt) {
    const FitConfig cfg = to_fit_config(opt);
    const Dataset data =
        input.empty() ? synthetic_line_data(n, p, noise, opt.seed) : read_dataset_csv(input);
    if (m < 0) {
        m = static_cast<int>((data.n() - data.p()) / 2);
    }
    const double deviation =
        breakdown_probe(data, parse_estimator(estimator), cfg, m, magnitude);
    const Rational rbp = rbp_theoretical(data.n(), data.p());
    std::cout << "estimator: " << estimator << "\n";
    std::cout << "replaced: " << m << " of " << data.n() << "\n";
    std::cout << "magnitude: " << format_double(magnitude) << "\n";
    std::cout << "max_deviation: " << format_double(deviation) << "\n";
    std::cout << "rbp_theoretical: " << rbp.num << "/" << rbp.den << " = "
              << format_double(rbp.value()) << "\n";
    return 0;
}

int cmd_equivariance(const std::string& input, int n, int p, double noise, int transforms,
                     const std::string& estimator, const EstimatorOptions& opt) {
    const FitConfig cfg = to_fit_config(opt);
    const Dataset data =
        input.empty() ? synthetic_line_data(n, p, noise, opt.seed) : read_dataset_csv(input);
    const EquivarianceReport report =
        equivariance_probe(data, parse_estimator(estimator), cfg, transforms, opt.seed);
    std::cout << "estimator: " << estimator << "\n";
    std::cout << "transforms: " << transforms << "\n";
    std::cout << "regression_dev: " << format_double(report.regression_dev) << "\n";
    std::cout << "scale_dev: " << format_double(report.scale_dev) << "\n";
    std::cout << "affine_dev: " << format_double(report.affine_dev) << "\n";
    return 0;
}

int cmd_weights_dump(double k, double c, double cstar, double grid_min, double grid_max,
                     int count, bool log_spacing, const std::string& out_path) {
    WeightParams params{k, c};
    validate_weight_params(params);
    warn_params(params);
    if (!(grid_min < grid_max) || count < 2) {
        throw std::invalid_argument("weights-dump: need min < max and count >= 2");
    }
    if (log_spacing && !(grid_min > 0.0)) {
        throw std::invalid_argument("weights-dump: log spacing needs min > 0");
    }

    std::vector<std::vector<double>> rows;
    rows.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        const double frac = static_cast<double>(i) / (count - 1);
        const double x = log_spacing
                             ? grid_min * std::pow(grid_max / grid_min, frac)
                             : grid_min + frac * (grid_max - grid_min);
        rows.push_back({x, weight(params, x), weight_d1(params, x), weight_d2(params, x),
                        psi(params, cstar, x)});
    }
    const std::vector<std::string> header = {"x", "w", "w_d1", "w_d2", "psi"};
    if (out_path.empty()) {
        std::cout << "x,w,w_d1,w_d2,psi\n";
        for (const auto& row : rows) {
            for (std::size_t i = 0; i < row.size(); ++i) {
                std::cout << (i ? "," : "") << format_double(row[i]);
            }
            std::cout << "\n";
        }
    } else {
        write_csv(out_path, header, rows);
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"wlsreg: robust weighted least squares regression toolkit"};
    app.require_subcommand(1);

    // fit
    auto* fit_cmd = app.add_subcommand("fit", "Fit an estimator to a CSV dataset");
    std::string fit_input;
    std::string fit_estimator_name = "wls";
    std::string fit_residuals;
    EstimatorOptions fit_opt;
    fit_cmd->add_option("input", fit_input, "CSV file; last column is the response")
        ->required();
    fit_cmd->add_option("--estimator", fit_estimator_name, "ls | lts | wls")
        ->check(CLI::IsMember({"ls", "lts", "wls"}));
    fit_cmd->add_option("--residuals", fit_residuals, "Write residuals to this CSV");
    add_estimator_options(fit_cmd, fit_opt);

    // simulate
    auto* sim_cmd = app.add_subcommand("simulate", "Monte-Carlo estimator comparison");
    SimulationSpec spec;
    std::vector<std::string> sim_estimators = {"lts", "wls", "ls"};
    std::vector<double> sim_beta0;
    std::vector<double> sim_point;
    std::string sim_scheme = "joint-normal";
    std::string sim_out;
    int sim_threads = 1;
    bool sim_omit_timing = false;
    EstimatorOptions sim_opt;
    sim_cmd->add_option("--n", spec.n, "Observations per replicate");
    sim_cmd->add_option("--p", spec.p, "Dimension (intercept included)");
    sim_cmd->add_option("--eps", spec.epsilon, "Contamination fraction in [0, 0.5)");
    sim_cmd->add_option("--rho", spec.rho, "Off-diagonal correlation");
    sim_cmd->add_option("--reps", spec.replications, "Replications");
    sim_cmd->add_option("--scheme", sim_scheme, "joint-normal | fixed-beta")
        ->check(CLI::IsMember({"joint-normal", "fixed-beta"}));
    sim_cmd->add_option("--beta0", sim_beta0, "True coefficients (fixed-beta scheme)")
        ->delimiter(',');
    sim_cmd->add_option("--point", sim_point, "Replacement point, length p")->delimiter(',');
    sim_cmd->add_option("--estimators", sim_estimators, "Comma-separated subset of ls,lts,wls")
        ->delimiter(',');
    sim_cmd->add_option("--threads", sim_threads, "Worker threads (1 = serial)");
    sim_cmd->add_option("--out", sim_out, "Study CSV path");
    sim_cmd->add_flag("--omit-timing", sim_omit_timing,
                      "Write tt_seconds as 0 for byte-reproducible output");
    add_estimator_options(sim_cmd, sim_opt);

    // breakdown
    auto* bd_cmd = app.add_subcommand("breakdown", "Adversarial replacement probe");
    std::string bd_input;
    int bd_n = 50, bd_p = 5, bd_m = -1;
    double bd_noise = 0.1, bd_magnitude = 1e6;
    std::string bd_estimator = "wls";
    EstimatorOptions bd_opt;
    bd_cmd->add_option("--input", bd_input, "CSV dataset (default: synthetic line data)");
    bd_cmd->add_option("--n", bd_n, "Synthetic data size");
    bd_cmd->add_option("--p", bd_p, "Synthetic data dimension");
    bd_cmd->add_option("--noise", bd_noise, "Synthetic noise scale");
    bd_cmd->add_option("--m", bd_m, "Rows to replace (default floor((n-p)/2))");
    bd_cmd->add_option("--magnitude", bd_magnitude, "Outlier magnitude");
    bd_cmd->add_option("--estimator", bd_estimator, "ls | lts | wls")
        ->check(CLI::IsMember({"ls", "lts", "wls"}));
    add_estimator_options(bd_cmd, bd_opt);

    // equivariance
    auto* eq_cmd = app.add_subcommand("equivariance", "Transformation-identity probe");
    std::string eq_input;
    int eq_n = 50, eq_p = 5, eq_transforms = 20;
    double eq_noise = 0.1;
    std::string eq_estimator = "wls";
    EstimatorOptions eq_opt;
    eq_cmd->add_option("--input", eq_input, "CSV dataset (default: synthetic line data)");
    eq_cmd->add_option("--n", eq_n, "Synthetic data size");
    eq_cmd->add_option("--p", eq_p, "Synthetic data dimension");
    eq_cmd->add_option("--noise", eq_noise, "Synthetic noise scale");
    eq_cmd->add_option("--transforms", eq_transforms, "Random transforms per identity");
    eq_cmd->add_option("--estimator", eq_estimator, "ls | lts | wls")
        ->check(CLI::IsMember({"ls", "lts", "wls"}));
    add_estimator_options(eq_cmd, eq_opt);

    // weights-dump
    auto* wd_cmd = app.add_subcommand("weights-dump", "Tabulate w, w', w'', psi over a grid");
    double wd_k = 5.0, wd_c = 100.0, wd_cstar = 1.0, wd_min = 0.0, wd_max = 1000.0;
    int wd_count = 1001;
    bool wd_log = false;
    std::string wd_out;
    wd_cmd->add_option("--k", wd_k, "Steepness k");
    wd_cmd->add_option("--c", wd_c, "Cutoff c");
    wd_cmd->add_option("--cstar", wd_cstar, "Scale c* used by the psi column");
    wd_cmd->add_option("--min", wd_min, "Grid minimum");
    wd_cmd->add_option("--max", wd_max, "Grid maximum");
    wd_cmd->add_option("--count", wd_count, "Grid points");
    wd_cmd->add_flag("--log", wd_log, "Log-spaced grid (min must be > 0)");
    wd_cmd->add_option("--out", wd_out, "Output CSV (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_name() == "CallForHelp" || e.get_name() == "CallForAllHelp") {
            return app.exit(e);
        }
        app.exit(e);
        return 1;
    }

    try {
        if (fit_cmd->parsed()) {
            return cmd_fit(fit_input, fit_estimator_name, fit_opt, fit_residuals);
        }
        if (sim_cmd->parsed()) {
            if (sim_scheme == "fixed-beta") {
                spec.scheme = SimulationSpec::Scheme::FixedBeta;
                spec.beta0 = Eigen::Map<const Eigen::VectorXd>(
                    sim_beta0.data(), static_cast<Eigen::Index>(sim_beta0.size()));
            }
            if (!sim_point.empty()) {
                spec.replacement_point = Eigen::Map<const Eigen::VectorXd>(
                    sim_point.data(), static_cast<Eigen::Index>(sim_point.size()));
            }
            spec.seed = sim_opt.seed;
            return cmd_simulate(spec, sim_estimators, sim_opt, sim_threads, sim_out,
                                sim_omit_timing);
        }
        if (bd_cmd->parsed()) {
            return cmd_breakdown(bd_input, bd_n, bd_p, bd_noise, bd_m, bd_magnitude,
                                 bd_estimator, bd_opt);
        }
        if (eq_cmd->parsed()) {
            return cmd_equivariance(eq_input, eq_n, eq_p, eq_noise, eq_transforms,
                                    eq_estimator, eq_opt);
        }
        if (wd_cmd->parsed()) {
            return cmd_weights_dump(wd_k, wd_c, wd_cstar, wd_min, wd_max, wd_count, wd_log,
                                    wd_out);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
