#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "wlsreg/dataset.hpp"
#include "wlsreg/solvers.hpp"

namespace wlsreg {

enum class EstimatorKind { Ls, Lts, Wls };

const char* estimator_name(EstimatorKind kind);

// Monte-Carlo study cell. Two generation schemes:
//   JointNormalReplace: z_i ~ N(0, Sigma) in R^p (last coordinate is y) with
//     Sigma = (1-rho) I + rho J, then m = ceil(n*eps) uniformly chosen rows
//     are overwritten by `replacement_point`. EMSE reference is beta0 = 0.
//   FixedBeta: x_i ~ N(0, I_{p-1}), e_i ~ N(0,1), y_i = (1,x_i^T) beta0 + e_i,
//     then m rows are replaced by `replacement_point`.
struct SimulationSpec {
    enum class Scheme { JointNormalReplace, FixedBeta };

    int n = 50;
    int p = 5;
    double epsilon = 0.0; // contamination fraction in [0, 0.5)
    double rho = 0.9;     // off-diagonal correlation (JointNormalReplace)
    int replications = 100;
    Scheme scheme = Scheme::JointNormalReplace;
    Eigen::VectorXd beta0;             // FixedBeta only, length p
    Eigen::VectorXd replacement_point; // length p: carriers then y; empty = (3,...,3,-3)
    std::uint64_t seed = 0;

    int contaminated_count() const; // m = ceil(n*epsilon)
    Eigen::VectorXd resolved_replacement_point() const;
    Eigen::VectorXd emse_reference() const; // beta0, or zeros for JointNormalReplace
};

void validate_simulation_spec(const SimulationSpec& spec);

// Deterministic in (spec.seed, rep_index); estimators see identical data.
Dataset gen_contaminated(const SimulationSpec& spec, int rep_index);

// Mean squared Euclidean deviation of the fits from beta0.
double emse(const std::vector<Coefficients>& fits, const Coefficients& beta0);

// EMSE(LS) / EMSE(proc) in IEEE arithmetic: NaN for 0/0, 0 when only the LS
// error vanishes, +inf when only the procedure's error vanishes.
double relative_efficiency(double emse_ls, double emse_proc);

struct EstimatorMetrics {
    EstimatorKind kind = EstimatorKind::Ls;
    double emse = 0.0;
    double total_time_seconds = 0.0; // wall clock of the fit calls only
    double re = 1.0;                 // relative to LS; NaN when undefined
    int failures = 0;
};

struct MetricsReport {
    SimulationSpec spec;
    std::vector<EstimatorMetrics> estimators;
    bool valid = true; // false when any estimator failed on > 5% of replicates
};

// Runs the full study cell. Replicates may execute on `threads` workers; the
// report is identical to serial execution (per-replicate seeding, fixed-order
// aggregation).
MetricsReport run_study(const SimulationSpec& spec,
                        const std::vector<EstimatorKind>& estimators,
                        const FitConfig& cfg, int threads = 1);

// Replaces m rows with adversarial points at the given magnitude (bad
// leverage pattern (M,...,M,-M) and vertical outliers y = M, both tried),
// refits, and returns the max coefficient deviation from the clean fit over
// the patterns. A fit failure on contaminated data counts as breakdown
// (returns +inf).
double breakdown_probe(const Dataset& d, EstimatorKind kind, const FitConfig& cfg,
                       int m, double magnitude);

struct EquivarianceReport {
    double regression_dev = 0.0; // max |fit(X, y + Xb) - (fit(X, y) + b)|
    double scale_dev = 0.0;      // max |fit(X, s y) - s fit(X, y)|
    double affine_dev = 0.0;     // max |A fit(XA) - fit(X)|
};

// Applies n_transforms random (b, s, A) transforms and reports the max
// deviation for each of the three equivariance identities. A is restricted
// to matrices with first column e1 so the transformed design keeps its
// intercept column.
EquivarianceReport equivariance_probe(const Dataset& d, EstimatorKind kind,
                                      const FitConfig& cfg, int n_transforms,
                                      std::uint64_t seed);

// Fits one estimator; LTS/WLS use seeds derived from cfg.rng_seed.
FitResult fit_estimator(EstimatorKind kind, const Dataset& d, const FitConfig& cfg);

namespace rng {

// splitmix64 of (seed, index); used to derive independent substreams.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

// N(0,1) via Box-Muller on mt19937_64, so the variate stream does not depend
// on the standard library's (unspecified) normal_distribution.
class GaussianSampler {
public:
    explicit GaussianSampler(std::uint64_t seed) : gen_(seed) {}

    double operator()();
    std::mt19937_64& engine() { return gen_; }

private:
    std::mt19937_64 gen_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

} // namespace rng

} // namespace wlsreg
