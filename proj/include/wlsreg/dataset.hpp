#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

#include "wlsreg/errors.hpp"

namespace wlsreg {

// Coefficient vector beta; beta[0] is the intercept, the rest are slopes.
using Coefficients = Eigen::VectorXd;

// Regression sample: n carrier rows x_i in R^(p-1) and responses y_i.
// Design rows are w_i = (1, x_i^T)^T; the full n-by-p design matrix with the
// intercept column is built once at construction. Immutable afterwards and
// safe to share across threads.
class Dataset {
public:
    Dataset(Eigen::MatrixXd carriers, Eigen::VectorXd y);

    Eigen::Index n() const { return y_.size(); }
    Eigen::Index p() const { return design_.cols(); }

    const Eigen::MatrixXd& carriers() const { return carriers_; }
    const Eigen::VectorXd& y() const { return y_; }
    const Eigen::MatrixXd& design() const { return design_; }

private:
    Eigen::MatrixXd carriers_;
    Eigen::VectorXd y_;
    Eigen::MatrixXd design_;
};

// How the scale constant c* normalizing squared residuals is computed.
enum class ScaleMode {
    MedianYSquared,               // median of squared responses
    MedianInitialResidualSquared, // median of squared residuals at an initial fit
};

// r_i = y_i - w_i^T b.
Eigen::VectorXd residuals(const Dataset& d, const Coefficients& b);

// Median with the even-n convention: average of the two central order statistics.
double median(std::vector<double> values);

// Resolves c* > 0 for the given mode. MedianInitialResidualSquared requires
// the initial fit used as the scale reference. Throws DegenerateScale when
// the resolved value is not strictly positive.
double compute_cstar(const Dataset& d, ScaleMode mode,
                     const Coefficients& initial_fit = Coefficients());

// Necessary-condition screen for general position: numerical rank of the
// design matrix. Advisory only; exhaustive p-subset certification is not
// attempted.
struct RankScreen {
    bool full_rank = false;
    Eigen::Index rank = 0;
    std::string diagnostic; // empty when full_rank
};

RankScreen check_general_position_hint(const Dataset& d);

} // namespace wlsreg
