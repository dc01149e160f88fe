#include "wlsreg/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace wlsreg {

Dataset::Dataset(Eigen::MatrixXd carriers, Eigen::VectorXd y)
    : carriers_(std::move(carriers)), y_(std::move(y)) {
    if (y_.size() < 1) {
        throw std::invalid_argument("Dataset: need at least one observation");
    }
    if (carriers_.rows() != y_.size()) {
        std::ostringstream msg;
        msg << "Dataset: carrier rows (" << carriers_.rows() << ") != responses ("
            << y_.size() << ")";
        throw std::invalid_argument(msg.str());
    }
    if (!carriers_.allFinite() || !y_.allFinite()) {
        throw std::invalid_argument("Dataset: entries must be finite");
    }
    design_.resize(y_.size(), carriers_.cols() + 1);
    design_.col(0).setOnes();
    if (carriers_.cols() > 0) {
        design_.rightCols(carriers_.cols()) = carriers_;
    }
}

Eigen::VectorXd residuals(const Dataset& d, const Coefficients& b) {
    if (b.size() != d.p()) {
        std::ostringstream msg;
        msg << "residuals: coefficient length " << b.size() << " != p = " << d.p();
        throw std::invalid_argument(msg.str());
    }
    return d.y() - d.design() * b;
}

double median(std::vector<double> values) {
    if (values.empty()) {
        throw std::invalid_argument("median: empty input");
    }
    const std::size_t mid = values.size() / 2;
    std::nth_element(values.begin(), values.begin() + mid, values.end());
    double m = values[mid];
    if (values.size() % 2 == 0) {
        // even n: average of the two central order statistics
        const double lower = *std::max_element(values.begin(), values.begin() + mid);
        m = 0.5 * (lower + m);
    }
    return m;
}

double compute_cstar(const Dataset& d, ScaleMode mode, const Coefficients& initial_fit) {
    std::vector<double> squares(static_cast<std::size_t>(d.n()));
    if (mode == ScaleMode::MedianYSquared) {
        for (Eigen::Index i = 0; i < d.n(); ++i) {
            squares[static_cast<std::size_t>(i)] = d.y()[i] * d.y()[i];
        }
    } else {
        if (initial_fit.size() != d.p()) {
            throw std::invalid_argument(
                "compute_cstar: MedianInitialResidualSquared needs an initial fit of length p");
        }
        const Eigen::VectorXd r = residuals(d, initial_fit);
        for (Eigen::Index i = 0; i < d.n(); ++i) {
            squares[static_cast<std::size_t>(i)] = r[i] * r[i];
        }
    }
    const double cstar = median(std::move(squares));
    if (!(cstar > 0.0) || !std::isfinite(cstar)) {
        std::ostringstream msg;
        msg << "degenerate scale: resolved c* = " << cstar
            << " (not strictly positive)";
        throw DegenerateScale(msg.str());
    }
    return cstar;
}

RankScreen check_general_position_hint(const Dataset& d) {
    RankScreen screen;
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(d.design());
    screen.rank = qr.rank();
    screen.full_rank = (screen.rank == d.p());
    if (!screen.full_rank) {
        std::ostringstream msg;
        msg << "design matrix has numerical rank " << screen.rank << " < p = " << d.p()
            << "; observations cannot be in general position";
        screen.diagnostic = msg.str();
    }
    return screen;
}

} // namespace wlsreg
