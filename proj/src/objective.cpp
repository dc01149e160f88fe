#include "wlsreg/objective.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace wlsreg {

ObjectiveContext::ObjectiveContext(const Dataset& d, WeightParams params, double cstar)
    : data_(d), params_(params), cstar_(cstar) {
    validate_weight_params(params_);
    if (!(cstar_ > 0.0) || !std::isfinite(cstar_)) {
        throw std::invalid_argument("ObjectiveContext: cstar must be positive and finite");
    }
}

double ObjectiveContext::value(const Coefficients& b) const {
    const Eigen::VectorXd r = residuals(data_, b);
    double sum = 0.0;
    for (Eigen::Index i = 0; i < r.size(); ++i) {
        sum += psi(params_, cstar_, r[i]); // non-finite residuals propagate
    }
    return sum;
}

Eigen::VectorXd ObjectiveContext::gradient(const Coefficients& b) const {
    const Eigen::VectorXd r = residuals(data_, b);
    Eigen::VectorXd scale(r.size());
    for (Eigen::Index i = 0; i < r.size(); ++i) {
        if (!std::isfinite(r[i])) {
            scale[i] = std::numeric_limits<double>::quiet_NaN();
            continue;
        }
        const double u = r[i] * r[i] / cstar_;
        if (std::isinf(u)) {
            scale[i] = 0.0; // -2r(u w'(u) + w(u)) -> 0 as r^2 overflows
            continue;
        }
        scale[i] = -2.0 * r[i] * (weight_d1(params_, u) * u + weight(params_, u));
    }
    return data_.design().transpose() * scale;
}

Eigen::MatrixXd ObjectiveContext::hessian(const Coefficients& b) const {
    const Eigen::VectorXd r = residuals(data_, b);
    Eigen::VectorXd gamma(r.size());
    for (Eigen::Index i = 0; i < r.size(); ++i) {
        if (!std::isfinite(r[i])) {
            gamma[i] = std::numeric_limits<double>::quiet_NaN();
            continue;
        }
        const double u = r[i] * r[i] / cstar_;
        if (std::isinf(u)) {
            gamma[i] = 0.0; // all three terms vanish in the tail limit
            continue;
        }
        gamma[i] = weight(params_, u) + 5.0 * u * weight_d1(params_, u) +
                   2.0 * u * u * weight_d2(params_, u);
    }
    Eigen::MatrixXd h =
        2.0 * data_.design().transpose() * gamma.asDiagonal() * data_.design();
    return 0.5 * (h + h.transpose()); // exact symmetry
}

} // namespace wlsreg
