#pragma once

#include <Eigen/Dense>

#include "wlsreg/dataset.hpp"
#include "wlsreg/weight.hpp"

namespace wlsreg {

// The weighted least squares objective O(b) = sum_i w(r_i^2/c*) r_i^2 with
// analytic gradient and Hessian. The scale c* is frozen at construction and
// never re-estimated during an optimization run (re-estimating per iterate
// would make O discontinuous in b).
//
// Gradient:  sum_i -2 r_i (u_i w'(u_i) + w(u_i)) w_i,            u_i = r_i^2/c*
// Hessian:   2 X^T diag(gamma) X,
//            gamma_i = w(u_i) + 5 u_i w'(u_i) + 2 u_i^2 w''(u_i)
// The +2 Hessian prefactor reduces to the least-squares Hessian 2 X^T X in
// the unit-weight region and matches finite differences of the gradient.
//
// Holds a reference to the dataset; the dataset must outlive the context.
class ObjectiveContext {
public:
    ObjectiveContext(const Dataset& d, WeightParams params, double cstar);

    double value(const Coefficients& b) const;
    Eigen::VectorXd gradient(const Coefficients& b) const;
    Eigen::MatrixXd hessian(const Coefficients& b) const;

    const Dataset& data() const { return data_; }
    const WeightParams& params() const { return params_; }
    double cstar() const { return cstar_; }

private:
    const Dataset& data_;
    WeightParams params_;
    double cstar_;
};

} // namespace wlsreg
