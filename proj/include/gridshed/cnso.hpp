#pragma once

// The exact-penalty layer: phi(x) = p'x + omega*||c(x)||_1, its linearized
// model, reduction bookkeeping, and active-set queries on the box.

#include <Eigen/Core>
#include <Eigen/SparseCore>
#include <stdexcept>
#include <vector>

#include "gridshed/errors.hpp"
#include "gridshed/gno.hpp"

namespace gridshed {

inline constexpr double kActivityTol = 1e-9;

struct OutOfBox : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NegativeExpectedReduction : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct PenaltyEval {
    double phi = 0;
    double linear_part = 0;        // p'x
    Eigen::VectorXd c_val;
};

PenaltyEval penalty(const GnoProblem& prob, const Eigen::VectorXd& x);

// p'(x_k + d) + omega*||c_k + J_k d||_1
double model_value(const GnoProblem& prob, const Eigen::VectorXd& x_k,
                   const Eigen::SparseMatrix<double>& jac_k, const Eigen::VectorXd& c_k,
                   const Eigen::VectorXd& d);

struct Agreement {
    double dphi = 0;   // actual reduction
    double dm = 0;     // expected reduction
    double rho = 0;    // dphi/dm, +inf when dm == 0 and dphi >= 0
};

Agreement agreement(double phi_k, double phi_trial, double model_at_d);

struct ActiveSets {
    std::vector<int> lower, upper, inactive;

    bool lower_active(int i) const;
    bool upper_active(int i) const;
    // number of indices present in exactly one of {this, other}
    int symmetric_difference(const ActiveSets& other) const;
};

ActiveSets active_sets(const GnoProblem& prob, const Eigen::VectorXd& x,
                       double tol = kActivityTol);

}  // namespace gridshed
