#pragma once

// Canonical problem form: min p'x  s.t. c(x) = 0, lb <= x <= ub, with the
// nonlinearity isolated in c.  Evaluation callbacks must be reentrant.

#include <Eigen/Core>
#include <Eigen/SparseCore>
#include <functional>
#include <limits>
#include <string>
#include <vector>

namespace gridshed {

struct VariableSlice {
    std::string name;
    int offset = 0;
    int size = 0;
};

struct GnoProblem {
    Eigen::VectorXd p;
    Eigen::VectorXd lb, ub;
    Eigen::VectorXd x0;
    double omega = 1.0;
    int m = 0;   // number of equality constraints

    std::function<Eigen::VectorXd(const Eigen::VectorXd&)> c;
    std::function<Eigen::SparseMatrix<double>(const Eigen::VectorXd&)> jac;
    // sum_i lambda_i * hessian(c_i); lambda has length m
    std::function<Eigen::SparseMatrix<double>(const Eigen::VectorXd&, const Eigen::VectorXd&)>
        lag_hess;

    std::vector<VariableSlice> layout;
    double known_best = std::numeric_limits<double>::quiet_NaN();

    int n() const { return static_cast<int>(p.size()); }
    const VariableSlice* slice(const std::string& name) const {
        for (const auto& s : layout)
            if (s.name == name) return &s;
        return nullptr;
    }
};

}  // namespace gridshed
