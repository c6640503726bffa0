#include "gridshed/cnso.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace gridshed {

PenaltyEval penalty(const GnoProblem& prob, const Eigen::VectorXd& x) {
    for (int i = 0; i < prob.n(); ++i)
        if (x[i] < prob.lb[i] - kActivityTol || x[i] > prob.ub[i] + kActivityTol)
            throw OutOfBox("x violates box at coordinate " + std::to_string(i));
    PenaltyEval ev;
    ev.c_val = prob.c(x);
    ev.linear_part = prob.p.dot(x);
    ev.phi = ev.linear_part + prob.omega * ev.c_val.lpNorm<1>();
    return ev;
}

double model_value(const GnoProblem& prob, const Eigen::VectorXd& x_k,
                   const Eigen::SparseMatrix<double>& jac_k, const Eigen::VectorXd& c_k,
                   const Eigen::VectorXd& d) {
    if (d.size() != prob.n()) throw DimensionMismatch("model step size");
    Eigen::VectorXd lin = c_k + jac_k * d;
    return prob.p.dot(x_k + d) + prob.omega * lin.lpNorm<1>();
}

Agreement agreement(double phi_k, double phi_trial, double model_at_d) {
    Agreement a;
    a.dphi = phi_k - phi_trial;
    a.dm = phi_k - model_at_d;
    if (a.dm < -1e-12)
        throw NegativeExpectedReduction("expected reduction " + std::to_string(a.dm));
    if (a.dm <= 0.0) {
        a.dm = std::max(a.dm, 0.0);
        a.rho = a.dphi >= 0 ? std::numeric_limits<double>::infinity()
                            : -std::numeric_limits<double>::infinity();
    } else {
        a.rho = a.dphi / a.dm;
    }
    return a;
}

bool ActiveSets::lower_active(int i) const {
    return std::binary_search(lower.begin(), lower.end(), i);
}
bool ActiveSets::upper_active(int i) const {
    return std::binary_search(upper.begin(), upper.end(), i);
}

int ActiveSets::symmetric_difference(const ActiveSets& other) const {
    auto count_sym = [](const std::vector<int>& a, const std::vector<int>& b) {
        int n = 0;
        size_t i = 0, j = 0;
        while (i < a.size() || j < b.size()) {
            if (i == a.size()) { ++n; ++j; }
            else if (j == b.size()) { ++n; ++i; }
            else if (a[i] < b[j]) { ++n; ++i; }
            else if (b[j] < a[i]) { ++n; ++j; }
            else { ++i; ++j; }
        }
        return n;
    };
    return count_sym(lower, other.lower) + count_sym(upper, other.upper);
}

ActiveSets active_sets(const GnoProblem& prob, const Eigen::VectorXd& x, double tol) {
    ActiveSets s;
    for (int i = 0; i < prob.n(); ++i) {
        bool lo = std::abs(x[i] - prob.lb[i]) <= tol;
        bool up = std::abs(x[i] - prob.ub[i]) <= tol;
        if (lo) s.lower.push_back(i);
        if (up) s.upper.push_back(i);
        if (!lo && !up) s.inactive.push_back(i);
    }
    return s;
}

}  // namespace gridshed
