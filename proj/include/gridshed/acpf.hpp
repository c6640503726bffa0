#pragma once

// Reduced AC power-flow system F(V_D, theta_{G u D}) with analytic first and
// second derivatives, and a plain Newton solver for the feasible case.

#include <Eigen/Core>
#include <Eigen/SparseCore>
#include <vector>

#include "gridshed/network.hpp"

namespace gridshed {

// Index bookkeeping for the reduced system.  Rows are ordered
// [P over gens; P over demands; Q over demands]; variables
// [V over demands; theta over gens; theta over demands].
struct PfMap {
    int nG = 0, nD = 0;
    std::vector<int> v_bus;        // V-variable -> bus
    std::vector<int> th_bus;       // theta-variable -> bus
    std::vector<int> bus_to_v;     // bus -> V-variable or -1
    std::vector<int> bus_to_th;    // bus -> theta-variable or -1

    explicit PfMap(const PowerNetwork& net);
    int dim() const { return 2 * nD + nG; }
    int n_var() const { return nD + nG + nD; }
    // variable index within x, or -1 when the quantity is fixed
    int v_var(int bus) const { return bus_to_v[bus]; }
    int th_var(int bus) const { return bus_to_th[bus] < 0 ? -1 : nD + bus_to_th[bus]; }
};

struct PfState {
    Eigen::VectorXd x;   // [V_D; theta_{G u D}]
};

PfState initial_state(const PowerNetwork& net);

// Expand reduced variables into full per-bus V and theta vectors.
void expand_state(const PowerNetwork& net, const PfMap& map, const Eigen::VectorXd& x,
                  Eigen::VectorXd& V, Eigen::VectorXd& theta);

Eigen::VectorXd pf_residual(const PowerNetwork& net, const PfMap& map, const Eigen::VectorXd& x);

Eigen::SparseMatrix<double> pf_jacobian(const PowerNetwork& net, const PfMap& map,
                                        const Eigen::VectorXd& x);

// sum_i lambda_i * hessian(F_i) over the reduced variables; symmetric.
Eigen::SparseMatrix<double> pf_lagrangian_hessian(const PowerNetwork& net, const PfMap& map,
                                                  const Eigen::VectorXd& x,
                                                  const Eigen::VectorXd& lambda);

struct NewtonResult {
    enum class Status { Converged, MaxIterations, SingularJacobian, Diverged };
    Status status = Status::MaxIterations;
    PfState state;
    int iterations = 0;
    std::vector<double> residual_norms;   // sup-norm per iteration, including start
    bool ok() const { return status == Status::Converged; }
};

NewtonResult newton_solve(const PowerNetwork& net, const PfState& x0, double tol = 1e-8,
                          int max_iter = 10);

}  // namespace gridshed
