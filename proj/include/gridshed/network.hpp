#pragma once

// Algebraic grid model: bus partition {ref, G, D}, per-unit data, and the
// complex admittance matrix split into real G and B parts.

#include <Eigen/Core>
#include <Eigen/SparseCore>
#include <stdexcept>
#include <utility>
#include <vector>

#include "gridshed/errors.hpp"
#include "gridshed/matpower.hpp"

namespace gridshed {

struct NetworkError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NoSlackBus : NetworkError {
    using NetworkError::NetworkError;
};
struct IsolatedBus : NetworkError {
    using NetworkError::NetworkError;
};

struct PowerNetwork {
    int n_bus = 0;
    int slack = -1;                 // internal bus index
    std::vector<int> gens;          // PV buses with an in-service generator
    std::vector<int> demands;       // everything else but the slack
    std::vector<int> bus_ids;       // internal index -> file id

    Eigen::VectorXd Pd, Qd;         // demand, p.u.
    Eigen::VectorXd Pg;             // scheduled generation, p.u.
    Eigen::VectorXd P, Q;           // net scheduled injection (Pg - Pd), p.u.
    Eigen::VectorXd Vset;           // magnitude setpoints; valid on gens + slack
    double theta_slack = 0;         // radians
    Eigen::VectorXd Vm0, Va0;       // file voltage profile (angles in radians)

    Eigen::SparseMatrix<double> G, B;
    std::vector<std::pair<int, int>> lines;   // in-service branch endpoints (internal)
    double baseMVA = 100;

    bool is_gen(int i) const;
};

PowerNetwork build_network(const RawCase& cs);

// Bus power injections at (V, theta); vectors over all buses.
void complex_power_injection(const PowerNetwork& net, const Eigen::VectorXd& V,
                             const Eigen::VectorXd& theta, Eigen::VectorXd& Pinj,
                             Eigen::VectorXd& Qinj);

}  // namespace gridshed
