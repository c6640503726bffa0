#include "gridshed/acpf.hpp"

#include <Eigen/SparseLU>
#include <cmath>

namespace gridshed {

PfMap::PfMap(const PowerNetwork& net) {
    nG = static_cast<int>(net.gens.size());
    nD = static_cast<int>(net.demands.size());
    bus_to_v.assign(net.n_bus, -1);
    bus_to_th.assign(net.n_bus, -1);
    for (int g : net.gens) {
        bus_to_th[g] = static_cast<int>(th_bus.size());
        th_bus.push_back(g);
    }
    for (int d : net.demands) {
        bus_to_v[d] = static_cast<int>(v_bus.size());
        v_bus.push_back(d);
        bus_to_th[d] = static_cast<int>(th_bus.size());
        th_bus.push_back(d);
    }
}

PfState initial_state(const PowerNetwork& net) {
    PfMap map(net);
    PfState st;
    st.x.resize(map.n_var());
    for (int v = 0; v < map.nD; ++v) st.x[v] = net.Vm0[map.v_bus[v]];
    for (size_t t = 0; t < map.th_bus.size(); ++t)
        st.x[map.nD + static_cast<int>(t)] = net.Va0[map.th_bus[t]];
    return st;
}

void expand_state(const PowerNetwork& net, const PfMap& map, const Eigen::VectorXd& x,
                  Eigen::VectorXd& V, Eigen::VectorXd& theta) {
    if (x.size() != map.n_var()) throw DimensionMismatch("pf state size");
    V.resize(net.n_bus);
    theta.resize(net.n_bus);
    for (int i = 0; i < net.n_bus; ++i) V[i] = net.Vset[i];
    for (int v = 0; v < map.nD; ++v) V[map.v_bus[v]] = x[v];
    theta[net.slack] = net.theta_slack;
    for (size_t t = 0; t < map.th_bus.size(); ++t)
        theta[map.th_bus[t]] = x[map.nD + static_cast<int>(t)];
}

Eigen::VectorXd pf_residual(const PowerNetwork& net, const PfMap& map, const Eigen::VectorXd& x) {
    Eigen::VectorXd V, th, Pinj, Qinj;
    expand_state(net, map, x, V, th);
    complex_power_injection(net, V, th, Pinj, Qinj);
    Eigen::VectorXd F(map.dim());
    int r = 0;
    for (int g : net.gens) F[r++] = Pinj[g] - net.P[g];
    for (int d : net.demands) F[r++] = Pinj[d] - net.P[d];
    for (int d : net.demands) F[r++] = Qinj[d] - net.Q[d];
    return F;
}

Eigen::SparseMatrix<double> pf_jacobian(const PowerNetwork& net, const PfMap& map,
                                        const Eigen::VectorXd& x) {
    Eigen::VectorXd V, th, Pinj, Qinj;
    expand_state(net, map, x, V, th);
    complex_power_injection(net, V, th, Pinj, Qinj);
    Eigen::VectorXd Gd = net.G.diagonal();
    Eigen::VectorXd Bd = net.B.diagonal();

    // row indices of the residual blocks
    std::vector<int> p_row(net.n_bus, -1), q_row(net.n_bus, -1);
    int r = 0;
    for (int g : net.gens) p_row[g] = r++;
    for (int d : net.demands) p_row[d] = r++;
    for (int d : net.demands) q_row[d] = r++;

    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(net.G.nonZeros() * 4 + net.n_bus * 4);
    for (int k = 0; k < net.G.outerSize(); ++k) {
        Eigen::SparseMatrix<double>::InnerIterator gi(net.G, k), bi(net.B, k);
        for (; gi; ++gi, ++bi) {
            int i = static_cast<int>(gi.row());
            if (i == k) continue;
            double g = gi.value(), b = bi.value();
            double c = std::cos(th[i] - th[k]), s = std::sin(th[i] - th[k]);
            double tC = g * c + b * s;   // appears in dP/dV and dQ/dTh
            double tS = g * s - b * c;   // appears in dP/dTh and dQ/dV
            int thk = map.th_var(k);
            int vk = map.v_var(k);
            if (p_row[i] >= 0) {
                if (thk >= 0) trip.emplace_back(p_row[i], thk, V[i] * V[k] * tS);
                if (vk >= 0) trip.emplace_back(p_row[i], vk, V[i] * tC);
            }
            if (q_row[i] >= 0) {
                if (thk >= 0) trip.emplace_back(q_row[i], thk, -V[i] * V[k] * tC);
                if (vk >= 0) trip.emplace_back(q_row[i], vk, V[i] * tS);
            }
        }
    }
    for (int i = 0; i < net.n_bus; ++i) {
        int thi = map.th_var(i);
        int vi = map.v_var(i);
        if (p_row[i] >= 0) {
            if (thi >= 0) trip.emplace_back(p_row[i], thi, -Qinj[i] - Bd[i] * V[i] * V[i]);
            if (vi >= 0) trip.emplace_back(p_row[i], vi, Pinj[i] / V[i] + Gd[i] * V[i]);
        }
        if (q_row[i] >= 0) {
            if (thi >= 0) trip.emplace_back(q_row[i], thi, Pinj[i] - Gd[i] * V[i] * V[i]);
            if (vi >= 0) trip.emplace_back(q_row[i], vi, Qinj[i] / V[i] - Bd[i] * V[i]);
        }
    }
    Eigen::SparseMatrix<double> J(map.dim(), map.n_var());
    J.setFromTriplets(trip.begin(), trip.end());
    J.makeCompressed();
    return J;
}

Eigen::SparseMatrix<double> pf_lagrangian_hessian(const PowerNetwork& net, const PfMap& map,
                                                  const Eigen::VectorXd& x,
                                                  const Eigen::VectorXd& lambda) {
    if (lambda.size() != map.dim()) throw DimensionMismatch("lambda size");
    Eigen::VectorXd V, th;
    expand_state(net, map, x, V, th);

    std::vector<double> wP(net.n_bus, 0.0), wQ(net.n_bus, 0.0);
    int r = 0;
    for (int g : net.gens) wP[g] = lambda[r++];
    for (int d : net.demands) wP[d] = lambda[r++];
    for (int d : net.demands) wQ[d] = lambda[r++];

    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(net.G.nonZeros() * 10);
    auto add = [&](int a, int b, double v) {
        if (a < 0 || b < 0 || v == 0.0) return;
        trip.emplace_back(a, b, v);
        if (a != b) trip.emplace_back(b, a, v);
    };
    for (int k = 0; k < net.G.outerSize(); ++k) {
        Eigen::SparseMatrix<double>::InnerIterator gi(net.G, k), bi(net.B, k);
        for (; gi; ++gi, ++bi) {
            int i = static_cast<int>(gi.row());
            if (i == k) continue;
            double wp = wP[i], wq = wQ[i];
            if (wp == 0.0 && wq == 0.0) continue;
            double g = gi.value(), b = bi.value();
            double c = std::cos(th[i] - th[k]), s = std::sin(th[i] - th[k]);
            double C = g * c + b * s;
            double S = g * s - b * c;
            int vi = map.v_var(i), vk = map.v_var(k);
            int ti = map.th_var(i), tk = map.th_var(k);
            double vv = V[i] * V[k];
            // second partials of V_i V_k (G c + B s), weighted by wp
            add(vi, vk, wp * C);
            add(vi, ti, wp * (-V[k] * S));
            add(vi, tk, wp * (V[k] * S));
            add(vk, ti, wp * (-V[i] * S));
            add(vk, tk, wp * (V[i] * S));
            add(ti, ti, wp * (-vv * C));
            add(ti, tk, wp * (vv * C));
            add(tk, tk, wp * (-vv * C));
            // second partials of V_i V_k (G s - B c), weighted by wq
            add(vi, vk, wq * S);
            add(vi, ti, wq * (V[k] * C));
            add(vi, tk, wq * (-V[k] * C));
            add(vk, ti, wq * (V[i] * C));
            add(vk, tk, wq * (-V[i] * C));
            add(ti, ti, wq * (-vv * S));
            add(ti, tk, wq * (vv * S));
            add(tk, tk, wq * (-vv * S));
        }
    }
    Eigen::VectorXd Gd = net.G.diagonal();
    Eigen::VectorXd Bd = net.B.diagonal();
    for (int i = 0; i < net.n_bus; ++i) {
        int vi = map.v_var(i);
        if (vi < 0) continue;
        double d2 = 2.0 * (wP[i] * Gd[i] - wQ[i] * Bd[i]);
        if (d2 != 0.0) trip.emplace_back(vi, vi, d2);
    }
    Eigen::SparseMatrix<double> H(map.n_var(), map.n_var());
    H.setFromTriplets(trip.begin(), trip.end());
    H.makeCompressed();
    return H;
}

NewtonResult newton_solve(const PowerNetwork& net, const PfState& x0, double tol, int max_iter) {
    PfMap map(net);
    NewtonResult res;
    res.state = x0;
    Eigen::VectorXd F = pf_residual(net, map, res.state.x);
    res.residual_norms.push_back(F.lpNorm<Eigen::Infinity>());
    for (int it = 0; it < max_iter; ++it) {
        if (res.residual_norms.back() <= tol) {
            res.status = NewtonResult::Status::Converged;
            res.iterations = it;
            return res;
        }
        Eigen::SparseMatrix<double> J = pf_jacobian(net, map, res.state.x);
        Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
        lu.analyzePattern(J);
        lu.factorize(J);
        if (lu.info() != Eigen::Success) {
            res.status = NewtonResult::Status::SingularJacobian;
            res.iterations = it;
            return res;
        }
        Eigen::VectorXd dx = lu.solve(-F);
        if (!dx.allFinite()) {
            res.status = NewtonResult::Status::SingularJacobian;
            res.iterations = it;
            return res;
        }
        res.state.x += dx;
        F = pf_residual(net, map, res.state.x);
        double nrm = F.lpNorm<Eigen::Infinity>();
        if (!std::isfinite(nrm) || nrm > 1e8) {
            res.status = NewtonResult::Status::Diverged;
            res.iterations = it + 1;
            res.residual_norms.push_back(nrm);
            return res;
        }
        res.residual_norms.push_back(nrm);
    }
    res.iterations = max_iter;
    res.status = res.residual_norms.back() <= tol ? NewtonResult::Status::Converged
                                                  : NewtonResult::Status::MaxIterations;
    return res;
}

}  // namespace gridshed
