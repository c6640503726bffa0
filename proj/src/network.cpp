#include "gridshed/network.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <unordered_map>

namespace gridshed {

bool PowerNetwork::is_gen(int i) const {
    return std::binary_search(gens.begin(), gens.end(), i);
}

PowerNetwork build_network(const RawCase& cs) {
    PowerNetwork net;
    net.n_bus = static_cast<int>(cs.bus.size());
    net.baseMVA = cs.baseMVA;
    net.bus_ids.resize(net.n_bus);
    std::unordered_map<int, int> idx;
    for (int i = 0; i < net.n_bus; ++i) {
        net.bus_ids[i] = cs.bus[i].id;
        idx[cs.bus[i].id] = i;
    }

    std::vector<char> has_gen(net.n_bus, 0);
    net.Pg = Eigen::VectorXd::Zero(net.n_bus);
    net.Vset = Eigen::VectorXd::Constant(net.n_bus, 1.0);
    for (const auto& g : cs.gen) {
        if (!g.status) continue;
        int i = idx.at(g.bus);
        net.Pg[i] += g.Pg / cs.baseMVA;
        if (!has_gen[i]) net.Vset[i] = g.Vg;
        has_gen[i] = 1;
    }

    net.Pd.resize(net.n_bus);
    net.Qd.resize(net.n_bus);
    net.Vm0.resize(net.n_bus);
    net.Va0.resize(net.n_bus);
    for (int i = 0; i < net.n_bus; ++i) {
        const auto& b = cs.bus[i];
        net.Pd[i] = b.Pd / cs.baseMVA;
        net.Qd[i] = b.Qd / cs.baseMVA;
        net.Vm0[i] = b.Vm;
        net.Va0[i] = b.Va * M_PI / 180.0;
        if (b.type == BusType::Ref) {
            if (net.slack >= 0) throw NetworkError("multiple reference buses");
            net.slack = i;
        } else if (b.type == BusType::PV && has_gen[i]) {
            net.gens.push_back(i);
        } else {
            net.demands.push_back(i);
        }
    }
    if (net.slack < 0) throw NoSlackBus("no reference bus");
    if (!has_gen[net.slack]) throw NoSlackBus("reference bus has no in-service generator");
    net.theta_slack = net.Va0[net.slack];
    net.Vm0[net.slack] = net.Vset[net.slack];
    for (int i : net.gens) net.Vm0[i] = net.Vset[i];

    net.P = net.Pg - net.Pd;
    net.Q = -net.Qd;   // reactive schedule only meaningful on demand buses

    using T = Eigen::Triplet<double>;
    std::vector<T> gt, bt;
    std::vector<char> touched(net.n_bus, 0);
    for (const auto& br : cs.branch) {
        if (!br.status) continue;
        int f = idx.at(br.from), t = idx.at(br.to);
        touched[f] = touched[t] = 1;
        std::complex<double> ys = 1.0 / std::complex<double>(br.r, br.x);
        std::complex<double> bc(0.0, br.b / 2.0);
        double tau = br.tap == 0.0 ? 1.0 : br.tap;
        double shift = br.shift * M_PI / 180.0;
        std::complex<double> tps = std::polar(tau, shift);
        std::complex<double> Yff = (ys + bc) / (tau * tau);
        std::complex<double> Ytt = ys + bc;
        std::complex<double> Yft = -ys / std::conj(tps);
        std::complex<double> Ytf = -ys / tps;
        auto push = [&](int i, int j, std::complex<double> y) {
            gt.emplace_back(i, j, y.real());
            bt.emplace_back(i, j, y.imag());
        };
        push(f, f, Yff);
        push(t, t, Ytt);
        push(f, t, Yft);
        push(t, f, Ytf);
        net.lines.emplace_back(f, t);
    }
    for (int i = 0; i < net.n_bus; ++i) {
        const auto& b = cs.bus[i];
        if (b.Gs != 0 || b.Bs != 0) {
            gt.emplace_back(i, i, b.Gs / cs.baseMVA);
            bt.emplace_back(i, i, b.Bs / cs.baseMVA);
        }
        if (!touched[i])
            throw IsolatedBus("bus " + std::to_string(b.id) + " has no in-service branch");
    }
    net.G.resize(net.n_bus, net.n_bus);
    net.B.resize(net.n_bus, net.n_bus);
    net.G.setFromTriplets(gt.begin(), gt.end());
    net.B.setFromTriplets(bt.begin(), bt.end());
    net.G.makeCompressed();
    net.B.makeCompressed();
    return net;
}

void complex_power_injection(const PowerNetwork& net, const Eigen::VectorXd& V,
                             const Eigen::VectorXd& theta, Eigen::VectorXd& Pinj,
                             Eigen::VectorXd& Qinj) {
    if (V.size() != net.n_bus || theta.size() != net.n_bus)
        throw DimensionMismatch("injection: vector sizes do not match bus count");
    Pinj.setZero(net.n_bus);
    Qinj.setZero(net.n_bus);
    // row-wise traversal over the union sparsity of G and B; both matrices are
    // built from identical triplet patterns, so iterating each suffices
    for (int k = 0; k < net.G.outerSize(); ++k) {
        // G/B are column-major: iterate column k, entries (i, k)
        Eigen::SparseMatrix<double>::InnerIterator gi(net.G, k), bi(net.B, k);
        for (; gi; ++gi, ++bi) {
            int i = static_cast<int>(gi.row());
            double g = gi.value();
            double b = bi.value();
            double th = theta[i] - theta[k];
            double c = std::cos(th), s = std::sin(th);
            Pinj[i] += V[i] * V[k] * (g * c + b * s);
            Qinj[i] += V[i] * V[k] * (g * s - b * c);
        }
    }
}

}  // namespace gridshed
