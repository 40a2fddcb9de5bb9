#include "faircurtail/network.hpp"

#include <queue>
#include <set>

#include "faircurtail/errors.hpp"

namespace faircurtail {

int Network::index_of(int ext_id) const {
    for (const Bus& b : buses)
        if (b.ext_id == ext_id) return b.index;
    return -1;
}

void Network::validate() const {
    const int n = size();
    if (n == 0) throw ValidationError("network has no buses");
    if (base_mva <= 0.0) throw ValidationError("base_mva must be positive");

    int slack_count = 0;
    std::set<int> ext_ids;
    for (int i = 0; i < n; ++i) {
        const Bus& b = buses[i];
        if (b.index != i) throw ValidationError("bus indices are not contiguous");
        if (!ext_ids.insert(b.ext_id).second)
            throw ValidationError("duplicate bus number " + std::to_string(b.ext_id));
        if (b.base_kv <= 0.0)
            throw ValidationError("bus " + std::to_string(b.ext_id) + " has non-positive base_kv");
        if (b.kind == BusKind::Slack) ++slack_count;
    }
    if (slack_count != 1) throw ValidationError("expected exactly one slack bus, found " +
                                                std::to_string(slack_count));
    if (slack_bus < 0 || slack_bus >= n || buses[slack_bus].kind != BusKind::Slack)
        throw ValidationError("slack_bus does not point at the slack bus");

    std::vector<std::vector<int>> adj(n);
    for (const Branch& br : branches) {
        if (br.from < 0 || br.from >= n || br.to < 0 || br.to >= n)
            throw ValidationError("branch endpoint out of range");
        if (br.from == br.to) throw ValidationError("branch connects a bus to itself");
        if (br.r < 0.0 || (br.r == 0.0 && br.x == 0.0))
            throw ValidationError("branch impedance must have r >= 0 and |z| > 0");
        adj[br.from].push_back(br.to);
        adj[br.to].push_back(br.from);
    }

    std::vector<char> seen(n, 0);
    std::queue<int> frontier;
    frontier.push(slack_bus);
    seen[slack_bus] = 1;
    int reached = 0;
    while (!frontier.empty()) {
        int u = frontier.front();
        frontier.pop();
        ++reached;
        for (int v : adj[u])
            if (!seen[v]) {
                seen[v] = 1;
                frontier.push(v);
            }
    }
    if (reached != n) throw ValidationError("network is not connected");

    std::set<int> plant_buses;
    for (const PvPlant& p : pv_plants) {
        if (p.bus < 0 || p.bus >= n) throw ValidationError("plant bus out of range");
        if (p.bus == slack_bus) throw ValidationError("plant may not sit on the slack bus");
        if (!plant_buses.insert(p.bus).second)
            throw ValidationError("two plants on bus " + std::to_string(buses[p.bus].ext_id));
        if (p.s_rated <= 0.0 || p.p_capacity <= 0.0)
            throw ValidationError("plant ratings must be positive");
        if (p.xi < 0.0) throw ValidationError("plant xi must be non-negative");
    }
    for (const LoadPoint& l : loads)
        if (l.bus < 0 || l.bus >= n) throw ValidationError("load bus out of range");
}

Eigen::MatrixXcd build_ybus(const Network& net) {
    const int n = net.size();
    Eigen::MatrixXcd y = Eigen::MatrixXcd::Zero(n, n);
    for (const Branch& br : net.branches) {
        const std::complex<double> ys = 1.0 / std::complex<double>(br.r, br.x);
        const std::complex<double> ysh(0.0, br.b_shunt / 2.0);
        y(br.from, br.from) += ys + ysh;
        y(br.to, br.to) += ys + ysh;
        y(br.from, br.to) -= ys;
        y(br.to, br.from) -= ys;
    }
    return y;
}

}  // namespace faircurtail
