#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

namespace faircurtail {

enum class BusKind { Slack, Pq };

struct Bus {
    int index = 0;    // contiguous 0-based internal index
    int ext_id = 0;   // bus number as it appears in the case file
    BusKind kind = BusKind::Pq;
    double base_kv = 0.0;
};

struct Branch {
    int from = 0;  // internal bus indices
    int to = 0;
    double r = 0.0;        // series resistance, p.u.
    double x = 0.0;        // series reactance, p.u.
    double b_shunt = 0.0;  // total line charging susceptance, p.u.
};

struct LoadPoint {
    int bus = 0;         // internal bus index
    double p_nom = 0.0;  // nominal active demand, p.u.
    double q_nom = 0.0;  // nominal reactive demand, p.u.
};

struct PvPlant {
    int id = 0;   // plant id (bus number in the case file)
    int bus = 0;  // internal bus index
    double s_rated = 0.0;     // inverter apparent-power rating, p.u.
    double p_capacity = 0.0;  // nameplate active capacity, p.u.
    double xi = 0.33;         // reactive capability slope |q| <= xi * p
};

struct Network {
    double base_mva = 100.0;
    std::vector<Bus> buses;
    std::vector<Branch> branches;
    int slack_bus = 0;  // internal index
    std::vector<PvPlant> pv_plants;
    std::vector<LoadPoint> loads;

    int size() const { return static_cast<int>(buses.size()); }

    // Internal index for a case-file bus number, or -1 if absent.
    int index_of(int ext_id) const;

    // Throws ValidationError unless the network is a single connected
    // component with exactly one slack bus, positive base quantities,
    // branch endpoints in range, and plants/loads on existing buses.
    void validate() const;
};

// Complex bus admittance matrix from branch data (pi model).
Eigen::MatrixXcd build_ybus(const Network& net);

}  // namespace faircurtail
