#include "faircurtail/fairness.hpp"

#include <algorithm>
#include <cmath>

#include "faircurtail/errors.hpp"

namespace faircurtail {

SimulationLedger::SimulationLedger(int n_plants) : n_plants_(n_plants) {
    if (n_plants < 0) throw ValidationError("ledger needs a non-negative plant count");
}

void SimulationLedger::append(const std::vector<LedgerRecord>& row) {
    if (static_cast<int>(row.size()) != n_plants_)
        throw ValidationError("ledger row width does not match plant count");
    for (const LedgerRecord& r : row)
        if (r.realized_kwh > r.potential_kwh + 1e-9)
            throw ValidationError("realized energy exceeds potential energy");
    records_.push_back(row);
    std::vector<LedgerRecord> pre = prefix_.empty()
                                        ? std::vector<LedgerRecord>(n_plants_)
                                        : prefix_.back();
    for (int l = 0; l < n_plants_; ++l) pre[l] += row[l];
    prefix_.push_back(std::move(pre));
}

const LedgerRecord& SimulationLedger::at(int step, int plant) const {
    return records_.at(step).at(plant);
}

LedgerRecord SimulationLedger::cumulative(int plant, int steps) const {
    if (plant < 0 || plant >= n_plants_) throw ValidationError("plant index out of range");
    if (steps < 0 || steps > this->steps()) steps = this->steps();
    if (steps == 0) return {};
    return prefix_[steps - 1].at(plant);
}

std::optional<double> earnings_ratio(const SimulationLedger& ledger, int plant, int steps) {
    const LedgerRecord cum = ledger.cumulative(plant, steps);
    const double potential_earn = -cum.potential_bill;
    if (std::abs(potential_earn) < 1e-12) return std::nullopt;
    return -cum.realized_bill / potential_earn;
}

double generation_ratio(const SimulationLedger& ledger, int plant, int steps) {
    const LedgerRecord cum = ledger.cumulative(plant, steps);
    if (cum.potential_kwh <= 0.0) return 1.0;
    return cum.realized_kwh / cum.potential_kwh;
}

std::vector<double> earnings_ratios(const SimulationLedger& ledger, int steps) {
    std::vector<double> out(ledger.plants());
    for (int l = 0; l < ledger.plants(); ++l)
        out[l] = earnings_ratio(ledger, l, steps).value_or(1.0);
    return out;
}

std::vector<double> generation_ratios(const SimulationLedger& ledger, int steps) {
    std::vector<double> out(ledger.plants());
    for (int l = 0; l < ledger.plants(); ++l) out[l] = generation_ratio(ledger, l, steps);
    return out;
}

double jfi(const std::vector<double>& x) {
    if (x.empty()) throw ValidationError("jfi of an empty vector");
    double sum = 0.0, sumsq = 0.0;
    for (double v : x) {
        sum += v;
        sumsq += v * v;
    }
    if (sumsq == 0.0) return 1.0;
    return sum * sum / (static_cast<double>(x.size()) * sumsq);
}

double gini(const std::vector<double>& x) {
    if (x.empty()) throw ValidationError("gini of an empty vector");
    const int n = static_cast<int>(x.size());
    double sum = 0.0;
    for (double v : x) sum += v;
    if (sum <= 0.0) return 0.0;
    // pairwise-difference sum via the sorted-rank identity
    std::vector<double> s(x);
    std::sort(s.begin(), s.end());
    double acc = 0.0;
    for (int i = 0; i < n; ++i) acc += (2.0 * (i + 1) - n - 1) * s[i];
    return acc / (n * sum);
}

double curtailment_percent(const SimulationLedger& ledger, int steps) {
    LedgerRecord total;
    for (int l = 0; l < ledger.plants(); ++l) total += ledger.cumulative(l, steps);
    if (total.potential_kwh <= 0.0) return 0.0;
    return 100.0 * (1.0 - total.realized_kwh / total.potential_kwh);
}

}  // namespace faircurtail
