#pragma once

#include <optional>
#include <vector>

namespace faircurtail {

// Per-plant, per-timestep accounting entry.  Energies in kWh, bills in
// currency; "potential" is what the plant could have produced/earned at
// its actual MPP, "realized" what it did after curtailment.
struct LedgerRecord {
    double realized_kwh = 0.0;
    double potential_kwh = 0.0;
    double realized_bill = 0.0;
    double potential_bill = 0.0;

    LedgerRecord& operator+=(const LedgerRecord& o) {
        realized_kwh += o.realized_kwh;
        potential_kwh += o.potential_kwh;
        realized_bill += o.realized_bill;
        potential_bill += o.potential_bill;
        return *this;
    }
};

// Append-only history of one simulation run; prefix sums are maintained
// per step so cumulative queries at any horizon are O(1).
class SimulationLedger {
public:
    explicit SimulationLedger(int n_plants);

    int plants() const { return n_plants_; }
    int steps() const { return static_cast<int>(records_.size()); }

    // Throws ValidationError on width mismatch or realized > potential energy.
    void append(const std::vector<LedgerRecord>& row);

    const LedgerRecord& at(int step, int plant) const;

    // Cumulative sums over the first `steps` records (default: all).
    LedgerRecord cumulative(int plant, int steps = -1) const;

private:
    int n_plants_;
    std::vector<std::vector<LedgerRecord>> records_;
    std::vector<std::vector<LedgerRecord>> prefix_;
};

// Ratio of realized to potential PV export earnings (earnings = -bill).
// Undefined (nullopt) when the potential earnings are zero; callers
// substitute 1.
std::optional<double> earnings_ratio(const SimulationLedger& ledger, int plant,
                                     int steps = -1);

// Ratio of realized to potential PV generation; 1 when nothing could
// have been produced.
double generation_ratio(const SimulationLedger& ledger, int plant, int steps = -1);

// Convenience vectors with the undefined-ratio conventions applied.
std::vector<double> earnings_ratios(const SimulationLedger& ledger, int steps = -1);
std::vector<double> generation_ratios(const SimulationLedger& ledger, int steps = -1);

// Jain fairness index (sum x)^2 / (n sum x^2); all-zero input -> 1.
// Throws ValidationError on an empty vector.
double jfi(const std::vector<double>& x);

// Gini index: sum_{l,m} |x_l - x_m| / (2 n sum x); zero-sum input -> 0.
// Throws ValidationError on an empty vector.
double gini(const std::vector<double>& x);

// 100 * (1 - total realized / total potential energy); 0 when there was
// nothing to curtail.
double curtailment_percent(const SimulationLedger& ledger, int steps = -1);

}  // namespace faircurtail
