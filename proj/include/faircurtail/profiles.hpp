#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace faircurtail {

// Normalized PV (MPP) and load shapes shared by all plants/loads; each
// node scales them by its own nominal capacity.
struct Profiles {
    int dt_minutes = 15;
    int days = 0;
    std::vector<double> pv_norm;    // in [0, 1]
    std::vector<double> load_norm;  // in [0, 1]

    int steps_per_day() const { return 1440 / dt_minutes; }
    int total_steps() const { return days * steps_per_day(); }
    void validate() const;  // throws ValidationError
};

// Deterministic synthetic week: clear-sky half-sine PV over a 06-18h
// daylight window with smooth multiplicative noise, and a morning/evening
// double-hump load whose peak stays below half the PV peak (so sunny
// middays produce over-voltage).  Same seed, same bits.
Profiles synth_profiles(int days, int dt_minutes, uint64_t seed);

// CSV with required header "step,pv_norm,load_norm"; the row count must be
// a whole number of days at dt_minutes.
Profiles parse_profiles_csv(std::string_view text, int dt_minutes);
Profiles load_profiles_csv(const std::string& path, int dt_minutes);
void write_profiles_csv(const Profiles& profiles, const std::string& path);

}  // namespace faircurtail
