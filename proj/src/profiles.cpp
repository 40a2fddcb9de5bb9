#include "faircurtail/profiles.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include "faircurtail/errors.hpp"

namespace faircurtail {

namespace {

// uniform double in [0, 1) from the top 53 bits, engine-exact
double uniform01(std::mt19937_64& rng) {
    return std::ldexp(static_cast<double>(rng() >> 11), -53);
}

}  // namespace

void Profiles::validate() const {
    if (dt_minutes <= 0 || 1440 % dt_minutes != 0)
        throw ValidationError("dt_minutes must divide 1440");
    if (days < 1) throw ValidationError("profiles need at least one day");
    const size_t want = static_cast<size_t>(total_steps());
    if (pv_norm.size() != want || load_norm.size() != want)
        throw ValidationError("profile length does not match days * steps_per_day");
    for (size_t i = 0; i < want; ++i)
        if (pv_norm[i] < 0.0 || pv_norm[i] > 1.0 || load_norm[i] < 0.0 ||
            load_norm[i] > 1.0)
            throw ValidationError("profile values must lie in [0, 1]");
}

Profiles synth_profiles(int days, int dt_minutes, uint64_t seed) {
    if (days < 1) throw ValidationError("days must be at least 1");
    if (dt_minutes <= 0 || 1440 % dt_minutes != 0)
        throw ValidationError("dt_minutes must divide 1440");

    Profiles pr;
    pr.dt_minutes = dt_minutes;
    pr.days = days;
    const int spd = pr.steps_per_day();
    pr.pv_norm.reserve(static_cast<size_t>(days) * spd);
    pr.load_norm.reserve(static_cast<size_t>(days) * spd);

    std::mt19937_64 rng(seed);
    double cloud = 0.0, wobble = 0.0;  // smoothed noise states
    for (int d = 0; d < days; ++d) {
        const double amp = 0.85 + 0.15 * uniform01(rng);  // per-day clear-sky strength
        for (int s = 0; s < spd; ++s) {
            const double hour = s * dt_minutes / 60.0;
            cloud = 0.92 * cloud + 0.08 * (2.0 * uniform01(rng) - 1.0);
            wobble = 0.9 * wobble + 0.1 * (2.0 * uniform01(rng) - 1.0);

            double pv = 0.0;
            if (hour >= 6.0 && hour < 18.0) {
                const double arc = std::sin(std::numbers::pi * (hour - 6.0) / 12.0);
                pv = amp * arc * (1.0 - 0.25 * std::abs(cloud));
            }
            pr.pv_norm.push_back(std::clamp(pv, 0.0, 1.0));

            auto hump = [&](double center, double width) {
                const double dh = hour - center;
                return std::exp(-dh * dh / (2.0 * width * width));
            };
            double load = 0.10 + 0.16 * hump(7.5, 1.8) + 0.20 * hump(19.5, 2.2);
            load *= 1.0 + 0.15 * wobble;
            pr.load_norm.push_back(std::clamp(load, 0.0, 0.42));
        }
    }
    pr.validate();
    return pr;
}

Profiles parse_profiles_csv(std::string_view text, int dt_minutes) {
    std::istringstream in{std::string(text)};
    std::string line;
    if (!std::getline(in, line)) throw ParseError("profiles CSV is empty");
    // tolerate trailing CR from CRLF files
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "step,pv_norm,load_norm")
        throw ParseError("profiles CSV must start with header 'step,pv_norm,load_norm'");

    Profiles pr;
    pr.dt_minutes = dt_minutes;
    int lineno = 1;
    long expected_step = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        long step;
        double pv, load;
        if (std::sscanf(line.c_str(), "%ld,%lf,%lf", &step, &pv, &load) != 3)
            throw ParseError("profiles CSV line " + std::to_string(lineno) +
                             ": expected step,pv_norm,load_norm");
        if (step != expected_step)
            throw ParseError("profiles CSV line " + std::to_string(lineno) +
                             ": steps must be consecutive from 0");
        ++expected_step;
        pr.pv_norm.push_back(pv);
        pr.load_norm.push_back(load);
    }
    const int spd = pr.steps_per_day();
    if (pr.pv_norm.empty() || pr.pv_norm.size() % spd != 0)
        throw ParseError("profiles CSV must cover a whole number of days (" +
                         std::to_string(spd) + " steps each)");
    pr.days = static_cast<int>(pr.pv_norm.size()) / spd;
    pr.validate();
    return pr;
}

Profiles load_profiles_csv(const std::string& path, int dt_minutes) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open profiles file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_profiles_csv(ss.str(), dt_minutes);
}

void write_profiles_csv(const Profiles& profiles, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write profiles file: " + path);
    out << "step,pv_norm,load_norm\n";
    char buf[96];
    for (size_t i = 0; i < profiles.pv_norm.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g\n", i, profiles.pv_norm[i],
                      profiles.load_norm[i]);
        out << buf;
    }
}

}  // namespace faircurtail
