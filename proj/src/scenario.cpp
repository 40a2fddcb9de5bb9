#include "faircurtail/scenario.hpp"

#include <fstream>
#include <sstream>

#include "faircurtail/errors.hpp"
#include "faircurtail/toml_lite.hpp"

namespace faircurtail {

Network apply_scenario(const Network& net, const std::vector<PvSpec>& pv_spec,
                       double load_scale) {
    if (load_scale < 0.0) throw ValidationError("load_scale must be non-negative");
    Network out = net;
    for (LoadPoint& l : out.loads) {
        l.p_nom *= load_scale;
        l.q_nom *= load_scale;
    }
    for (const PvSpec& spec : pv_spec) {
        const int idx = out.index_of(spec.bus);
        if (idx < 0)
            throw ValidationError("scenario references unknown bus " + std::to_string(spec.bus));
        PvPlant plant;
        plant.id = spec.bus;
        plant.bus = idx;
        plant.s_rated = spec.s_rated;
        plant.p_capacity = spec.p_capacity;
        plant.xi = spec.xi;
        out.pv_plants.push_back(plant);
    }
    out.validate();
    return out;
}

Scenario parse_scenario(std::string_view text, double base_mva) {
    if (base_mva <= 0.0) throw ValidationError("base_mva must be positive");
    TomlLite toml = TomlLite::parse(text);
    Scenario sc;
    sc.load_scale = toml.number_or("load_scale", 1.0);
    const double to_pu = 1.0 / (base_mva * 1000.0);  // kW -> p.u.
    auto it = toml.arrays.find("pv");
    if (it != toml.arrays.end()) {
        for (const auto& entry : it->second) {
            PvSpec spec;
            spec.bus = static_cast<int>(TomlLite::entry_number(entry, "bus"));
            spec.s_rated = TomlLite::entry_number(entry, "s_rated_kva") * to_pu;
            spec.p_capacity = TomlLite::entry_number(entry, "p_capacity_kw") * to_pu;
            spec.xi = TomlLite::entry_number_or(entry, "xi", 0.33);
            sc.pv.push_back(spec);
        }
    }
    return sc;
}

Scenario load_scenario(const std::string& path, double base_mva) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open scenario file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_scenario(ss.str(), base_mva);
}

}  // namespace faircurtail
