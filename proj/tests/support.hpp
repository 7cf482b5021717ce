#pragma once

#include "hsim/model.hpp"
#include "hsim/spec_io.hpp"

#include <string>

namespace hsim::test {

inline SystemSpec bundled(const std::string& name) {
    return load_spec(std::string(HSIM_SPEC_DIR) + "/" + name + ".spec");
}

// Cavity c plus `count` magnons m1..mN, each coupled to c with g_mhz.
inline SystemSpec degenerate_ensemble(int count, double g_mhz, double cavity_ghz = 10.65) {
    SystemSpec s;
    s.photon_modes.push_back({"c", cavity_ghz, 1.0, 1.0});
    for (int i = 1; i <= count; ++i) {
        const std::string label = "m" + std::to_string(i);
        s.magnon_modes.push_back({label, 0.0, 2.0, std::nullopt, std::nullopt});
        s.couplings.push_back({"c", label, g_mhz});
    }
    return s;
}

} // namespace hsim::test
