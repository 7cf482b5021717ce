// spec_io.hpp: the system description document
//
//   # comment
//   [constants]
//   gyromagnetic_ghz_per_t=28
//
//   [photon_modes]
//   label=c frequency_ghz=10.65 linewidth_mhz=1 readout_weight=1
//
//   [magnon_modes]
//   label=m field_offset_mt=0 linewidth_mhz=2 diameter_mm=2.1 gyromagnetic_override_ghz_per_t=26
//
//   [couplings]
//   a=c b=m g_mhz=90
//
// One entry per line, whitespace-separated key=value tokens.  Unknown
// sections and keys are rejected with the line number.  [diagnostics] and
// [parameters] sections (written by fit results) are skipped on load.

#pragma once

#include "hsim/calibration.hpp"
#include "hsim/model.hpp"

#include <filesystem>
#include <string>
#include <string_view>

namespace hsim {

// Parses and validates.  Throws SpecError with "<source>:<line>:" context.
SystemSpec parse_spec(std::string_view text, std::string_view source = "<spec>");
SystemSpec load_spec(const std::filesystem::path& path);

// Shortest round-trip number formatting, so parse_spec(format_spec(s)) == s.
std::string format_spec(const SystemSpec& spec);
void save_spec(const std::filesystem::path& path, const SystemSpec& spec);

// Fitted spec followed by [diagnostics] and [parameters] sections.
std::string format_fit_result(const FitResult& result);

// Shortest decimal that round-trips.
std::string format_number(double value);

} // namespace hsim
