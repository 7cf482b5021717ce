// csv_io.hpp: CSV exchange formats
//
//   spectrum map   b_tesla,freq_ghz,power_db           row-major by field, then frequency
//   branches       b_tesla,branch_id,freq_ghz,linewidth_mhz,photon_fraction
//   trajectory     t_ns,mode_label,re,im               rotating-frame amplitudes
//   diameters      diameter_mm,b_fh_tesla[,sigma_tesla]
//
// Numbers are written with 9 significant digits.

#pragma once

#include "hsim/modes.hpp"
#include "hsim/size_effects.hpp"
#include "hsim/spectral.hpp"
#include "hsim/time_domain.hpp"

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace hsim {

std::string format_g9(double value);

// Power column is dB relative to the map maximum.
void write_spectrum_csv(std::ostream& out, const SpectrumMap& map);
// Returns a db_relative map.  Throws DataError on malformed or incomplete grids.
SpectrumMap read_spectrum_csv(std::istream& in, std::string_view source = "<csv>");

void write_branches_csv(std::ostream& out, const BranchSet& branches);
void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory);

std::vector<DiameterFieldSample> read_diameter_csv(std::istream& in, std::string_view source = "<csv>");
void write_diameter_csv(std::ostream& out, const std::vector<DiameterFieldSample>& samples);

} // namespace hsim
