// modes.hpp: hybrid eigenmodes, branch tracking and derived observables

#pragma once

#include "hsim/model.hpp"

#include <Eigen/Dense>

#include <span>
#include <string_view>
#include <vector>

namespace hsim {

struct EigenMode {
    double frequency_ghz = 0.0;     // Re λ
    double linewidth_mhz = 0.0;     // −2·Im λ
    Eigen::VectorXcd vector;        // unit norm over the mode basis
    double photon_fraction = 0.0;   // Σ over photon indices of |v_i|²
};

// Eigenmodes of H sorted by frequency (ties by linewidth).
std::vector<EigenMode> eigenmodes(const HybridHamiltonian& h);

// B with ω_magnon(B) = ω_photon, i.e. ω_c/γ − b_Y.
double full_hybridization_field(const HybridSystem& system, std::string_view photon_label,
                                std::string_view magnon_label);

struct RabiSplitting {
    double splitting_mhz = 0.0;
    double field_t = 0.0;        // full-hybridization field
    double lower_ghz = 0.0;
    double upper_ghz = 0.0;
};

// Vacuum Rabi splitting of the photon mode with its magnon ensemble at the
// full-hybridization field.  The ensemble is every magnon coupled directly to
// the photon mode; if the named magnon is only reachable through magnon-magnon
// links, its connected magnon cluster is added.  Other photon modes are left
// out.  The splitting is the gap between the outermost eigenmodes whose
// photon fraction lies in [0.1, 0.9], so dark modes never count.
// Throws SpecError if the two modes are not connected.
RabiSplitting rabi_splitting(const HybridSystem& system, std::string_view photon_label,
                             std::string_view magnon_label);

// 2·g·√count.
double scaling_prediction(double g_single_mhz, int count);

struct DarkModeEntry {
    EigenMode mode;
    bool is_dark = false;
};

// Flags eigenmodes with photon_fraction < threshold, 0 < threshold < 1.
std::vector<DarkModeEntry> dark_mode_report(const HybridHamiltonian& h, double photon_threshold);

struct BranchSet {
    std::vector<double> field_t;
    // branches[b][i] is branch b at field_t[i]; branch ids follow the
    // frequency order at the first field.
    std::vector<std::vector<EigenMode>> branches;
};

// Continuation of eigenmodes across ascending fields.  Each step predicts the
// next value of every branch by linear extrapolation and solves the optimal
// assignment of new eigenvalues to predictions (Hungarian method); equal-cost
// ties are broken by eigenvector overlap with the previous point.
BranchSet track_branches(const HybridSystem& system, std::span<const double> field_t);

struct TransductionBandwidth {
    double bandwidth_mhz = 0.0;
    double field_min_t = 0.0;
    double field_max_t = 0.0;
    double peak_efficiency = 0.0;
    std::vector<double> field_t;
    std::vector<double> efficiency;      // max over probe of drive→readout transmission
    std::vector<double> lower_branch_ghz; // ω₋(B), the lowest eigenfrequency
};

// Efficiency e(B) is the peak magnon-drive → photon-readout transmission at
// each field; the bandwidth is the span of ω₋(B) over {B : e(B) ≥ max(e)/2}.
// Throws SpecError for wrong port kinds, DataError for an empty field range,
// NumericError("no transduction") when the efficiency vanishes.
TransductionBandwidth transduction_bandwidth(const HybridSystem& system, std::string_view drive_magnon,
                                             std::string_view readout_photon, std::span<const double> field_t);

} // namespace hsim
