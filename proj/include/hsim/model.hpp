// model.hpp: photon/magnon system description and the effective Hamiltonian
//
// Units: mode frequencies in GHz, linewidths and couplings in MHz as declared,
// field offsets in mT, static field in tesla.  Matrices are always in GHz
// (ordinary frequency, no 2π factors).  Linewidths are FWHM and enter the
// diagonal as -i·linewidth/2.

#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace hsim {

using cplx = std::complex<double>;

inline constexpr double kDefaultGyromagneticGhzPerT = 28.0;

struct PhotonModeSpec {
    std::string label;
    double frequency_ghz = 0.0;
    double linewidth_mhz = 0.0;
    double readout_weight = 1.0;

    bool operator==(const PhotonModeSpec&) const = default;
};

struct MagnonModeSpec {
    std::string label;
    double field_offset_mt = 0.0;
    double linewidth_mhz = 0.0;
    std::optional<double> diameter_mm;
    // Replaces the system gyromagnetic ratio for this mode only (apparent
    // g-factor of oversized samples).
    std::optional<double> gyromagnetic_override_ghz_per_t;

    bool operator==(const MagnonModeSpec&) const = default;
};

struct CouplingSpec {
    std::string mode_a;
    std::string mode_b;
    double strength_mhz = 0.0;

    bool operator==(const CouplingSpec&) const = default;
};

struct SystemSpec {
    std::vector<PhotonModeSpec> photon_modes;
    std::vector<MagnonModeSpec> magnon_modes;
    std::vector<CouplingSpec> couplings;
    double gyromagnetic_ghz_per_t = kDefaultGyromagneticGhzPerT;

    bool operator==(const SystemSpec&) const = default;
};

// Label <-> matrix index.  Photon modes occupy [0, photon_count), magnon modes
// follow, each group in declaration order.
class IndexMap {
public:
    IndexMap(std::vector<std::string> labels, std::size_t photon_count);

    std::size_t size() const noexcept { return labels_.size(); }
    std::size_t photon_count() const noexcept { return photon_count_; }
    bool is_photon(std::size_t index) const noexcept { return index < photon_count_; }
    const std::string& label(std::size_t index) const { return labels_.at(index); }
    const std::vector<std::string>& labels() const noexcept { return labels_; }

    std::optional<std::size_t> find(std::string_view label) const;
    // Throws SpecError for unknown labels.
    std::size_t at(std::string_view label) const;

private:
    std::vector<std::string> labels_;
    std::size_t photon_count_;
    std::unordered_map<std::string, std::size_t> lookup_;
};

// Effective Hamiltonian at one static field.
struct HybridHamiltonian {
    double field_t = 0.0;
    Eigen::MatrixXcd entries;
    std::shared_ptr<const IndexMap> index_map;

    std::size_t dimension() const noexcept { return static_cast<std::size_t>(entries.rows()); }
    std::size_t photon_count() const noexcept { return index_map->photon_count(); }
    // FWHM linewidth of mode `index`, GHz.
    double linewidth_ghz(std::size_t index) const { return -2.0 * entries(index, index).imag(); }
};

// A validated SystemSpec with the field-independent part of the Hamiltonian
// precomputed.  Immutable after construction.
class HybridSystem {
public:
    const SystemSpec& spec() const noexcept { return spec_; }
    const IndexMap& index_map() const noexcept { return *index_; }
    const std::shared_ptr<const IndexMap>& shared_index_map() const noexcept { return index_; }
    std::size_t dimension() const noexcept { return index_->size(); }
    std::size_t photon_count() const noexcept { return index_->photon_count(); }
    std::size_t magnon_count() const noexcept { return dimension() - photon_count(); }

    // Symmetric coupling matrix in GHz, zero diagonal.
    const Eigen::MatrixXd& coupling_matrix() const noexcept { return coupling_; }
    // Effective gyromagnetic ratio (GHz/T) of the magnon at matrix index `index`.
    double gyromagnetic_of(std::size_t index) const;
    // Field offset (T) of the magnon at matrix index `index`.
    double field_offset_of(std::size_t index) const;
    // Bare (uncoupled) mode frequency at `field_t`, GHz.
    double bare_frequency(std::size_t index, double field_t) const;

    // Writes the Hamiltonian at `field_t` into `out` (resized as needed).
    void fill_hamiltonian(double field_t, Eigen::MatrixXcd& out) const;

private:
    friend HybridSystem build_system(SystemSpec spec);
    HybridSystem() = default;

    SystemSpec spec_;
    std::shared_ptr<const IndexMap> index_;
    Eigen::MatrixXd coupling_;
    Eigen::MatrixXcd base_;            // H at zero field
    Eigen::VectorXd magnon_gamma_;     // GHz/T per magnon
};

// Validates `spec` and builds the index map.  Throws SpecError.
HybridSystem build_system(SystemSpec spec);

// Larmor frequency γ·(B + b_Y) in GHz.  A per-mode gyromagnetic override
// takes precedence over `gyromagnetic_ghz_per_t`.
double magnon_frequency(const MagnonModeSpec& mode, double field_t, double gyromagnetic_ghz_per_t);

HybridHamiltonian assemble_hamiltonian(const HybridSystem& system, double field_t);

} // namespace hsim
