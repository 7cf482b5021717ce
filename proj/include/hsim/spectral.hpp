// spectral.hpp: K-matrix, port transmission and (field × probe) sweep maps

#pragma once

#include "hsim/model.hpp"

#include <Eigen/LU>

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace hsim {

// Power floor used whenever linear power is converted to dB.
inline constexpr double kDbFloor = -300.0;

struct SweepGrid {
    std::vector<double> field_t;
    std::vector<double> probe_ghz;

    std::size_t field_count() const noexcept { return field_t.size(); }
    std::size_t probe_count() const noexcept { return probe_ghz.size(); }
    bool operator==(const SweepGrid&) const = default;
};

// Throws DataError unless both axes are non-empty and strictly increasing.
SweepGrid make_grid(std::vector<double> field_t, std::vector<double> probe_ghz);

// `count` points from `start` to `stop`, endpoints included.
std::vector<double> linspace(double start, double stop, std::size_t count);

enum class PowerScale { linear, db_relative };

// Row-major [field][probe].
struct SpectrumMap {
    SweepGrid grid;
    std::vector<double> power;
    PowerScale scale = PowerScale::linear;

    double at(std::size_t field_index, std::size_t probe_index) const {
        return power[field_index * grid.probe_count() + probe_index];
    }
    std::span<const double> slice(std::size_t field_index) const {
        return {power.data() + field_index * grid.probe_count(), grid.probe_count()};
    }
    double max_value() const;
};

// 10·log10(power / max), floored at `floor_db`.  Idempotent on dB maps.
SpectrumMap to_db(const SpectrumMap& map, double floor_db = kDbFloor);
// Linear power relative to the map maximum.
SpectrumMap to_relative_linear(const SpectrumMap& map);

// Which signal a sweep records.
struct Channel {
    enum class Kind { port, total };
    Kind kind = Kind::port;
    std::string drive;
    std::string readout;

    static Channel port(std::string drive, std::string readout) {
        return {Kind::port, std::move(drive), std::move(readout)};
    }
    // Readout-weighted sum over photon modes.
    static Channel total() { return {Kind::total, {}, {}}; }
    bool operator==(const Channel&) const = default;
};

// K(ω) = ω·I − H.
Eigen::MatrixXcd k_matrix(const HybridHamiltonian& h, double probe_ghz);

// (γ_readout·ω²/2)·|(K⁻¹(ω)·ê_drive)_readout|² for an explicit Hamiltonian.
// Throws NumericError when K is singular (LU pivot < 1e-14·‖K‖₁).
double transmission(const HybridHamiltonian& h, double probe_ghz, std::size_t drive, std::size_t readout);

double transmission(const HybridSystem& system, double field_t, double probe_ghz,
                    std::string_view drive, std::string_view readout);

// Σ_x η_x·s_x over photon modes.  Throws SpecError if every weight is zero
// ("no readout channel").
double total_transmission(const HybridSystem& system, double field_t, double probe_ghz);

// Reusable evaluator for repeated probes at a fixed field.  Not thread-safe;
// use one per thread.
class TransmissionEvaluator {
public:
    TransmissionEvaluator(const HybridSystem& system, const Channel& channel);

    void set_field(double field_t);
    const Eigen::MatrixXcd& hamiltonian() const noexcept { return h_; }
    double operator()(double probe_ghz);

private:
    struct Port {
        Eigen::Index drive;
        Eigen::Index readout;
        double weight;   // η·γ_readout/2, GHz
    };

    const HybridSystem* system_;
    std::vector<Port> ports_;
    Eigen::MatrixXcd h_;
    Eigen::MatrixXcd k_;
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu_;
    Eigen::VectorXcd rhs_;
    double field_t_ = 0.0;
};

// Evaluates the channel at every grid point.  The OpenMP kernel and the
// serial reference produce bit-identical maps.  Errors carry the grid
// coordinates of the first failing point (lowest index).
SpectrumMap sweep(const HybridSystem& system, const SweepGrid& grid, const Channel& channel);
SpectrumMap sweep_serial(const HybridSystem& system, const SweepGrid& grid, const Channel& channel);

} // namespace hsim
