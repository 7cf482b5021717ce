// time_domain.hpp: ringdown integration of dW/dt = −i·2π·H·W
//
// Independent check on the frequency-domain engine: poles seen in a free
// ringdown must coincide with the eigenvalues and transmission peaks.

#pragma once

#include "hsim/model.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <optional>
#include <vector>

namespace hsim {

struct Trajectory {
    std::vector<double> times_ns;          // uniform, starting at 0
    Eigen::MatrixXcd amplitudes;           // [time][mode], rotating frame
    double reference_ghz = 0.0;
    std::shared_ptr<const IndexMap> index_map;

    double step_ns() const { return times_ns.size() > 1 ? times_ns[1] - times_ns[0] : 0.0; }
    double energy(std::size_t sample) const { return amplitudes.row(static_cast<Eigen::Index>(sample)).squaredNorm(); }
};

// Mean of the diagonal real parts.
double default_reference(const HybridHamiltonian& h);

// Fixed-step classical RK4 of dW/dt = −i·2π·(H − reference·I)·W over
// [0, t_span] (t in ns, frequencies in GHz).  Rejects step > 1/(20·Δ) where Δ
// bounds |λ − reference| over the spectrum (Gershgorin discs).
Trajectory evolve(const HybridHamiltonian& h, const Eigen::VectorXcd& initial, double t_span_ns, double step_ns,
                  std::optional<double> reference_ghz = std::nullopt);

struct SpectralLine {
    double frequency_ghz = 0.0;   // lab frame
    double power = 0.0;
};

// |DFT|²/N of the readout amplitude, ascending lab-frame frequency.  Requires
// at least 256 samples.
std::vector<SpectralLine> ringdown_spectrum(const Trajectory& trajectory, std::size_t readout_index);

} // namespace hsim
