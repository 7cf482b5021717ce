#include "hsim/time_domain.hpp"

#include "hsim/errors.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <numbers>
#include <sstream>

namespace hsim {

namespace {

// FFTW planning is not thread-safe.
std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}

} // namespace

double default_reference(const HybridHamiltonian& h) {
    return h.entries.diagonal().real().mean();
}

Trajectory evolve(const HybridHamiltonian& h, const Eigen::VectorXcd& initial, double t_span_ns, double step_ns,
                  std::optional<double> reference_ghz) {
    const Eigen::Index n = h.entries.rows();
    if (initial.size() != n) throw DataError("evolve: initial state has the wrong dimension");
    if (!(step_ns > 0.0)) throw DataError("evolve: step must be > 0");
    if (!(t_span_ns >= step_ns)) throw DataError("evolve: time span must be >= step");
    if (!(initial.norm() > 0.0)) throw DataError("evolve: initial state must be non-zero");

    const double reference = reference_ghz.value_or(default_reference(h));
    Eigen::MatrixXcd shifted = h.entries;
    shifted.diagonal().array() -= cplx(reference, 0.0);

    double bound = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        bound = std::max(bound, shifted.row(i).cwiseAbs().sum());
    }
    if (bound > 0.0 && step_ns > 1.0 / (20.0 * bound)) {
        std::ostringstream os;
        os << "evolve: step " << step_ns << " ns too large; the spectrum extends " << bound
           << " GHz from the " << reference << " GHz reference, use step <= " << 1.0 / (20.0 * bound) << " ns";
        throw NumericError(os.str());
    }

    const auto steps = static_cast<std::size_t>(std::llround(t_span_ns / step_ns));
    const Eigen::MatrixXcd generator = cplx(0.0, -2.0 * std::numbers::pi) * shifted;

    Trajectory out;
    out.reference_ghz = reference;
    out.index_map = h.index_map;
    out.times_ns.resize(steps + 1);
    out.amplitudes.resize(static_cast<Eigen::Index>(steps + 1), n);

    Eigen::VectorXcd w = initial;
    out.times_ns[0] = 0.0;
    out.amplitudes.row(0) = w.transpose();
    for (std::size_t s = 1; s <= steps; ++s) {
        const Eigen::VectorXcd k1 = generator * w;
        const Eigen::VectorXcd k2 = generator * (w + 0.5 * step_ns * k1);
        const Eigen::VectorXcd k3 = generator * (w + 0.5 * step_ns * k2);
        const Eigen::VectorXcd k4 = generator * (w + step_ns * k3);
        w += (step_ns / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        out.times_ns[s] = static_cast<double>(s) * step_ns;
        out.amplitudes.row(static_cast<Eigen::Index>(s)) = w.transpose();
    }
    if (!out.amplitudes.allFinite()) throw NumericError("evolve: amplitudes diverged");
    return out;
}

std::vector<SpectralLine> ringdown_spectrum(const Trajectory& trajectory, std::size_t readout_index) {
    const auto samples = static_cast<std::size_t>(trajectory.amplitudes.rows());
    if (samples < 256) throw DataError("ringdown spectrum needs at least 256 samples");
    if (readout_index >= static_cast<std::size_t>(trajectory.amplitudes.cols())) {
        throw DataError("ringdown spectrum: readout index out of range");
    }

    const int n = static_cast<int>(samples);
    fftw_complex* buffer = fftw_alloc_complex(samples);
    fftw_plan plan;
    {
        std::lock_guard<std::mutex> lock(fftw_planner_mutex());
        plan = fftw_plan_dft_1d(n, buffer, buffer, FFTW_BACKWARD, FFTW_ESTIMATE);
    }
    for (std::size_t i = 0; i < samples; ++i) {
        const cplx a = trajectory.amplitudes(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(readout_index));
        buffer[i][0] = a.real();
        buffer[i][1] = a.imag();
    }
    fftw_execute(plan);

    // Amplitudes evolve as exp(−2πi·f·t); the exp(+2πi·jk/N) kernel of
    // FFTW_BACKWARD puts such a component at bin +f.
    const double df = 1.0 / (static_cast<double>(n) * trajectory.step_ns());
    std::vector<SpectralLine> out(samples);
    for (int k = 0; k < n; ++k) {
        const int shifted = k < (n + 1) / 2 ? k : k - n;
        const std::size_t slot = static_cast<std::size_t>(shifted + n / 2);
        const double re = buffer[k][0];
        const double im = buffer[k][1];
        out[slot] = {trajectory.reference_ghz + df * shifted, (re * re + im * im) / n};
    }
    {
        std::lock_guard<std::mutex> lock(fftw_planner_mutex());
        fftw_destroy_plan(plan);
    }
    fftw_free(buffer);
    return out;
}

} // namespace hsim
