// Serial reference and OpenMP kernel for transmission sweeps.  Every grid
// point is independent; rows are written by field index so the parallel map
// is bit-identical to the serial one.

#include "hsim/errors.hpp"
#include "hsim/spectral.hpp"

#include <limits>
#include <optional>
#include <sstream>
#include <string>

namespace hsim {

namespace {

std::string located(const SweepGrid& grid, std::size_t i, std::size_t j, const char* what) {
    std::ostringstream os;
    os.precision(9);
    os << "sweep point (B=" << grid.field_t[i] << " T, f=" << grid.probe_ghz[j] << " GHz): " << what;
    return os.str();
}

// Evaluates row `i`; returns the probe index of the first failure, if any.
std::optional<std::size_t> fill_row(TransmissionEvaluator& eval, const SweepGrid& grid, std::size_t i,
                                    double* row, std::string& error) {
    eval.set_field(grid.field_t[i]);
    for (std::size_t j = 0; j < grid.probe_count(); ++j) {
        try {
            row[j] = eval(grid.probe_ghz[j]);
        } catch (const NumericError& e) {
            error = e.what();
            return j;
        }
    }
    return std::nullopt;
}

SpectrumMap empty_map(const SweepGrid& grid) {
    SpectrumMap map;
    map.grid = make_grid(grid.field_t, grid.probe_ghz);
    map.power.assign(grid.field_count() * grid.probe_count(), 0.0);
    return map;
}

} // namespace

SpectrumMap sweep_serial(const HybridSystem& system, const SweepGrid& grid, const Channel& channel) {
    SpectrumMap map = empty_map(grid);
    TransmissionEvaluator eval(system, channel);
    std::string error;
    for (std::size_t i = 0; i < grid.field_count(); ++i) {
        if (auto j = fill_row(eval, grid, i, map.power.data() + i * grid.probe_count(), error)) {
            throw NumericError(located(grid, i, *j, error.c_str()));
        }
    }
    return map;
}

SpectrumMap sweep(const HybridSystem& system, const SweepGrid& grid, const Channel& channel) {
    SpectrumMap map = empty_map(grid);
    // Constructed once up front so channel errors surface outside the region.
    const TransmissionEvaluator prototype(system, channel);

    const auto rows = static_cast<long long>(grid.field_count());
    const std::size_t none = std::numeric_limits<std::size_t>::max();
    std::size_t failed_row = none;
    std::size_t failed_col = 0;
    std::string failed_what;

#pragma omp parallel
    {
        TransmissionEvaluator eval = prototype;
        std::string error;
#pragma omp for schedule(static)
        for (long long r = 0; r < rows; ++r) {
            const auto i = static_cast<std::size_t>(r);
            if (auto j = fill_row(eval, grid, i, map.power.data() + i * grid.probe_count(), error)) {
#pragma omp critical(hsim_sweep_error)
                if (i < failed_row) {
                    failed_row = i;
                    failed_col = *j;
                    failed_what = error;
                }
            }
        }
    }
    if (failed_row != none) throw NumericError(located(grid, failed_row, failed_col, failed_what.c_str()));
    return map;
}

} // namespace hsim
