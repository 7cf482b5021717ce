// calibration.hpp: fitting system parameters to transmission maps

#pragma once

#include "hsim/model.hpp"
#include "hsim/spectral.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace hsim {

enum class ObjectiveSpace { db, peak_positions };

struct ObjectiveOptions {
    ObjectiveSpace space = ObjectiveSpace::db;
    // Signal the model map records; defaults to drive = readout = first photon mode.
    std::optional<Channel> channel;
    double db_floor = -60.0;           // both maps clamped here in dB space
    double peak_threshold_db = -20.0;  // peak must reach this, relative to its slice maximum
    double unmatched_weight = 1.0;     // unmatched peak costs weight·(probe span)²
};

// Parameter paths:
//   couplings.<a>-<b>                       (order-insensitive, g in MHz)
//   photon_modes.<label>.<frequency_ghz|linewidth_mhz|readout_weight>
//   magnon_modes.<label>.<field_offset_mt|linewidth_mhz|diameter_mm|gyromagnetic_override_ghz_per_t>
//   constants.gyromagnetic_ghz_per_t
// Throws SpecError for unresolvable paths or unset optional fields.
double& parameter_ref(SystemSpec& spec, std::string_view path);
double parameter_value(const SystemSpec& spec, std::string_view path);

struct ParameterBounds {
    double lower = 0.0;
    double upper = 0.0;
};

// Heuristic box around the current value, by parameter kind.
ParameterBounds default_bounds(std::string_view path, double value);

struct FreeParameter {
    std::string path;
    std::optional<ParameterBounds> bounds;   // default_bounds when absent
};

struct FitOptions {
    int restarts = 5;
    int max_evaluations = 2000;   // per restart
    double tolerance = 1e-9;      // relative simplex spread
    double jitter = 0.1;          // restart starting points: initial·(1 ± jitter)
    double initial_step = 0.05;   // simplex edge, fraction of each bound width
    std::uint64_t seed = 0;
};

struct FitProblem {
    SpectrumMap data;
    SystemSpec initial;
    std::vector<FreeParameter> free_parameters;
    ObjectiveOptions objective;
    FitOptions options;
};

struct ParameterChange {
    std::string path;
    double initial = 0.0;
    double fitted = 0.0;
    ParameterBounds bounds;
};

struct FitResult {
    SystemSpec fitted_spec;
    double objective = 0.0;
    int iterations = 0;        // simplex iterations, all restarts
    int evaluations = 0;       // objective evaluations, all restarts
    int best_restart = 0;
    bool converged = false;
    std::vector<ParameterChange> changes;
};

// Map-vs-map objective.  Throws DataError when the grids differ.
double objective(const SpectrumMap& data, const SpectrumMap& model, const ObjectiveOptions& options = {});

// Sweeps `candidate` on the data grid and compares.
double objective(const SpectrumMap& data, const SystemSpec& candidate, const ObjectiveOptions& options = {});

// Nelder-Mead in bound-normalized coordinates, proposals reflected back into
// the box.  Restart 0 starts at the initial values, later restarts at seeded
// jitter of them; the best restart wins.  converged is false when the best
// restart ran out of evaluations.
FitResult fit_parameters(const FitProblem& problem);

// sweep(spec, grid) plus Gaussian noise of σ = noise_fraction·max, clamped at
// zero.  Reproducible for a given seed.
SpectrumMap synthesize_dataset(const SystemSpec& spec, const SweepGrid& grid, const Channel& channel,
                               double noise_fraction, std::uint64_t seed);

} // namespace hsim
