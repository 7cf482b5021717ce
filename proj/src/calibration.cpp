#include "hsim/calibration.hpp"

#include "hsim/errors.hpp"
#include "hsim/peaks.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

namespace hsim {

namespace {

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = s.find(sep, start);
        parts.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return parts;
}

[[noreturn]] void bad_path(std::string_view path, const std::string& why) {
    throw SpecError("parameter '" + std::string(path) + "': " + why);
}

double& optional_ref(std::optional<double>& field, std::string_view path) {
    if (!field) bad_path(path, "field is not set");
    return *field;
}

Channel resolve_channel(const ObjectiveOptions& options, const SystemSpec& spec) {
    if (options.channel) return *options.channel;
    if (spec.photon_modes.empty()) throw SpecError("objective: system has no photon mode");
    return Channel::port(spec.photon_modes.front().label, spec.photon_modes.front().label);
}

double reflect_unit(double u) {
    if (u >= 0.0 && u <= 1.0) return u;
    u = std::fmod(std::abs(u), 2.0);
    return u > 1.0 ? 2.0 - u : u;
}

// Optimal non-crossing alignment of two sorted peak lists.
double match_cost(const std::vector<Peak>& a, const std::vector<Peak>& b, double penalty) {
    const std::size_t na = a.size(), nb = b.size();
    std::vector<double> prev(nb + 1), cur(nb + 1);
    for (std::size_t j = 0; j <= nb; ++j) prev[j] = penalty * static_cast<double>(j);
    for (std::size_t i = 1; i <= na; ++i) {
        cur[0] = penalty * static_cast<double>(i);
        for (std::size_t j = 1; j <= nb; ++j) {
            const double d = a[i - 1].position - b[j - 1].position;
            cur[j] = std::min({prev[j] + penalty, cur[j - 1] + penalty, prev[j - 1] + d * d});
        }
        std::swap(prev, cur);
    }
    return prev[nb];
}

std::vector<Peak> slice_peaks(const SpectrumMap& linear, std::size_t i, double threshold_db) {
    return find_peaks(linear.grid.probe_ghz, linear.slice(i), std::pow(10.0, threshold_db / 10.0));
}

struct SimplexOutcome {
    std::vector<double> best;
    double value = std::numeric_limits<double>::infinity();
    int iterations = 0;
    int evaluations = 0;
    bool converged = false;
};

template <class F>
SimplexOutcome nelder_mead(F&& f, std::vector<double> start, const FitOptions& options) {
    const std::size_t n = start.size();
    SimplexOutcome out;
    auto eval = [&](const std::vector<double>& u) {
        ++out.evaluations;
        return f(u);
    };

    std::vector<std::vector<double>> pts(n + 1, start);
    for (std::size_t k = 0; k < n; ++k) pts[k + 1][k] = reflect_unit(start[k] + options.initial_step);
    std::vector<double> vals(n + 1);
    for (std::size_t i = 0; i <= n; ++i) vals[i] = eval(pts[i]);

    std::vector<std::size_t> order(n + 1);
    auto combine = [&](const std::vector<double>& c, const std::vector<double>& w, double t) {
        std::vector<double> r(n);
        for (std::size_t k = 0; k < n; ++k) r[k] = reflect_unit(c[k] + t * (w[k] - c[k]));
        return r;
    };

    while (true) {
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return vals[a] < vals[b]; });
        const std::size_t best = order.front(), worst = order.back(), second = order[n - 1];

        double spread_x = 0.0;
        for (std::size_t i = 0; i <= n; ++i)
            for (std::size_t k = 0; k < n; ++k) spread_x = std::max(spread_x, std::abs(pts[i][k] - pts[best][k]));
        const double spread_f = vals[worst] - vals[best];
        if (spread_x < options.tolerance ||
            (std::isfinite(spread_f) && spread_f <= options.tolerance * std::abs(vals[best]))) {
            out.converged = true;
            break;
        }
        if (out.evaluations >= options.max_evaluations) break;
        ++out.iterations;

        std::vector<double> centroid(n, 0.0);
        for (std::size_t i = 0; i <= n; ++i) {
            if (i == worst) continue;
            for (std::size_t k = 0; k < n; ++k) centroid[k] += pts[i][k] / static_cast<double>(n);
        }
        const auto reflected = combine(centroid, pts[worst], -1.0);
        const double fr = eval(reflected);
        if (fr < vals[best]) {
            const auto expanded = combine(centroid, pts[worst], -2.0);
            const double fe = eval(expanded);
            if (fe < fr) {
                pts[worst] = expanded;
                vals[worst] = fe;
            } else {
                pts[worst] = reflected;
                vals[worst] = fr;
            }
            continue;
        }
        if (fr < vals[second]) {
            pts[worst] = reflected;
            vals[worst] = fr;
            continue;
        }
        const bool outside = fr < vals[worst];
        const auto contracted = combine(centroid, outside ? reflected : pts[worst], 0.5);
        const double fc = eval(contracted);
        if (fc < (outside ? fr : vals[worst])) {
            pts[worst] = contracted;
            vals[worst] = fc;
            continue;
        }
        for (std::size_t i = 0; i <= n; ++i) {
            if (i == best) continue;
            pts[i] = combine(pts[best], pts[i], 0.5);
            vals[i] = eval(pts[i]);
        }
    }
    const auto best = static_cast<std::size_t>(std::min_element(vals.begin(), vals.end()) - vals.begin());
    out.best = pts[best];
    out.value = vals[best];
    return out;
}

} // namespace

double& parameter_ref(SystemSpec& spec, std::string_view path) {
    const auto parts = split(path, '.');
    if (parts.size() == 2 && parts[0] == "constants") {
        if (parts[1] == "gyromagnetic_ghz_per_t") return spec.gyromagnetic_ghz_per_t;
        bad_path(path, "unknown constant");
    }
    if (parts.size() == 2 && parts[0] == "couplings") {
        const auto ends = split(parts[1], '-');
        if (ends.size() != 2) bad_path(path, "expected couplings.<a>-<b>");
        for (auto& c : spec.couplings) {
            if ((c.mode_a == ends[0] && c.mode_b == ends[1]) || (c.mode_a == ends[1] && c.mode_b == ends[0])) {
                return c.strength_mhz;
            }
        }
        bad_path(path, "no such coupling in the system");
    }
    if (parts.size() == 3 && parts[0] == "photon_modes") {
        for (auto& p : spec.photon_modes) {
            if (p.label != parts[1]) continue;
            if (parts[2] == "frequency_ghz") return p.frequency_ghz;
            if (parts[2] == "linewidth_mhz") return p.linewidth_mhz;
            if (parts[2] == "readout_weight") return p.readout_weight;
            bad_path(path, "unknown photon mode field");
        }
        bad_path(path, "no such photon mode");
    }
    if (parts.size() == 3 && parts[0] == "magnon_modes") {
        for (auto& m : spec.magnon_modes) {
            if (m.label != parts[1]) continue;
            if (parts[2] == "field_offset_mt") return m.field_offset_mt;
            if (parts[2] == "linewidth_mhz") return m.linewidth_mhz;
            if (parts[2] == "diameter_mm") return optional_ref(m.diameter_mm, path);
            if (parts[2] == "gyromagnetic_override_ghz_per_t") return optional_ref(m.gyromagnetic_override_ghz_per_t, path);
            bad_path(path, "unknown magnon mode field");
        }
        bad_path(path, "no such magnon mode");
    }
    bad_path(path, "unrecognized parameter path");
}

double parameter_value(const SystemSpec& spec, std::string_view path) {
    SystemSpec copy = spec;
    return parameter_ref(copy, path);
}

ParameterBounds default_bounds(std::string_view path, double value) {
    const auto ends_with = [&](std::string_view suffix) {
        return path.size() >= suffix.size() && path.substr(path.size() - suffix.size()) == suffix;
    };
    if (path.starts_with("couplings.")) return {0.0, 2.0 * value + 50.0};
    if (ends_with(".frequency_ghz")) return {0.9 * value, 1.1 * value};
    if (ends_with(".linewidth_mhz")) return {0.1 * value, 10.0 * value};
    if (ends_with(".readout_weight")) return {0.0, 2.0 * value + 1.0};
    if (ends_with(".field_offset_mt")) return {value - 50.0, value + 50.0};
    if (ends_with(".diameter_mm")) return {0.5 * value, 2.0 * value};
    if (ends_with("gyromagnetic_override_ghz_per_t") || ends_with("gyromagnetic_ghz_per_t")) {
        return {0.8 * value, 1.2 * value};
    }
    throw SpecError("no default bounds for parameter '" + std::string(path) + "'");
}

double objective(const SpectrumMap& data, const SpectrumMap& model, const ObjectiveOptions& options) {
    if (!(data.grid == model.grid)) throw DataError("objective: data and model grids differ");
    if (options.space == ObjectiveSpace::db) {
        const SpectrumMap a = to_db(data, options.db_floor);
        const SpectrumMap b = to_db(model, options.db_floor);
        double sum = 0.0;
        for (std::size_t i = 0; i < a.power.size(); ++i) {
            const double d = a.power[i] - b.power[i];
            sum += d * d;
        }
        return sum / static_cast<double>(a.power.size());
    }
    const SpectrumMap a = to_relative_linear(data);
    const SpectrumMap b = to_relative_linear(model);
    const double span = data.grid.probe_ghz.back() - data.grid.probe_ghz.front();
    const double penalty = options.unmatched_weight * span * span;
    double sum = 0.0;
    for (std::size_t i = 0; i < data.grid.field_count(); ++i) {
        sum += match_cost(slice_peaks(a, i, options.peak_threshold_db), slice_peaks(b, i, options.peak_threshold_db),
                          penalty);
    }
    return sum / static_cast<double>(data.grid.field_count());
}

double objective(const SpectrumMap& data, const SystemSpec& candidate, const ObjectiveOptions& options) {
    const HybridSystem system = build_system(candidate);
    const SpectrumMap model = sweep(system, data.grid, resolve_channel(options, candidate));
    return objective(data, model, options);
}

FitResult fit_parameters(const FitProblem& problem) {
    if (problem.free_parameters.empty()) throw SpecError("fit: no free parameters");
    if (problem.options.restarts < 1 || problem.options.max_evaluations < 1) {
        throw SpecError("fit: restarts and evaluation budget must be >= 1");
    }
    build_system(problem.initial);
    const Channel channel = resolve_channel(problem.objective, problem.initial);

    const std::size_t n = problem.free_parameters.size();
    std::vector<ParameterChange> params(n);
    for (std::size_t k = 0; k < n; ++k) {
        const auto& fp = problem.free_parameters[k];
        params[k].path = fp.path;
        params[k].initial = parameter_value(problem.initial, fp.path);
        params[k].bounds = fp.bounds.value_or(default_bounds(fp.path, params[k].initial));
        const auto& b = params[k].bounds;
        if (!(b.lower < b.upper)) throw SpecError("fit: empty bounds for '" + fp.path + "'");
        if (params[k].initial < b.lower || params[k].initial > b.upper) {
            throw SpecError("fit: initial value of '" + fp.path + "' lies outside its bounds");
        }
    }

    auto to_spec = [&](const std::vector<double>& u) {
        SystemSpec spec = problem.initial;
        for (std::size_t k = 0; k < n; ++k) {
            const auto& b = params[k].bounds;
            parameter_ref(spec, params[k].path) = b.lower + u[k] * (b.upper - b.lower);
        }
        return spec;
    };
    ObjectiveOptions opts = problem.objective;
    opts.channel = channel;
    auto f = [&](const std::vector<double>& u) {
        try {
            return objective(problem.data, to_spec(u), opts);
        } catch (const SpecError&) {
            return std::numeric_limits<double>::infinity();
        } catch (const NumericError&) {
            return std::numeric_limits<double>::infinity();
        }
    };

    std::mt19937_64 rng(problem.options.seed);
    std::uniform_real_distribution<double> jitter(-problem.options.jitter, problem.options.jitter);

    FitResult result;
    SimplexOutcome best;
    for (int r = 0; r < problem.options.restarts; ++r) {
        std::vector<double> start(n);
        for (std::size_t k = 0; k < n; ++k) {
            const auto& b = params[k].bounds;
            double x = params[k].initial;
            const double j = jitter(rng);
            if (r > 0) x = x != 0.0 ? x * (1.0 + j) : j * (b.upper - b.lower);
            start[k] = reflect_unit((x - b.lower) / (b.upper - b.lower));
        }
        SimplexOutcome run = nelder_mead(f, start, problem.options);
        result.iterations += run.iterations;
        result.evaluations += run.evaluations;
        if (run.value < best.value || r == 0) {
            best = std::move(run);
            result.best_restart = r;
        }
    }

    result.fitted_spec = to_spec(best.best);
    result.objective = best.value;
    result.converged = best.converged && std::isfinite(best.value);
    for (auto& p : params) p.fitted = parameter_value(result.fitted_spec, p.path);
    result.changes = std::move(params);
    return result;
}

SpectrumMap synthesize_dataset(const SystemSpec& spec, const SweepGrid& grid, const Channel& channel,
                               double noise_fraction, std::uint64_t seed) {
    if (!(noise_fraction >= 0.0)) throw DataError("noise fraction must be >= 0");
    SpectrumMap map = sweep(build_system(spec), grid, channel);
    if (noise_fraction == 0.0) return map;
    const double sigma = noise_fraction * map.max_value();
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, sigma);
    for (double& v : map.power) v = std::max(0.0, v + noise(rng));
    return map;
}

} // namespace hsim
