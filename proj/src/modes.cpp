#include "hsim/modes.hpp"

#include "hsim/eigen_solver.hpp"
#include "hsim/errors.hpp"
#include "hsim/peaks.hpp"
#include "hsim/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>

namespace hsim {

namespace {

std::string field_name(double field_t) {
    std::ostringstream os;
    os.precision(9);
    os << "H(B=" << field_t << " T)";
    return os.str();
}

std::vector<EigenMode> modes_of(const Eigen::MatrixXcd& entries, std::size_t photon_count, std::string_view name) {
    const EigenDecomposition dec = complex_eigensolve(entries, name);
    const auto n = dec.values.size();
    std::vector<EigenMode> modes(static_cast<std::size_t>(n));
    for (Eigen::Index k = 0; k < n; ++k) {
        auto& m = modes[static_cast<std::size_t>(k)];
        m.frequency_ghz = dec.values(k).real();
        m.linewidth_mhz = -2e3 * dec.values(k).imag();
        m.vector = dec.vectors.col(k);
        m.photon_fraction = m.vector.head(static_cast<Eigen::Index>(photon_count)).squaredNorm();
    }
    std::stable_sort(modes.begin(), modes.end(), [](const EigenMode& a, const EigenMode& b) {
        if (a.frequency_ghz != b.frequency_ghz) return a.frequency_ghz < b.frequency_ghz;
        return a.linewidth_mhz < b.linewidth_mhz;
    });
    return modes;
}

cplx eigenvalue_of(const EigenMode& m) { return {m.frequency_ghz, -0.5e-3 * m.linewidth_mhz}; }

std::size_t photon_index(const HybridSystem& system, std::string_view label) {
    const std::size_t idx = system.index_map().at(label);
    if (!system.index_map().is_photon(idx)) throw SpecError("'" + std::string(label) + "' is not a photon mode");
    return idx;
}

std::size_t magnon_index(const HybridSystem& system, std::string_view label) {
    const std::size_t idx = system.index_map().at(label);
    if (system.index_map().is_photon(idx)) throw SpecError("'" + std::string(label) + "' is not a magnon mode");
    return idx;
}

// Minimum-cost perfect assignment; returns column for each row.
std::vector<std::size_t> hungarian(const std::vector<std::vector<double>>& cost) {
    const std::size_t n = cost.size();
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1);
    std::vector<std::size_t> p(n + 1, 0), way(n + 1, 0);
    std::vector<char> used(n + 1);
    for (std::size_t i = 1; i <= n; ++i) {
        p[0] = i;
        std::size_t j0 = 0;
        std::fill(minv.begin(), minv.end(), inf);
        std::fill(used.begin(), used.end(), 0);
        do {
            used[j0] = 1;
            const std::size_t i0 = p[j0];
            double delta = inf;
            std::size_t j1 = 0;
            for (std::size_t j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const double cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (std::size_t j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            const std::size_t j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0 != 0);
    }
    std::vector<std::size_t> assignment(n);
    for (std::size_t j = 1; j <= n; ++j) assignment[p[j] - 1] = j - 1;
    return assignment;
}

// Runs `body(i)` for every field index in parallel; rethrows the error of the
// lowest failing index.
template <class Body>
void for_each_field(std::size_t count, Body&& body) {
    std::vector<std::optional<std::string>> errors(count);
    std::vector<char> numeric(count, 0);
#pragma omp parallel for schedule(dynamic)
    for (long long r = 0; r < static_cast<long long>(count); ++r) {
        const auto i = static_cast<std::size_t>(r);
        try {
            body(i);
        } catch (const NumericError& e) {
            errors[i] = e.what();
            numeric[i] = 1;
        } catch (const std::exception& e) {
            errors[i] = e.what();
        }
    }
    for (std::size_t i = 0; i < count; ++i) {
        if (errors[i]) {
            if (numeric[i]) throw NumericError(*errors[i]);
            throw SpecError(*errors[i]);
        }
    }
}

} // namespace

std::vector<EigenMode> eigenmodes(const HybridHamiltonian& h) {
    return modes_of(h.entries, h.photon_count(), field_name(h.field_t));
}

double full_hybridization_field(const HybridSystem& system, std::string_view photon_label,
                                std::string_view magnon_label) {
    const std::size_t p = photon_index(system, photon_label);
    const std::size_t m = magnon_index(system, magnon_label);
    return system.spec().photon_modes[p].frequency_ghz / system.gyromagnetic_of(m) - system.field_offset_of(m);
}

RabiSplitting rabi_splitting(const HybridSystem& system, std::string_view photon_label,
                             std::string_view magnon_label) {
    const std::size_t p = photon_index(system, photon_label);
    const std::size_t m = magnon_index(system, magnon_label);
    const auto& g = system.coupling_matrix();
    const std::size_t n = system.dimension();
    const std::size_t first_magnon = system.photon_count();
    auto coupled = [&](std::size_t a, std::size_t b) {
        return g(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) > 0.0;
    };

    std::vector<char> member(n, 0);
    for (std::size_t y = first_magnon; y < n; ++y) member[y] = coupled(p, y) ? 1 : 0;
    if (!member[m]) {
        // Named magnon reaches the photon only through magnon-magnon links.
        std::vector<char> seen(n, 0);
        std::vector<std::size_t> stack{m};
        seen[m] = 1;
        bool reaches_photon = false;
        while (!stack.empty()) {
            const std::size_t y = stack.back();
            stack.pop_back();
            reaches_photon = reaches_photon || coupled(p, y);
            for (std::size_t z = first_magnon; z < n; ++z) {
                if (!seen[z] && coupled(y, z)) {
                    seen[z] = 1;
                    stack.push_back(z);
                }
            }
        }
        if (!reaches_photon) {
            throw SpecError("rabi splitting: modes '" + std::string(photon_label) + "' and '" +
                            std::string(magnon_label) + "' are decoupled");
        }
        for (std::size_t y = first_magnon; y < n; ++y) member[y] = member[y] || seen[y];
    }

    std::vector<Eigen::Index> keep{static_cast<Eigen::Index>(p)};
    for (std::size_t y = first_magnon; y < n; ++y)
        if (member[y]) keep.push_back(static_cast<Eigen::Index>(y));

    RabiSplitting out;
    out.field_t = full_hybridization_field(system, photon_label, magnon_label);
    Eigen::MatrixXcd full;
    system.fill_hamiltonian(out.field_t, full);
    const auto k = static_cast<Eigen::Index>(keep.size());
    Eigen::MatrixXcd sub(k, k);
    for (Eigen::Index i = 0; i < k; ++i)
        for (Eigen::Index j = 0; j < k; ++j) sub(i, j) = full(keep[i], keep[j]);

    const auto modes = modes_of(sub, 1, field_name(out.field_t));
    std::vector<const EigenMode*> mixed;
    for (const auto& mode : modes)
        if (mode.photon_fraction >= 0.1 && mode.photon_fraction <= 0.9) mixed.push_back(&mode);
    if (mixed.size() < 2) {
        // Strongly detuned ensemble: fall back to the two most mixed modes.
        std::vector<const EigenMode*> all;
        for (const auto& mode : modes) all.push_back(&mode);
        std::sort(all.begin(), all.end(), [](const EigenMode* a, const EigenMode* b) {
            return a->photon_fraction * (1 - a->photon_fraction) > b->photon_fraction * (1 - b->photon_fraction);
        });
        mixed = {all[0], all[1]};
        std::sort(mixed.begin(), mixed.end(),
                  [](const EigenMode* a, const EigenMode* b) { return a->frequency_ghz < b->frequency_ghz; });
    }
    out.lower_ghz = mixed.front()->frequency_ghz;
    out.upper_ghz = mixed.back()->frequency_ghz;
    out.splitting_mhz = 1e3 * (out.upper_ghz - out.lower_ghz);
    return out;
}

double scaling_prediction(double g_single_mhz, int count) {
    if (count < 1) throw SpecError("scaling prediction: count must be >= 1");
    return 2.0 * g_single_mhz * std::sqrt(static_cast<double>(count));
}

std::vector<DarkModeEntry> dark_mode_report(const HybridHamiltonian& h, double photon_threshold) {
    if (!(photon_threshold > 0.0 && photon_threshold < 1.0)) {
        throw SpecError("dark mode threshold must lie in (0, 1)");
    }
    std::vector<DarkModeEntry> out;
    for (auto& mode : eigenmodes(h)) {
        const bool dark = mode.photon_fraction < photon_threshold;
        out.push_back({std::move(mode), dark});
    }
    return out;
}

BranchSet track_branches(const HybridSystem& system, std::span<const double> field_t) {
    if (field_t.size() < 2) throw DataError("branch tracking needs at least two field values");
    for (std::size_t i = 1; i < field_t.size(); ++i)
        if (!(field_t[i] > field_t[i - 1])) throw DataError("branch tracking fields must be strictly increasing");

    const std::size_t count = field_t.size();
    std::vector<std::vector<EigenMode>> per_field(count);
    for_each_field(count, [&](std::size_t i) { per_field[i] = eigenmodes(assemble_hamiltonian(system, field_t[i])); });

    const std::size_t n = system.dimension();
    BranchSet out;
    out.field_t.assign(field_t.begin(), field_t.end());
    out.branches.assign(n, {});
    for (std::size_t b = 0; b < n; ++b) {
        out.branches[b].reserve(count);
        out.branches[b].push_back(per_field[0][b]);
    }

    std::vector<std::vector<double>> cost(n, std::vector<double>(n));
    for (std::size_t i = 1; i < count; ++i) {
        const auto& next = per_field[i];
        double scale = 0.0;
        for (const auto& mode : next) scale = std::max(scale, std::abs(eigenvalue_of(mode)));
        const double tie_weight = 1e-10 * std::max(scale, 1.0);
        for (std::size_t b = 0; b < n; ++b) {
            const auto& branch = out.branches[b];
            cplx predicted = eigenvalue_of(branch[i - 1]);
            if (i >= 2) {
                const double ratio = (field_t[i] - field_t[i - 1]) / (field_t[i - 1] - field_t[i - 2]);
                predicted += ratio * (eigenvalue_of(branch[i - 1]) - eigenvalue_of(branch[i - 2]));
            }
            for (std::size_t k = 0; k < n; ++k) {
                const double overlap = std::abs(branch[i - 1].vector.dot(next[k].vector));
                cost[b][k] = std::abs(predicted - eigenvalue_of(next[k])) + tie_weight * (1.0 - overlap);
            }
        }
        const auto assignment = hungarian(cost);
        for (std::size_t b = 0; b < n; ++b) out.branches[b].push_back(next[assignment[b]]);
    }
    return out;
}

TransductionBandwidth transduction_bandwidth(const HybridSystem& system, std::string_view drive_magnon,
                                             std::string_view readout_photon, std::span<const double> field_t) {
    magnon_index(system, drive_magnon);
    const std::size_t readout = photon_index(system, readout_photon);
    if (field_t.empty()) throw DataError("transduction bandwidth: empty field range");

    const std::size_t count = field_t.size();
    TransductionBandwidth out;
    out.field_t.assign(field_t.begin(), field_t.end());
    out.efficiency.assign(count, 0.0);
    out.lower_branch_ghz.assign(count, 0.0);
    const Channel channel = Channel::port(std::string(drive_magnon), std::string(readout_photon));
    const TransmissionEvaluator prototype(system, channel);

    for_each_field(count, [&](std::size_t i) {
        TransmissionEvaluator eval = prototype;
        eval.set_field(field_t[i]);
        const auto modes = modes_of(eval.hamiltonian(), system.photon_count(), field_name(field_t[i]));
        double best = 0.0;
        for (const auto& mode : modes) {
            const double half_width = std::max(0.5e-3 * mode.linewidth_mhz, 1e-9);
            const double lo = mode.frequency_ghz - 4.0 * half_width;
            const double hi = mode.frequency_ghz + 4.0 * half_width;
            const double at = golden_maximize([&](double f) { return eval(f); }, lo, hi);
            best = std::max({best, eval(at), eval(mode.frequency_ghz)});
        }
        out.efficiency[i] = best;
        out.lower_branch_ghz[i] = modes.front().frequency_ghz;
    });

    out.peak_efficiency = *std::max_element(out.efficiency.begin(), out.efficiency.end());
    const auto& photon = system.spec().photon_modes[readout];
    // Self-transmission peak of the bare readout mode sets the scale of "zero".
    const double reference = 2.0 * photon.frequency_ghz * photon.frequency_ghz / (photon.linewidth_mhz * 1e-3);
    if (!(out.peak_efficiency > 1e-12 * reference)) {
        throw NumericError("no transduction: " + std::string(drive_magnon) + " -> " + std::string(readout_photon) +
                           " efficiency vanishes over the field range");
    }

    double f_lo = std::numeric_limits<double>::infinity();
    double f_hi = -f_lo;
    out.field_min_t = std::numeric_limits<double>::infinity();
    out.field_max_t = -out.field_min_t;
    for (std::size_t i = 0; i < count; ++i) {
        if (out.efficiency[i] < 0.5 * out.peak_efficiency) continue;
        f_lo = std::min(f_lo, out.lower_branch_ghz[i]);
        f_hi = std::max(f_hi, out.lower_branch_ghz[i]);
        out.field_min_t = std::min(out.field_min_t, field_t[i]);
        out.field_max_t = std::max(out.field_max_t, field_t[i]);
    }
    out.bandwidth_mhz = 1e3 * (f_hi - f_lo);
    return out;
}

} // namespace hsim
