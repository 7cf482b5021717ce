#include "hsim/model.hpp"

#include "hsim/errors.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <utility>

namespace hsim {

namespace {

bool valid_label(std::string_view label) {
    if (label.empty()) return false;
    return std::all_of(label.begin(), label.end(), [](char ch) {
        return (ch >= 'a' && ch <= 'z') || (ch >= 'A' && ch <= 'Z') || (ch >= '0' && ch <= '9') || ch == '_';
    });
}

void require(bool condition, const std::string& message) {
    if (!condition) throw SpecError(message);
}

void validate_photon(const PhotonModeSpec& p) {
    require(valid_label(p.label), "photon mode label '" + p.label + "' must be non-empty [A-Za-z0-9_]");
    require(std::isfinite(p.frequency_ghz) && p.frequency_ghz > 0.0,
            "photon mode '" + p.label + "': frequency must be > 0");
    require(std::isfinite(p.linewidth_mhz) && p.linewidth_mhz > 0.0,
            "photon mode '" + p.label + "': linewidth must be > 0");
    require(std::isfinite(p.readout_weight) && p.readout_weight >= 0.0,
            "photon mode '" + p.label + "': readout weight must be >= 0");
}

void validate_magnon(const MagnonModeSpec& m) {
    require(valid_label(m.label), "magnon mode label '" + m.label + "' must be non-empty [A-Za-z0-9_]");
    require(std::isfinite(m.field_offset_mt), "magnon mode '" + m.label + "': field offset must be finite");
    require(std::isfinite(m.linewidth_mhz) && m.linewidth_mhz > 0.0,
            "magnon mode '" + m.label + "': linewidth must be > 0");
    if (m.diameter_mm) {
        require(std::isfinite(*m.diameter_mm) && *m.diameter_mm > 0.0,
                "magnon mode '" + m.label + "': diameter must be > 0");
    }
    if (m.gyromagnetic_override_ghz_per_t) {
        require(std::isfinite(*m.gyromagnetic_override_ghz_per_t) && *m.gyromagnetic_override_ghz_per_t > 0.0,
                "magnon mode '" + m.label + "': gyromagnetic override must be > 0");
    }
}

} // namespace

IndexMap::IndexMap(std::vector<std::string> labels, std::size_t photon_count)
    : labels_(std::move(labels)), photon_count_(photon_count) {
    for (std::size_t i = 0; i < labels_.size(); ++i) {
        if (!lookup_.emplace(labels_[i], i).second) {
            throw SpecError("duplicate mode label '" + labels_[i] + "'");
        }
    }
}

std::optional<std::size_t> IndexMap::find(std::string_view label) const {
    auto it = lookup_.find(std::string(label));
    if (it == lookup_.end()) return std::nullopt;
    return it->second;
}

std::size_t IndexMap::at(std::string_view label) const {
    if (auto idx = find(label)) return *idx;
    throw SpecError("unknown mode label '" + std::string(label) + "'");
}

double magnon_frequency(const MagnonModeSpec& mode, double field_t, double gyromagnetic_ghz_per_t) {
    const double gamma = mode.gyromagnetic_override_ghz_per_t.value_or(gyromagnetic_ghz_per_t);
    return gamma * (field_t + mode.field_offset_mt * 1e-3);
}

HybridSystem build_system(SystemSpec spec) {
    require(!spec.photon_modes.empty(), "system needs at least one photon mode");
    require(spec.photon_modes.size() + spec.magnon_modes.size() >= 2, "system needs at least two modes (N+M >= 2)");
    require(std::isfinite(spec.gyromagnetic_ghz_per_t) && spec.gyromagnetic_ghz_per_t > 0.0,
            "gyromagnetic ratio must be > 0");

    for (const auto& p : spec.photon_modes) validate_photon(p);
    for (const auto& m : spec.magnon_modes) validate_magnon(m);

    std::vector<std::string> labels;
    labels.reserve(spec.photon_modes.size() + spec.magnon_modes.size());
    for (const auto& p : spec.photon_modes) labels.push_back(p.label);
    for (const auto& m : spec.magnon_modes) labels.push_back(m.label);
    auto index = std::make_shared<const IndexMap>(std::move(labels), spec.photon_modes.size());

    const auto n = static_cast<Eigen::Index>(index->size());
    Eigen::MatrixXd coupling = Eigen::MatrixXd::Zero(n, n);
    std::set<std::pair<std::size_t, std::size_t>> seen;
    for (const auto& c : spec.couplings) {
        const std::string pair_name = c.mode_a + "-" + c.mode_b;
        auto ia = index->find(c.mode_a);
        auto ib = index->find(c.mode_b);
        require(ia.has_value(), "coupling " + pair_name + ": unknown mode '" + c.mode_a + "'");
        require(ib.has_value(), "coupling " + pair_name + ": unknown mode '" + c.mode_b + "'");
        require(*ia != *ib, "coupling " + pair_name + ": a mode cannot couple to itself");
        require(!(index->is_photon(*ia) && index->is_photon(*ib)),
                "coupling " + pair_name + ": photon-photon coupling forbidden");
        require(std::isfinite(c.strength_mhz) && c.strength_mhz >= 0.0,
                "coupling " + pair_name + ": strength must be >= 0");
        auto key = std::minmax(*ia, *ib);
        require(seen.insert(key).second, "coupling " + pair_name + ": duplicate entry for this pair");
        coupling(static_cast<Eigen::Index>(*ia), static_cast<Eigen::Index>(*ib)) = c.strength_mhz * 1e-3;
        coupling(static_cast<Eigen::Index>(*ib), static_cast<Eigen::Index>(*ia)) = c.strength_mhz * 1e-3;
    }

    HybridSystem sys;
    sys.base_ = coupling.cast<cplx>();
    const std::size_t np = spec.photon_modes.size();
    for (std::size_t i = 0; i < np; ++i) {
        const auto& p = spec.photon_modes[i];
        const auto k = static_cast<Eigen::Index>(i);
        sys.base_(k, k) = cplx(p.frequency_ghz, -0.5e-3 * p.linewidth_mhz);
    }
    sys.magnon_gamma_.resize(static_cast<Eigen::Index>(spec.magnon_modes.size()));
    for (std::size_t j = 0; j < spec.magnon_modes.size(); ++j) {
        const auto& m = spec.magnon_modes[j];
        const auto k = static_cast<Eigen::Index>(np + j);
        sys.magnon_gamma_(static_cast<Eigen::Index>(j)) =
            m.gyromagnetic_override_ghz_per_t.value_or(spec.gyromagnetic_ghz_per_t);
        sys.base_(k, k) = cplx(0.0, -0.5e-3 * m.linewidth_mhz);
    }
    sys.coupling_ = std::move(coupling);
    sys.index_ = std::move(index);
    sys.spec_ = std::move(spec);
    return sys;
}

double HybridSystem::gyromagnetic_of(std::size_t index) const {
    if (index < photon_count() || index >= dimension()) {
        throw SpecError("mode '" + index_->label(index) + "' is not a magnon mode");
    }
    return magnon_gamma_(static_cast<Eigen::Index>(index - photon_count()));
}

double HybridSystem::field_offset_of(std::size_t index) const {
    if (index < photon_count() || index >= dimension()) {
        throw SpecError("mode '" + index_->label(index) + "' is not a magnon mode");
    }
    return spec_.magnon_modes[index - photon_count()].field_offset_mt * 1e-3;
}

double HybridSystem::bare_frequency(std::size_t index, double field_t) const {
    if (index < photon_count()) return spec_.photon_modes[index].frequency_ghz;
    return magnon_frequency(spec_.magnon_modes.at(index - photon_count()), field_t, spec_.gyromagnetic_ghz_per_t);
}

void HybridSystem::fill_hamiltonian(double field_t, Eigen::MatrixXcd& out) const {
    out = base_;
    const std::size_t np = photon_count();
    for (std::size_t j = 0; j < spec_.magnon_modes.size(); ++j) {
        const auto k = static_cast<Eigen::Index>(np + j);
        const double freq = magnon_frequency(spec_.magnon_modes[j], field_t, spec_.gyromagnetic_ghz_per_t);
        out(k, k) = cplx(freq, base_(k, k).imag());
    }
}

HybridHamiltonian assemble_hamiltonian(const HybridSystem& system, double field_t) {
    HybridHamiltonian h;
    h.field_t = field_t;
    h.index_map = system.shared_index_map();
    system.fill_hamiltonian(field_t, h.entries);
    return h;
}

} // namespace hsim
