#include "hsim/spectral.hpp"

#include "hsim/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace hsim {

namespace {

void require_strictly_increasing(const std::vector<double>& axis, const char* name) {
    if (axis.empty()) throw DataError(std::string(name) + " axis is empty");
    for (std::size_t i = 0; i < axis.size(); ++i) {
        if (!std::isfinite(axis[i])) throw DataError(std::string(name) + " axis contains a non-finite value");
        if (i > 0 && !(axis[i] > axis[i - 1])) {
            throw DataError(std::string(name) + " axis must be strictly increasing");
        }
    }
}

// Pivot test shared by every LU solve of K.
void check_pivots(const Eigen::MatrixXcd& k, const Eigen::PartialPivLU<Eigen::MatrixXcd>& lu, double probe_ghz) {
    const double norm1 = k.cwiseAbs().colwise().sum().maxCoeff();
    const double min_pivot = lu.matrixLU().diagonal().cwiseAbs().minCoeff();
    if (!(min_pivot >= 1e-14 * norm1)) {
        std::ostringstream os;
        os << "K matrix singular at probe " << probe_ghz << " GHz (pivot " << min_pivot << ", norm " << norm1 << ")";
        throw NumericError(os.str());
    }
}

} // namespace

SweepGrid make_grid(std::vector<double> field_t, std::vector<double> probe_ghz) {
    require_strictly_increasing(field_t, "field");
    require_strictly_increasing(probe_ghz, "probe frequency");
    return SweepGrid{std::move(field_t), std::move(probe_ghz)};
}

std::vector<double> linspace(double start, double stop, std::size_t count) {
    if (count == 0) throw DataError("linspace: count must be >= 1");
    std::vector<double> out(count);
    if (count == 1) {
        out[0] = start;
        return out;
    }
    const double step = (stop - start) / static_cast<double>(count - 1);
    for (std::size_t i = 0; i < count; ++i) out[i] = start + step * static_cast<double>(i);
    out.back() = stop;
    return out;
}

double SpectrumMap::max_value() const {
    if (power.empty()) return 0.0;
    return *std::max_element(power.begin(), power.end());
}

SpectrumMap to_db(const SpectrumMap& map, double floor_db) {
    SpectrumMap out = map;
    out.scale = PowerScale::db_relative;
    const double top = map.max_value();
    if (map.scale == PowerScale::db_relative) {
        for (double& v : out.power) v = std::max(v - top, floor_db);
        return out;
    }
    if (!(top > 0.0)) throw DataError("cannot normalize a map whose maximum power is not positive");
    for (double& v : out.power) {
        const double rel = v / top;
        v = rel > 0.0 ? std::max(10.0 * std::log10(rel), floor_db) : floor_db;
    }
    return out;
}

SpectrumMap to_relative_linear(const SpectrumMap& map) {
    SpectrumMap out = map;
    out.scale = PowerScale::linear;
    const double top = map.max_value();
    if (map.scale == PowerScale::db_relative) {
        for (double& v : out.power) v = std::pow(10.0, (v - top) / 10.0);
        return out;
    }
    if (!(top > 0.0)) throw DataError("cannot normalize a map whose maximum power is not positive");
    for (double& v : out.power) v /= top;
    return out;
}

Eigen::MatrixXcd k_matrix(const HybridHamiltonian& h, double probe_ghz) {
    Eigen::MatrixXcd k = -h.entries;
    k.diagonal().array() += cplx(probe_ghz, 0.0);
    return k;
}

double transmission(const HybridHamiltonian& h, double probe_ghz, std::size_t drive, std::size_t readout) {
    const auto n = static_cast<std::size_t>(h.entries.rows());
    if (drive >= n || readout >= n) throw SpecError("transmission: port index out of range");
    const Eigen::MatrixXcd k = k_matrix(h, probe_ghz);
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(k);
    check_pivots(k, lu, probe_ghz);
    const Eigen::VectorXcd x = lu.solve(Eigen::VectorXcd::Unit(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(drive)));
    const double gamma = h.linewidth_ghz(readout);
    return 0.5 * gamma * probe_ghz * probe_ghz * std::norm(x(static_cast<Eigen::Index>(readout)));
}

double transmission(const HybridSystem& system, double field_t, double probe_ghz,
                    std::string_view drive, std::string_view readout) {
    TransmissionEvaluator eval(system, Channel::port(std::string(drive), std::string(readout)));
    eval.set_field(field_t);
    return eval(probe_ghz);
}

double total_transmission(const HybridSystem& system, double field_t, double probe_ghz) {
    TransmissionEvaluator eval(system, Channel::total());
    eval.set_field(field_t);
    return eval(probe_ghz);
}

TransmissionEvaluator::TransmissionEvaluator(const HybridSystem& system, const Channel& channel)
    : system_(&system) {
    const auto& map = system.index_map();
    auto linewidth_ghz = [&](std::size_t idx) {
        return idx < map.photon_count() ? system.spec().photon_modes[idx].linewidth_mhz * 1e-3
                                        : system.spec().magnon_modes[idx - map.photon_count()].linewidth_mhz * 1e-3;
    };
    if (channel.kind == Channel::Kind::port) {
        const std::size_t d = map.at(channel.drive);
        const std::size_t r = map.at(channel.readout);
        ports_.push_back({static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(r), 0.5 * linewidth_ghz(r)});
    } else {
        for (std::size_t x = 0; x < map.photon_count(); ++x) {
            const double eta = system.spec().photon_modes[x].readout_weight;
            if (eta > 0.0) {
                ports_.push_back({static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(x), eta * 0.5 * linewidth_ghz(x)});
            }
        }
        if (ports_.empty()) throw SpecError("no readout channel: every photon readout weight is zero");
    }
    const auto n = static_cast<Eigen::Index>(system.dimension());
    k_.resize(n, n);
    rhs_.resize(n);
    set_field(0.0);
}

void TransmissionEvaluator::set_field(double field_t) {
    field_t_ = field_t;
    system_->fill_hamiltonian(field_t, h_);
}

double TransmissionEvaluator::operator()(double probe_ghz) {
    k_ = -h_;
    k_.diagonal().array() += cplx(probe_ghz, 0.0);
    lu_.compute(k_);
    check_pivots(k_, lu_, probe_ghz);
    double total = 0.0;
    for (const auto& port : ports_) {
        rhs_.setZero();
        rhs_(port.drive) = 1.0;
        const Eigen::VectorXcd x = lu_.solve(rhs_);
        total += port.weight * probe_ghz * probe_ghz * std::norm(x(port.readout));
    }
    return total;
}

} // namespace hsim
