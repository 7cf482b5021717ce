#include "support.hpp"

#include "hsim/errors.hpp"
#include "hsim/modes.hpp"
#include "hsim/time_domain.hpp"

#include <Eigen/Eigenvalues>
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

using namespace hsim;

namespace {

// W(t) = V·exp(−2πi(Λ − ref)t)·V⁻¹·W0
Eigen::VectorXcd exact_state(const HybridHamiltonian& h, const Eigen::VectorXcd& w0, double t, double ref) {
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(h.entries);
    const Eigen::MatrixXcd v = es.eigenvectors();
    Eigen::VectorXcd phase(v.cols());
    for (Eigen::Index k = 0; k < v.cols(); ++k) {
        phase(k) = std::exp(cplx(0.0, -2.0 * std::numbers::pi) * (es.eigenvalues()(k) - ref) * t);
    }
    return v * phase.asDiagonal() * v.partialPivLu().solve(w0);
}

} // namespace

TEST_SUITE("time_domain") {

TEST_CASE("RK4 converges at fourth order") {
    const HybridSystem sys = build_system(test::bundled("fig1c"));
    const HybridHamiltonian h = assemble_hamiltonian(sys, 0.375);
    Eigen::VectorXcd w0 = Eigen::VectorXcd::Zero(4);
    w0(0) = 1.0;
    const double ref = default_reference(h);
    const double t_end = 20.0;
    const Eigen::VectorXcd exact = exact_state(h, w0, t_end, ref);

    double prev_error = 0.0;
    for (double step : {0.02, 0.01, 0.005}) {
        const Trajectory tr = evolve(h, w0, t_end, step);
        CHECK(tr.times_ns.back() == doctest::Approx(t_end));
        const Eigen::VectorXcd last = tr.amplitudes.bottomRows(1).transpose();
        const double error = (last - exact).norm();
        if (prev_error > 0.0) {
            const double ratio = prev_error / error;
            CHECK(ratio > 14.0);
            CHECK(ratio < 18.0);
        }
        prev_error = error;
    }
}

TEST_CASE("energy decays in a lossy system and is conserved without loss") {
    const HybridSystem sys = build_system(test::bundled("fig1d"));
    HybridHamiltonian h = assemble_hamiltonian(sys, 0.38);
    Eigen::VectorXcd w0 = Eigen::VectorXcd::Zero(4);
    w0(0) = 1.0;
    const Trajectory lossy = evolve(h, w0, 100.0, 0.01);
    for (std::size_t i = 1; i < lossy.times_ns.size(); ++i) CHECK(lossy.energy(i) <= lossy.energy(i - 1) + 1e-15);

    h.entries.diagonal() = h.entries.diagonal().real().cast<cplx>();
    const Trajectory lossless = evolve(h, w0, 100.0, 0.01);
    CHECK(std::abs(lossless.energy(lossless.times_ns.size() - 1) - 1.0) < 1e-6);
}

TEST_CASE("ringdown spectrum puts a bare mode at its frequency") {
    const HybridSystem sys = build_system(test::bundled("fig1a"));
    const HybridHamiltonian h = assemble_hamiltonian(sys, 0.30);
    Eigen::VectorXcd w0 = Eigen::VectorXcd::Zero(4);
    w0(1) = 1.0;   // d is uncoupled
    const Trajectory tr = evolve(h, w0, 1000.0, 0.02);
    const auto lines = ringdown_spectrum(tr, 1);
    const auto peak = std::max_element(lines.begin(), lines.end(),
                                       [](const auto& a, const auto& b) { return a.power < b.power; });
    const double bin = 1.0 / (static_cast<double>(lines.size()) * tr.step_ns());
    CHECK(std::abs(peak->frequency_ghz - 10.9) <= bin);
    CHECK(std::is_sorted(lines.begin(), lines.end(),
                         [](const auto& a, const auto& b) { return a.frequency_ghz < b.frequency_ghz; }));
}

TEST_CASE("ringdown of coupled modes resolves both hybrid frequencies") {
    const HybridSystem sys = build_system(test::bundled("fig1a"));
    const HybridHamiltonian h = assemble_hamiltonian(sys, 10.65 / 28.0);
    Eigen::VectorXcd w0 = Eigen::VectorXcd::Zero(4);
    w0(0) = 1.0;
    const Trajectory tr = evolve(h, w0, 2000.0, 0.05);
    const auto lines = ringdown_spectrum(tr, 0);
    const double bin = 1.0 / (static_cast<double>(lines.size()) * tr.step_ns());
    for (double target : {10.65 - 0.09, 10.65 + 0.09}) {
        std::size_t best = 0;
        for (std::size_t k = 1; k + 1 < lines.size(); ++k) {
            if (std::abs(lines[k].frequency_ghz - target) < 0.01 && lines[k].power > lines[best].power) best = k;
        }
        CHECK(std::abs(lines[best].frequency_ghz - target) <= bin);
    }
}

TEST_CASE("input checks") {
    const HybridSystem sys = build_system(test::bundled("fig1a"));
    const HybridHamiltonian h = assemble_hamiltonian(sys, 0.38);
    Eigen::VectorXcd w0 = Eigen::VectorXcd::Zero(4);
    w0(0) = 1.0;
    CHECK_THROWS_AS(evolve(h, w0, 10.0, 1.0), NumericError);
    CHECK_THROWS_AS(evolve(h, Eigen::VectorXcd::Zero(4), 10.0, 0.01), DataError);
    CHECK_THROWS_AS(evolve(h, Eigen::VectorXcd::Ones(3), 10.0, 0.01), DataError);
    CHECK_THROWS_AS(evolve(h, w0, 10.0, -0.01), DataError);
    const Trajectory short_run = evolve(h, w0, 1.0, 0.01);
    CHECK_THROWS_AS(ringdown_spectrum(short_run, 0), DataError);
    const Trajectory tr = evolve(h, w0, 5.0, 0.01);
    CHECK_THROWS_AS(ringdown_spectrum(tr, 9), DataError);
}

}
