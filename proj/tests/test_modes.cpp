#include "support.hpp"

#include "hsim/errors.hpp"
#include "hsim/modes.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>

using namespace hsim;

namespace {

double trace_real(const std::vector<EigenMode>& modes) {
    double s = 0.0;
    for (const auto& m : modes) s += m.frequency_ghz;
    return s;
}

} // namespace

TEST_SUITE("modes") {

TEST_CASE("hermitian limit gives real eigenvalues") {
    for (const char* name : {"fig1b", "fig1d", "ten_spheres_roomT", "ten_spheres_90mK"}) {
        const HybridSystem sys = build_system(test::bundled(name));
        HybridHamiltonian h = assemble_hamiltonian(sys, 0.379);
        h.entries.diagonal() = h.entries.diagonal().real().cast<cplx>();
        const double norm = h.entries.norm();
        for (const auto& m : eigenmodes(h)) CHECK(std::abs(m.linewidth_mhz * 0.5e-3) < 1e-10 * norm);
    }
}

TEST_CASE("trace is conserved") {
    const HybridSystem sys = build_system(test::bundled("ten_spheres_90mK"));
    for (double b : {0.35, 0.380357, 0.41}) {
        const HybridHamiltonian h = assemble_hamiltonian(sys, b);
        const auto modes = eigenmodes(h);
        const cplx tr = h.entries.trace();
        double im = 0.0;
        for (const auto& m : modes) im += -0.5e-3 * m.linewidth_mhz;
        CHECK(std::abs(trace_real(modes) - tr.real()) < 1e-9 * std::abs(tr));
        CHECK(std::abs(im - tr.imag()) < 1e-9 * std::abs(tr));
    }
}

TEST_CASE("uniform damping shifts every eigenvalue by -i*gamma/2") {
    SystemSpec spec = test::bundled("ten_spheres_roomT");
    for (auto& p : spec.photon_modes) p.linewidth_mhz = 4.0;
    for (auto& m : spec.magnon_modes) m.linewidth_mhz = 4.0;
    const HybridSystem sys = build_system(spec);
    HybridHamiltonian h = assemble_hamiltonian(sys, 0.381);
    const auto damped = eigenmodes(h);
    h.entries.diagonal() = h.entries.diagonal().real().cast<cplx>();
    const auto lossless = eigenmodes(h);
    REQUIRE(damped.size() == lossless.size());
    for (std::size_t k = 0; k < damped.size(); ++k) {
        CHECK(damped[k].frequency_ghz == doctest::Approx(lossless[k].frequency_ghz).epsilon(1e-12));
        CHECK(damped[k].linewidth_mhz == doctest::Approx(4.0).epsilon(1e-9));
    }
}

TEST_CASE("eigenvectors satisfy H v = lambda v with photon fractions in [0, 1]") {
    const HybridSystem sys = build_system(test::bundled("fig1c"));
    const HybridHamiltonian h = assemble_hamiltonian(sys, 0.372);
    for (const auto& m : eigenmodes(h)) {
        const cplx lambda(m.frequency_ghz, -0.5e-3 * m.linewidth_mhz);
        CHECK((h.entries * m.vector - lambda * m.vector).norm() < 1e-12);
        CHECK(m.photon_fraction >= 0.0);
        CHECK(m.photon_fraction <= 1.0 + 1e-12);
    }
}

TEST_CASE("permuting magnon declarations leaves the spectrum unchanged") {
    const SystemSpec spec = test::bundled("fig1c");
    SystemSpec swapped = spec;
    std::reverse(swapped.magnon_modes.begin(), swapped.magnon_modes.end());
    std::reverse(swapped.couplings.begin(), swapped.couplings.end());
    const auto a = eigenmodes(assemble_hamiltonian(build_system(spec), 0.375));
    const auto b = eigenmodes(assemble_hamiltonian(build_system(swapped), 0.375));
    for (std::size_t k = 0; k < a.size(); ++k) {
        CHECK(a[k].frequency_ghz == doctest::Approx(b[k].frequency_ghz).epsilon(1e-12));
        CHECK(a[k].linewidth_mhz == doctest::Approx(b[k].linewidth_mhz).epsilon(1e-9));
        CHECK(a[k].photon_fraction == doctest::Approx(b[k].photon_fraction).epsilon(1e-9));
    }
}

TEST_CASE("full hybridization field") {
    const HybridSystem sys = build_system(test::bundled("fig1c"));
    CHECK(full_hybridization_field(sys, "c", "m") == doctest::Approx(10.65 / 28.0).epsilon(1e-15));
    CHECK(full_hybridization_field(sys, "c", "n") ==
          doctest::Approx(10.65 / 28.0 - 0.4 / 28.0).epsilon(1e-12));
    CHECK_THROWS_AS(full_hybridization_field(sys, "m", "c"), SpecError);
}

TEST_CASE("two-mode rabi splitting matches the closed form") {
    const HybridSystem sys = build_system(test::bundled("fig1a"));
    const RabiSplitting rs = rabi_splitting(sys, "c", "m");
    // λ± = mean ± sqrt(((a−d)/2)² + g²), a − d = i(γm − γc)/2 at resonance.
    const cplx half_diff(0.0, 0.25 * (0.002 - 0.001));
    const double expected = 2.0 * std::sqrt(half_diff * half_diff + 0.09 * 0.09).real() * 1e3;
    CHECK(rs.splitting_mhz == doctest::Approx(expected).epsilon(1e-10));
    CHECK(rs.field_t == doctest::Approx(10.65 / 28.0));
    CHECK(rs.upper_ghz - rs.lower_ghz == doctest::Approx(expected * 1e-3));
}

TEST_CASE("rabi splitting rejects disconnected pairs") {
    const HybridSystem sys = build_system(test::bundled("fig1a"));
    CHECK_THROWS_AS(rabi_splitting(sys, "c", "n"), SpecError);
    CHECK_THROWS_AS(rabi_splitting(sys, "m", "c"), SpecError);
}

TEST_CASE("rabi splitting reaches magnons through magnon links") {
    // n couples to c only through m, so (c, n) uses the cluster {m, n};
    // (c, m) keeps only the directly coupled magnon.
    const HybridSystem sys = build_system(test::bundled("fig1d"));
    const RabiSplitting direct = rabi_splitting(sys, "c", "m");
    const RabiSplitting chain = rabi_splitting(sys, "c", "n");
    CHECK(direct.splitting_mhz == doctest::Approx(180.0).epsilon(1e-4));
    // outer modes of the c-m-n chain: 2·sqrt(g_cm² + g_mn²)
    CHECK(chain.splitting_mhz == doctest::Approx(2.0 * std::hypot(90.0, 25.0)).epsilon(1e-4));
}

TEST_CASE("collective enhancement and dark modes for N degenerate magnons") {
    for (int n = 1; n <= 16; ++n) {
        const HybridSystem sys = build_system(test::degenerate_ensemble(n, 40.0));
        const RabiSplitting rs = rabi_splitting(sys, "c", "m1");
        CHECK(rs.splitting_mhz == doctest::Approx(scaling_prediction(40.0, n)).epsilon(1e-3));

        const auto report = dark_mode_report(assemble_hamiltonian(sys, rs.field_t), 0.01);
        const auto dark = std::count_if(report.begin(), report.end(), [](const auto& e) { return e.is_dark; });
        CHECK(dark == n - 1);
    }
    CHECK(scaling_prediction(105.0, 10) == doctest::Approx(664.078).epsilon(1e-5));
    CHECK_THROWS_AS(scaling_prediction(1.0, 0), SpecError);
}

TEST_CASE("dark mode threshold bounds") {
    const HybridHamiltonian h = assemble_hamiltonian(build_system(test::bundled("fig1d")), 0.38);
    CHECK_THROWS_AS(dark_mode_report(h, 0.0), SpecError);
    CHECK_THROWS_AS(dark_mode_report(h, 1.0), SpecError);
    // the central mode of the c-m-n chain is mostly magnon
    const auto r = dark_mode_report(h, 0.1);
    CHECK(std::count_if(r.begin(), r.end(), [](const auto& e) { return e.is_dark; }) == 1);
}

TEST_CASE("branch tracking follows a true crossing") {
    // d is uncoupled in this system, so its branch must stay flat while the
    // magnon-like branches sweep through it.
    const HybridSystem sys = build_system(test::bundled("fig1a"));
    std::vector<double> fields;
    for (int i = 0; i <= 200; ++i) fields.push_back(0.37 + 0.0002 * i);
    const BranchSet set = track_branches(sys, fields);
    REQUIRE(set.branches.size() == 4);
    int flat = 0;
    for (const auto& br : set.branches) {
        bool is_flat = true;
        for (const auto& m : br) is_flat = is_flat && std::abs(m.frequency_ghz - 10.9) < 1e-9;
        flat += is_flat;
    }
    CHECK(flat == 1);
    // every branch moves continuously
    for (const auto& br : set.branches) {
        for (std::size_t i = 1; i < br.size(); ++i) {
            CHECK(std::abs(br[i].frequency_ghz - br[i - 1].frequency_ghz) < 28.0 * 0.0002 * 1.01);
        }
    }
}

TEST_CASE("branch tracking input checks") {
    const HybridSystem sys = build_system(test::bundled("fig1a"));
    const std::vector<double> one{0.38};
    const std::vector<double> descending{0.39, 0.38};
    CHECK_THROWS_AS(track_branches(sys, one), DataError);
    CHECK_THROWS_AS(track_branches(sys, descending), DataError);
}

TEST_CASE("transduction bandwidth grows with coupling") {
    std::vector<double> fields;
    for (int i = 0; i <= 400; ++i) fields.push_back(0.30 + 0.0004 * i);
    const auto single = transduction_bandwidth(build_system(test::bundled("fig1a")), "m", "c", fields);
    const auto array = transduction_bandwidth(build_system(test::bundled("ten_spheres_roomT")), "m", "c", fields);
    CHECK(single.bandwidth_mhz > 0.0);
    CHECK(single.bandwidth_mhz < array.bandwidth_mhz);
    CHECK(single.efficiency.size() == fields.size());
    CHECK(*std::max_element(single.efficiency.begin(), single.efficiency.end()) == single.peak_efficiency);
    CHECK(single.field_min_t <= single.field_max_t);
}

TEST_CASE("transduction bandwidth errors") {
    const HybridSystem sys = build_system(test::bundled("fig1a"));
    const std::vector<double> empty;
    const std::vector<double> fields{0.37, 0.38, 0.39};
    CHECK_THROWS_AS(transduction_bandwidth(sys, "m", "c", empty), DataError);
    CHECK_THROWS_AS(transduction_bandwidth(sys, "c", "m", fields), SpecError);
    // n never talks to c
    CHECK_THROWS_AS(transduction_bandwidth(sys, "n", "c", fields), NumericError);
}

}
