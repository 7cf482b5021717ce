#include "support.hpp"

#include "hsim/errors.hpp"
#include "hsim/model.hpp"

#include <doctest.h>

using namespace hsim;

TEST_SUITE("model") {

TEST_CASE("hamiltonian entries match a hand-built matrix") {
    const SystemSpec spec = test::bundled("fig1c");
    const HybridSystem sys = build_system(spec);
    const double b = 0.37;
    const HybridHamiltonian h = assemble_hamiltonian(sys, b);
    REQUIRE(h.dimension() == 4);

    // order: c, d, m, n
    Eigen::MatrixXcd expected = Eigen::MatrixXcd::Zero(4, 4);
    expected(0, 0) = cplx(10.65, -0.0005);
    expected(1, 1) = cplx(10.9, -0.0005);
    expected(2, 2) = cplx(28.0 * b, -0.001);
    expected(3, 3) = cplx(28.0 * (b + 0.014285714285714286), -0.001);
    expected(0, 2) = expected(2, 0) = 0.090;
    expected(0, 3) = expected(3, 0) = 0.025;
    CHECK((h.entries - expected).cwiseAbs().maxCoeff() < 1e-15);
    CHECK(h.linewidth_ghz(0) == doctest::Approx(0.001));
}

TEST_CASE("matrix is complex symmetric") {
    for (const char* name : {"fig1a", "fig1b", "fig1c", "fig1d", "ten_spheres_roomT", "ten_spheres_90mK"}) {
        const HybridSystem sys = build_system(test::bundled(name));
        const HybridHamiltonian h = assemble_hamiltonian(sys, 0.38);
        CHECK((h.entries - h.entries.transpose()).cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("gyromagnetic override applies per mode") {
    const HybridSystem sys = build_system(test::bundled("single_sphere_14GHz"));
    const std::size_t m = sys.index_map().at("m");
    CHECK(sys.gyromagnetic_of(m) == 26.0);
    CHECK(sys.bare_frequency(m, 0.5) == doctest::Approx(26.0 * (0.5 + 0.01395879)));
    CHECK_THROWS_AS(sys.gyromagnetic_of(0), SpecError);
}

TEST_CASE("index map keeps photons first") {
    const HybridSystem sys = build_system(test::bundled("fig1a"));
    CHECK(sys.index_map().labels() == std::vector<std::string>{"c", "d", "m", "n"});
    CHECK(sys.index_map().is_photon(1));
    CHECK_FALSE(sys.index_map().is_photon(2));
    CHECK_THROWS_AS(sys.index_map().at("x"), SpecError);
}

TEST_CASE("validation") {
    const SystemSpec good = test::bundled("fig1a");

    auto rejects = [](SystemSpec s, const char* fragment) {
        try {
            build_system(std::move(s));
            FAIL("accepted an invalid spec, expected: " << fragment);
        } catch (const SpecError& e) {
            CHECK_MESSAGE(std::string(e.what()).find(fragment) != std::string::npos, e.what());
        }
    };

    SystemSpec s = good;
    s.couplings.push_back({"c", "d", 10.0});
    rejects(s, "photon-photon coupling forbidden");

    s = good;
    s.couplings.push_back({"m", "m", 10.0});
    rejects(s, "itself");

    s = good;
    s.couplings.push_back({"c", "q", 10.0});
    rejects(s, "unknown mode 'q'");

    s = good;
    s.couplings.push_back({"m", "c", 5.0});
    rejects(s, "duplicate");

    s = good;
    s.couplings[0].strength_mhz = -1.0;
    rejects(s, ">= 0");

    s = good;
    s.photon_modes[0].linewidth_mhz = 0.0;
    rejects(s, "linewidth");

    s = good;
    s.magnon_modes[0].label = "c";
    rejects(s, "duplicate");

    s = good;
    s.magnon_modes[0].label = "bad label";
    rejects(s, "label");

    s = good;
    s.photon_modes.clear();
    s.couplings.clear();
    rejects(s, "photon");

    s = good;
    s.gyromagnetic_ghz_per_t = 0.0;
    rejects(s, "gyromagnetic");

    s = good;
    s.magnon_modes[0].diameter_mm = -1.0;
    rejects(s, "diameter");
}

TEST_CASE("a lone photon mode is rejected, two photons suffice") {
    SystemSpec s;
    s.photon_modes.push_back({"c", 10.0, 1.0, 1.0});
    CHECK_THROWS_AS(build_system(s), SpecError);
    s.photon_modes.push_back({"d", 11.0, 1.0, 0.0});
    CHECK_NOTHROW(build_system(s));
}

}
