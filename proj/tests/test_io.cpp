#include "support.hpp"

#include "hsim/csv_io.hpp"
#include "hsim/errors.hpp"
#include "hsim/spec_io.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <limits>
#include <random>
#include <sstream>

using namespace hsim;

namespace {

void check_spec_error(std::string_view text, const char* fragment) {
    try {
        parse_spec(text, "t.spec");
        FAIL("accepted: " << text);
    } catch (const SpecError& e) {
        CHECK_MESSAGE(std::string(e.what()).find(fragment) != std::string::npos, e.what());
    }
}

} // namespace

TEST_SUITE("io") {

TEST_CASE("bundled specs load and round-trip") {
    for (const char* name : {"fig1a", "fig1b", "fig1c", "fig1d", "ten_spheres_roomT", "ten_spheres_90mK",
                             "single_sphere_14GHz"}) {
        const SystemSpec spec = test::bundled(name);
        CHECK_NOTHROW(build_system(spec));
        CHECK(parse_spec(format_spec(spec)) == spec);
    }
}

TEST_CASE("fig1a content") {
    const SystemSpec s = test::bundled("fig1a");
    REQUIRE(s.photon_modes.size() == 2);
    CHECK(s.photon_modes[0].label == "c");
    CHECK(s.photon_modes[0].frequency_ghz == 10.65);
    CHECK(s.photon_modes[1].readout_weight == 0.0);
    REQUIRE(s.couplings.size() == 1);
    CHECK(s.couplings[0].strength_mhz == 90.0);
}

TEST_CASE("random specs round-trip exactly") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(0.001, 50.0);
    for (int trial = 0; trial < 50; ++trial) {
        SystemSpec s;
        s.gyromagnetic_ghz_per_t = u(rng);
        s.photon_modes.push_back({"p0", u(rng), u(rng), u(rng)});
        s.photon_modes.push_back({"p1", u(rng), u(rng), 0.0});
        s.magnon_modes.push_back({"k0", -u(rng), u(rng), u(rng), std::nullopt});
        s.magnon_modes.push_back({"k1", u(rng), u(rng), std::nullopt, u(rng)});
        s.couplings.push_back({"p0", "k0", u(rng)});
        s.couplings.push_back({"k1", "k0", u(rng)});
        const std::string text = format_spec(s);
        CHECK(parse_spec(text) == s);
        CHECK(format_spec(parse_spec(text)) == text);
    }
}

TEST_CASE("strict parsing diagnostics") {
    check_spec_error("[photon_modes]\nlabel=c frequnecy_ghz=10 linewidth_mhz=1\n", "t.spec:2: unknown key 'frequnecy_ghz'");
    check_spec_error("[extras]\n", "unknown section");
    check_spec_error("[photon_modes]\nlabel=c frequency_ghz=ten linewidth_mhz=1\n", "t.spec:2");
    check_spec_error(
        "[photon_modes]\nlabel=c frequency_ghz=10 linewidth_mhz=1\nlabel=d frequency_ghz=11 linewidth_mhz=1\n"
        "[couplings]\na=c b=d g_mhz=5\n",
        "photon-photon coupling forbidden");
    check_spec_error("label=c\n", "t.spec:1");
    check_spec_error("[photon_modes]\nlabel=c frequency_ghz=10 frequency_ghz=11 linewidth_mhz=1\n", "t.spec:2");
    check_spec_error("[photon_modes]\nlabel=c linewidth_mhz=1\n", "frequency_ghz");
}

TEST_CASE("comments, blank lines and fit sections are ignored") {
    const std::string text =
        "# header\n\n[photon_modes]\nlabel=c frequency_ghz=10 linewidth_mhz=1   # trailing\n"
        "[magnon_modes]\nlabel=m field_offset_mt=0 linewidth_mhz=2\n"
        "[couplings]\na=c b=m g_mhz=5\n[diagnostics]\nobjective=0.1\n[parameters]\nanything goes here\n";
    const SystemSpec s = parse_spec(text);
    CHECK(s.magnon_modes.size() == 1);
    CHECK(s.couplings[0].strength_mhz == 5.0);
}

TEST_CASE("load_spec reports unreadable files") {
    CHECK_THROWS_AS(load_spec("/nonexistent/x.spec"), SpecError);
}

TEST_CASE("number formatting is shortest round-trip") {
    CHECK(format_number(10.65) == "10.65");
    CHECK(format_number(90.0) == "90");
    CHECK(format_number(0.1 + 0.2) == "0.30000000000000004");
    CHECK(format_g9(0.380357142857) == "0.380357143");
}

TEST_CASE("spectrum CSV round-trip") {
    const HybridSystem sys = build_system(test::bundled("fig1a"));
    const SpectrumMap map = sweep(sys, make_grid(linspace(0.37, 0.39, 4), linspace(10.5, 10.8, 5)),
                                  Channel::port("c", "c"));
    std::stringstream ss;
    write_spectrum_csv(ss, map);
    const std::string text = ss.str();
    CHECK(text.rfind("b_tesla,freq_ghz,power_db\n", 0) == 0);
    const SpectrumMap back = read_spectrum_csv(ss);
    CHECK(back.scale == PowerScale::db_relative);
    REQUIRE(back.grid.field_count() == 4);
    REQUIRE(back.grid.probe_count() == 5);
    const SpectrumMap db = to_db(map);
    for (std::size_t i = 0; i < db.power.size(); ++i) {
        CHECK(back.power[i] == doctest::Approx(db.power[i]).epsilon(1e-8));
    }
    std::stringstream again;
    write_spectrum_csv(again, back);
    CHECK(again.str() == text);
}

TEST_CASE("spectrum CSV rejects incomplete grids") {
    std::istringstream missing("b_tesla,freq_ghz,power_db\n0.1,1,0\n0.1,2,-1\n0.2,1,-2\n");
    CHECK_THROWS_AS(read_spectrum_csv(missing), DataError);
    std::istringstream shifted("b_tesla,freq_ghz,power_db\n0.1,1,0\n0.1,2,-1\n0.2,1,-2\n0.2,3,-2\n");
    CHECK_THROWS_AS(read_spectrum_csv(shifted), DataError);
    std::istringstream header("b,f,p\n0.1,1,0\n");
    CHECK_THROWS_AS(read_spectrum_csv(header), DataError);
    std::istringstream bad_number("b_tesla,freq_ghz,power_db\n0.1,x,0\n");
    CHECK_THROWS_AS(read_spectrum_csv(bad_number), DataError);
}

TEST_CASE("branch and trajectory CSV headers") {
    const HybridSystem sys = build_system(test::bundled("fig1a"));
    const std::vector<double> fields{0.37, 0.38};
    std::stringstream b;
    write_branches_csv(b, track_branches(sys, fields));
    std::string line;
    std::getline(b, line);
    CHECK(line == "b_tesla,branch_id,freq_ghz,linewidth_mhz,photon_fraction");
    int rows = 0;
    while (std::getline(b, line)) ++rows;
    CHECK(rows == 8);

    Eigen::VectorXcd w0 = Eigen::VectorXcd::Zero(4);
    w0(0) = 1.0;
    std::stringstream t;
    write_trajectory_csv(t, evolve(assemble_hamiltonian(sys, 0.38), w0, 0.1, 0.01));
    std::getline(t, line);
    CHECK(line == "t_ns,mode_label,re,im");
    std::getline(t, line);
    CHECK(line == "0,c,1,0");
}

TEST_CASE("diameter CSV") {
    std::istringstream plain("diameter_mm,b_fh_tesla\n0.5,0.51\n1,0.52\n");
    const auto a = read_diameter_csv(plain);
    REQUIRE(a.size() == 2);
    CHECK_FALSE(a[0].sigma_t.has_value());
    std::istringstream with_sigma("diameter_mm,b_fh_tesla,sigma_tesla\n0.5,0.51,0.003\n");
    const auto b = read_diameter_csv(with_sigma);
    CHECK(b[0].sigma_t.value() == 0.003);
    std::stringstream out;
    write_diameter_csv(out, b);
    CHECK(out.str() == "diameter_mm,b_fh_tesla,sigma_tesla\n0.5,0.51,0.003\n");
    std::istringstream bad("diameter_mm,b_fh_tesla\n0.5\n");
    CHECK_THROWS_AS(read_diameter_csv(bad), DataError);
}

}
