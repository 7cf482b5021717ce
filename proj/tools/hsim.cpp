// hsim: command-line front end
//
// Exit codes: 0 success, 1 usage, 2 invalid spec or data, 3 numeric failure.

#include "hsim/calibration.hpp"
#include "hsim/csv_io.hpp"
#include "hsim/errors.hpp"
#include "hsim/model.hpp"
#include "hsim/modes.hpp"
#include "hsim/size_effects.hpp"
#include "hsim/spec_io.hpp"
#include "hsim/spectral.hpp"
#include "hsim/time_domain.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace hsim;

struct Range {
    double start = 0.0;
    double stop = 0.0;
    std::size_t count = 0;
};

double parse_double(std::string_view text, const std::string& what) {
    double v = 0.0;
    const char* b = text.data();
    const char* e = b + text.size();
    if (b != e && *b == '+') ++b;
    auto [p, ec] = std::from_chars(b, e, v);
    if (ec != std::errc() || p != e || text.empty()) throw CLI::ValidationError(what, "not a number: " + std::string(text));
    return v;
}

Range parse_range(const std::string& text, const std::string& what) {
    const auto c1 = text.find(':');
    const auto c2 = c1 == std::string::npos ? std::string::npos : text.find(':', c1 + 1);
    if (c2 == std::string::npos || text.find(':', c2 + 1) != std::string::npos) {
        throw CLI::ValidationError(what, "expected start:stop:count, got '" + text + "'");
    }
    Range r;
    r.start = parse_double(std::string_view(text).substr(0, c1), what);
    r.stop = parse_double(std::string_view(text).substr(c1 + 1, c2 - c1 - 1), what);
    const std::string count = text.substr(c2 + 1);
    std::size_t n = 0;
    auto [p, ec] = std::from_chars(count.data(), count.data() + count.size(), n);
    if (ec != std::errc() || p != count.data() + count.size() || n == 0) {
        throw CLI::ValidationError(what, "count must be a positive integer, got '" + count + "'");
    }
    if (n == 1 && r.start != r.stop) throw CLI::ValidationError(what, "a single point needs start == stop");
    r.count = n;
    return r;
}

std::vector<double> expand(const Range& r) { return linspace(r.start, r.stop, r.count); }

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

// Writes to `path`, or stdout when path is empty or "-".
template <class F>
void with_output(const std::string& path, F&& write) {
    if (path.empty() || path == "-") {
        write(std::cout);
        std::cout.flush();
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot open '" + path + "' for writing");
    write(out);
    if (!out) throw DataError("write failed for '" + path + "'");
}

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open '" + path + "'");
    return in;
}

Channel make_channel(const std::string& drive, const std::string& readout, bool total) {
    if (total) return Channel::total();
    return Channel::port(drive, readout);
}

std::string default_photon(const HybridSystem& system) { return system.index_map().label(0); }

std::string default_magnon(const HybridSystem& system) {
    if (system.magnon_count() == 0) throw SpecError("system has no magnon mode");
    return system.index_map().label(system.photon_count());
}

void write_plot_script(const std::string& script_path, const std::string& csv_path, const std::string& title) {
    with_output(script_path, [&](std::ostream& out) {
        out << "# gnuplot script; run: gnuplot " << script_path << "\n"
            << "set datafile separator ','\n"
            << "set terminal pngcairo size 1000,700\n"
            << "set output '" << csv_path << ".png'\n"
            << "set title '" << title << "'\n"
            << "set xlabel 'B (T)'\n"
            << "set ylabel 'frequency (GHz)'\n"
            << "set cblabel 'power (dB)'\n"
            << "set view map\n"
            << "set palette rgbformulae 33,13,10\n"
            << "splot '" << csv_path << "' every ::1 using 1:2:3 with points pointtype 5 pointsize 0.3 palette notitle\n";
    });
}

struct SweepArgs {
    std::string spec;
    std::string b;
    std::string f;
    std::string drive;
    std::string readout;
    bool total = false;
    std::string out;
    std::string emit_plot;
};

void add_sweep_options(CLI::App* cmd, SweepArgs& a) {
    cmd->add_option("--spec", a.spec, "system spec file")->required();
    cmd->add_option("--b", a.b, "field range start:stop:count (T)")->required();
    cmd->add_option("--f", a.f, "probe range start:stop:count (GHz)")->required();
    cmd->add_option("--drive", a.drive, "drive mode label (default: first photon mode)");
    cmd->add_option("--readout", a.readout, "readout photon label (default: drive)");
    cmd->add_flag("--total", a.total, "record the readout-weighted sum over photon modes");
    cmd->add_option("--out", a.out, "output CSV (default stdout)");
}

struct ResolvedSweep {
    SystemSpec spec;
    SweepGrid grid;
    Channel channel;
};

ResolvedSweep resolve_sweep(const SweepArgs& a) {
    const Range b = parse_range(a.b, "--b");
    const Range f = parse_range(a.f, "--f");
    ResolvedSweep r;
    r.spec = load_spec(a.spec);
    const HybridSystem system = build_system(r.spec);
    const std::string drive = a.drive.empty() ? default_photon(system) : a.drive;
    const std::string readout = a.readout.empty() ? drive : a.readout;
    r.channel = make_channel(drive, readout, a.total);
    r.grid = make_grid(expand(b), expand(f));
    return r;
}

int run_sweep(const SweepArgs& a) {
    const ResolvedSweep r = resolve_sweep(a);
    const SpectrumMap map = sweep(build_system(r.spec), r.grid, r.channel);
    with_output(a.out, [&](std::ostream& out) { write_spectrum_csv(out, map); });
    if (!a.emit_plot.empty()) {
        write_plot_script(a.emit_plot, a.out.empty() ? std::string("map.csv") : a.out, a.spec);
    }
    return 0;
}

struct ModesArgs {
    std::string spec;
    double b = 0.0;
    std::string photon;
    std::string magnon;
    double dark_threshold = 0.1;
};

int run_modes(const ModesArgs& a) {
    const SystemSpec spec = load_spec(a.spec);
    const HybridSystem system = build_system(spec);
    const HybridHamiltonian h = assemble_hamiltonian(system, a.b);
    const auto report = dark_mode_report(h, a.dark_threshold);
    std::cout << "# B = " << format_g9(a.b) << " T\n";
    std::cout << "index,freq_ghz,linewidth_mhz,photon_fraction,dark,dominant\n";
    for (std::size_t i = 0; i < report.size(); ++i) {
        const auto& m = report[i].mode;
        Eigen::Index dom = 0;
        m.vector.cwiseAbs2().maxCoeff(&dom);
        std::cout << i << ',' << format_g9(m.frequency_ghz) << ',' << format_g9(m.linewidth_mhz) << ','
                  << format_g9(m.photon_fraction) << ',' << (report[i].is_dark ? "yes" : "no") << ','
                  << system.index_map().label(static_cast<std::size_t>(dom)) << '\n';
    }
    if (system.magnon_count() > 0) {
        const std::string photon = a.photon.empty() ? default_photon(system) : a.photon;
        const std::string magnon = a.magnon.empty() ? default_magnon(system) : a.magnon;
        const RabiSplitting rs = rabi_splitting(system, photon, magnon);
        std::cout << "# rabi splitting " << photon << '-' << magnon << ": " << format_g9(rs.splitting_mhz)
                  << " MHz at B_fh = " << format_g9(rs.field_t) << " T (" << format_g9(rs.lower_ghz) << ", "
                  << format_g9(rs.upper_ghz) << " GHz)\n";
    }
    return 0;
}

struct BranchesArgs {
    std::string spec;
    std::string b;
    std::string out;
};

int run_branches(const BranchesArgs& a) {
    const Range b = parse_range(a.b, "--b");
    const HybridSystem system = build_system(load_spec(a.spec));
    const std::vector<double> fields = expand(b);
    const BranchSet set = track_branches(system, fields);
    with_output(a.out, [&](std::ostream& out) { write_branches_csv(out, set); });
    return 0;
}

struct FitArgs {
    std::string spec;
    std::string data;
    std::string free;
    std::uint64_t seed = 0;
    std::string objective = "db";
    std::string drive;
    std::string readout;
    bool total = false;
    int restarts = 5;
    int max_evaluations = 2000;
    std::string out;
};

int run_fit(const FitArgs& a) {
    FitProblem problem;
    problem.initial = load_spec(a.spec);
    const HybridSystem system = build_system(problem.initial);
    {
        std::ifstream in = open_input(a.data);
        problem.data = read_spectrum_csv(in, a.data);
    }
    for (const auto& path : split_list(a.free)) problem.free_parameters.push_back({path, std::nullopt});
    if (problem.free_parameters.empty()) throw CLI::ValidationError("--free", "no parameters given");
    problem.objective.space = a.objective == "peaks" ? ObjectiveSpace::peak_positions : ObjectiveSpace::db;
    const std::string drive = a.drive.empty() ? default_photon(system) : a.drive;
    const std::string readout = a.readout.empty() ? drive : a.readout;
    problem.objective.channel = make_channel(drive, readout, a.total);
    problem.options.seed = a.seed;
    problem.options.restarts = a.restarts;
    problem.options.max_evaluations = a.max_evaluations;
    const FitResult result = fit_parameters(problem);
    with_output(a.out, [&](std::ostream& out) { out << format_fit_result(result); });
    return 0;
}

struct EvolveArgs {
    std::string spec;
    double b = 0.0;
    std::string init;
    double t_span = 200.0;
    double step = 0.0;
    std::string out;
    std::string spectrum_out;
    std::string readout;
};

int run_evolve(const EvolveArgs& a) {
    const HybridSystem system = build_system(load_spec(a.spec));
    const HybridHamiltonian h = assemble_hamiltonian(system, a.b);
    const std::string init = a.init.empty() ? default_photon(system) : a.init;
    Eigen::VectorXcd w0 = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(system.dimension()));
    w0(static_cast<Eigen::Index>(system.index_map().at(init))) = 1.0;
    double step = a.step;
    if (step <= 0.0) {
        // One twentieth of the bound the integrator enforces, with margin.
        const double ref = default_reference(h);
        double bound = 0.0;
        for (Eigen::Index i = 0; i < h.entries.rows(); ++i) {
            double radius = std::abs(h.entries(i, i) - cplx(ref, 0.0));
            for (Eigen::Index j = 0; j < h.entries.cols(); ++j) {
                if (j != i) radius += std::abs(h.entries(i, j));
            }
            bound = std::max(bound, radius);
        }
        step = bound > 0.0 ? 1.0 / (40.0 * bound) : 0.01;
    }
    const Trajectory traj = evolve(h, w0, a.t_span, step);
    with_output(a.out, [&](std::ostream& out) { write_trajectory_csv(out, traj); });
    if (!a.spectrum_out.empty()) {
        const std::string readout = a.readout.empty() ? init : a.readout;
        const auto lines = ringdown_spectrum(traj, system.index_map().at(readout));
        with_output(a.spectrum_out, [&](std::ostream& out) {
            out << "freq_ghz,power\n";
            for (const auto& l : lines) out << format_g9(l.frequency_ghz) << ',' << format_g9(l.power) << '\n';
        });
    }
    return 0;
}

struct BandwidthArgs {
    std::string spec;
    std::string b;
    std::string drive;
    std::string readout;
    std::string out;
};

int run_bandwidth(const BandwidthArgs& a) {
    const Range b = parse_range(a.b, "--b");
    const HybridSystem system = build_system(load_spec(a.spec));
    const std::string drive = a.drive.empty() ? default_magnon(system) : a.drive;
    const std::string readout = a.readout.empty() ? default_photon(system) : a.readout;
    const std::vector<double> fields = expand(b);
    const TransductionBandwidth bw = transduction_bandwidth(system, drive, readout, fields);
    std::cout << "bandwidth_mhz=" << format_g9(bw.bandwidth_mhz) << '\n'
              << "field_min_t=" << format_g9(bw.field_min_t) << '\n'
              << "field_max_t=" << format_g9(bw.field_max_t) << '\n'
              << "peak_efficiency=" << format_g9(bw.peak_efficiency) << '\n';
    if (!a.out.empty()) {
        with_output(a.out, [&](std::ostream& out) {
            out << "b_tesla,efficiency,lower_branch_ghz\n";
            for (std::size_t i = 0; i < bw.field_t.size(); ++i) {
                out << format_g9(bw.field_t[i]) << ',' << format_g9(bw.efficiency[i]) << ','
                    << format_g9(bw.lower_branch_ghz[i]) << '\n';
            }
        });
    }
    return 0;
}

struct SizePredictArgs {
    double permittivity = 15.0;
    double magnetization = kYigSaturationMagnetizationMt;
    double frequency = 0.0;
    double b0 = 0.0;
    double gyromagnetic = kDefaultGyromagneticGhzPerT;
    std::string diameters;
};

int run_size_predict(const SizePredictArgs& a) {
    SizeEffectParams p;
    p.saturation_magnetization_mt = a.magnetization;
    p.relative_permittivity = a.permittivity;
    p.larmor_wavelength_mm = larmor_wavelength_mm(a.frequency);
    p.zero_diameter_offset_mt = a.b0;
    std::cout << "wavelength_mm=" << format_g9(p.larmor_wavelength_mm) << '\n'
              << "curvature_mt_per_mm2=" << format_g9(offset_curvature(p)) << '\n';
    const auto list = split_list(a.diameters);
    if (!list.empty()) {
        std::cout << "diameter_mm,offset_mt,b_fh_tesla\n";
        for (const auto& d : list) {
            const double phi = parse_double(d, "--diameters");
            if (phi < 0.0) throw DataError("diameter must be >= 0");
            std::cout << format_g9(phi) << ',' << format_g9(offset_field(phi, p)) << ','
                      << format_g9(predicted_b_fh(phi, a.frequency, a.gyromagnetic, p)) << '\n';
        }
    }
    return 0;
}

struct SizeFitArgs {
    std::string data;
    double frequency = 0.0;
    double gyromagnetic = kDefaultGyromagneticGhzPerT;
    double magnetization = kYigSaturationMagnetizationMt;
};

int run_size_fit(const SizeFitArgs& a) {
    std::ifstream in = open_input(a.data);
    const auto samples = read_diameter_csv(in, a.data);
    const SizeEffectFit fit = fit_size_effect(samples, a.frequency, a.gyromagnetic, a.magnetization);
    std::cout << "curvature_mt_per_mm2=" << format_g9(fit.curvature_mt_per_mm2) << '\n'
              << "curvature_sigma=" << format_g9(fit.curvature_sigma) << '\n'
              << "zero_diameter_offset_mt=" << format_g9(fit.zero_diameter_offset_mt) << '\n'
              << "offset_sigma=" << format_g9(fit.offset_sigma) << '\n'
              << "relative_permittivity=" << format_g9(fit.relative_permittivity) << '\n'
              << "permittivity_sigma=" << format_g9(fit.permittivity_sigma) << '\n'
              << "residual_rms_t=" << format_g9(fit.residual_rms_t) << '\n'
              << "weighted=" << (fit.weighted ? "true" : "false") << '\n';
    return 0;
}

struct SynthArgs {
    SweepArgs sweep;
    double noise = 0.0;
    std::uint64_t seed = 0;
};

int run_synth(const SynthArgs& a) {
    const ResolvedSweep r = resolve_sweep(a.sweep);
    const SpectrumMap map = synthesize_dataset(r.spec, r.grid, r.channel, a.noise, a.seed);
    with_output(a.sweep.out, [&](std::ostream& out) { write_spectrum_csv(out, map); });
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"photon-magnon hybrid system simulator"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "hsim 1.0");

    SweepArgs sweep_args;
    auto* sweep_cmd = app.add_subcommand("sweep", "transmission map over a field x probe grid");
    add_sweep_options(sweep_cmd, sweep_args);
    sweep_cmd->add_option("--emit-plot", sweep_args.emit_plot, "write a gnuplot script for the map");

    ModesArgs modes_args;
    auto* modes_cmd = app.add_subcommand("modes", "eigenmode table at one field");
    modes_cmd->add_option("--spec", modes_args.spec, "system spec file")->required();
    modes_cmd->add_option("--b", modes_args.b, "static field (T)")->required();
    modes_cmd->add_option("--photon", modes_args.photon, "photon mode for the splitting line");
    modes_cmd->add_option("--magnon", modes_args.magnon, "magnon mode for the splitting line");
    modes_cmd->add_option("--dark-threshold", modes_args.dark_threshold, "photon fraction below which a mode is dark")
        ->check(CLI::Range(0.0, 1.0));

    BranchesArgs branches_args;
    auto* branches_cmd = app.add_subcommand("branches", "track eigenmode branches over a field range");
    branches_cmd->add_option("--spec", branches_args.spec, "system spec file")->required();
    branches_cmd->add_option("--b", branches_args.b, "field range start:stop:count (T)")->required();
    branches_cmd->add_option("--out", branches_args.out, "output CSV (default stdout)");

    FitArgs fit_args;
    auto* fit_cmd = app.add_subcommand("fit", "fit spec parameters to a measured map");
    fit_cmd->add_option("--spec", fit_args.spec, "initial spec file")->required();
    fit_cmd->add_option("--data", fit_args.data, "spectrum CSV")->required();
    fit_cmd->add_option("--free", fit_args.free, "comma-separated parameter paths")->required();
    fit_cmd->add_option("--seed", fit_args.seed, "restart jitter seed");
    fit_cmd->add_option("--objective", fit_args.objective, "db or peaks")
        ->check(CLI::IsMember({"db", "peaks"}));
    fit_cmd->add_option("--drive", fit_args.drive, "drive mode label");
    fit_cmd->add_option("--readout", fit_args.readout, "readout photon label");
    fit_cmd->add_flag("--total", fit_args.total, "model the readout-weighted sum");
    fit_cmd->add_option("--restarts", fit_args.restarts, "number of restarts")->check(CLI::PositiveNumber);
    fit_cmd->add_option("--max-evals", fit_args.max_evaluations, "evaluations per restart")
        ->check(CLI::PositiveNumber);
    fit_cmd->add_option("--out", fit_args.out, "fit result file (default stdout)");

    EvolveArgs evolve_args;
    auto* evolve_cmd = app.add_subcommand("evolve", "free ringdown from a single excited mode");
    evolve_cmd->add_option("--spec", evolve_args.spec, "system spec file")->required();
    evolve_cmd->add_option("--b", evolve_args.b, "static field (T)")->required();
    evolve_cmd->add_option("--init", evolve_args.init, "initially excited mode (default: first photon mode)");
    evolve_cmd->add_option("--t-span", evolve_args.t_span, "duration (ns)")->check(CLI::PositiveNumber);
    evolve_cmd->add_option("--step", evolve_args.step, "time step (ns); automatic when omitted");
    evolve_cmd->add_option("--out", evolve_args.out, "trajectory CSV (default stdout)");
    evolve_cmd->add_option("--spectrum-out", evolve_args.spectrum_out, "ringdown spectrum CSV");
    evolve_cmd->add_option("--readout", evolve_args.readout, "mode analysed by the spectrum (default: --init)");

    BandwidthArgs bw_args;
    auto* bw_cmd = app.add_subcommand("bandwidth", "magnon-to-photon transduction bandwidth");
    bw_cmd->add_option("--spec", bw_args.spec, "system spec file")->required();
    bw_cmd->add_option("--b", bw_args.b, "field range start:stop:count (T)")->required();
    bw_cmd->add_option("--drive", bw_args.drive, "drive magnon (default: first magnon)");
    bw_cmd->add_option("--readout", bw_args.readout, "readout photon (default: first photon)");
    bw_cmd->add_option("--out", bw_args.out, "efficiency CSV");

    auto* size_cmd = app.add_subcommand("size-effect", "diameter-dependent resonance offset");
    size_cmd->require_subcommand(1);
    SizePredictArgs predict_args;
    auto* predict_cmd = size_cmd->add_subcommand("predict", "forward model");
    predict_cmd->add_option("--freq", predict_args.frequency, "cavity frequency (GHz)")->required()
        ->check(CLI::PositiveNumber);
    predict_cmd->add_option("--eps", predict_args.permittivity, "relative permittivity");
    predict_cmd->add_option("--m0", predict_args.magnetization, "saturation magnetization (mT)");
    predict_cmd->add_option("--b0", predict_args.b0, "zero-diameter offset (mT)");
    predict_cmd->add_option("--gamma", predict_args.gyromagnetic, "gyromagnetic ratio (GHz/T)");
    predict_cmd->add_option("--diameters", predict_args.diameters, "comma-separated diameters (mm)");
    SizeFitArgs size_fit_args;
    auto* size_fit_cmd = size_cmd->add_subcommand("fit", "fit curvature and offset to diameter data");
    size_fit_cmd->add_option("--data", size_fit_args.data, "diameter CSV")->required();
    size_fit_cmd->add_option("--freq", size_fit_args.frequency, "cavity frequency (GHz)")->required()
        ->check(CLI::PositiveNumber);
    size_fit_cmd->add_option("--gamma", size_fit_args.gyromagnetic, "gyromagnetic ratio (GHz/T)");
    size_fit_cmd->add_option("--m0", size_fit_args.magnetization, "saturation magnetization (mT)");

    SynthArgs synth_args;
    auto* synth_cmd = app.add_subcommand("synth", "synthetic noisy map");
    add_sweep_options(synth_cmd, synth_args.sweep);
    synth_cmd->add_option("--noise", synth_args.noise, "noise sigma as a fraction of the map maximum")
        ->check(CLI::NonNegativeNumber);
    synth_cmd->add_option("--seed", synth_args.seed, "noise seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*sweep_cmd) return run_sweep(sweep_args);
        if (*modes_cmd) return run_modes(modes_args);
        if (*branches_cmd) return run_branches(branches_args);
        if (*fit_cmd) return run_fit(fit_args);
        if (*evolve_cmd) return run_evolve(evolve_args);
        if (*bw_cmd) return run_bandwidth(bw_args);
        if (*predict_cmd) return run_size_predict(predict_args);
        if (*size_fit_cmd) return run_size_fit(size_fit_args);
        if (*synth_cmd) return run_synth(synth_args);
    } catch (const CLI::ValidationError& e) {
        std::cerr << "hsim: " << e.what() << '\n';
        return 1;
    } catch (const SpecError& e) {
        std::cerr << "hsim: " << e.what() << '\n';
        return 2;
    } catch (const DataError& e) {
        std::cerr << "hsim: " << e.what() << '\n';
        return 2;
    } catch (const NumericError& e) {
        std::cerr << "hsim: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "hsim: " << e.what() << '\n';
        return 3;
    }
    return 1;
}
