#include "hsim/csv_io.hpp"

#include "hsim/errors.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>

namespace hsim {

namespace {

std::vector<std::string_view> split_commas(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(',', start);
        out.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

std::string_view strip_cr(std::string_view s) {
    while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) s.remove_suffix(1);
    while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
    return s;
}

double parse_cell(std::string_view cell, std::string_view source, std::size_t line) {
    cell = strip_cr(cell);
    double value = 0.0;
    const char* begin = cell.data();
    const char* end = begin + cell.size();
    if (begin != end && *begin == '+') ++begin;
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr != end || cell.empty()) {
        throw DataError(std::string(source) + ":" + std::to_string(line) + ": '" + std::string(cell) +
                        "' is not a number");
    }
    return value;
}

void expect_header(std::istream& in, std::string_view expected, std::string_view alternative, std::string_view source,
                   std::string& header) {
    if (!std::getline(in, header)) throw DataError(std::string(source) + ": empty file");
    const std::string_view h = strip_cr(header);
    if (h != expected && (alternative.empty() || h != alternative)) {
        throw DataError(std::string(source) + ":1: expected header '" + std::string(expected) + "'");
    }
}

} // namespace

std::string format_g9(double value) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9g", value);
    return buf;
}

void write_spectrum_csv(std::ostream& out, const SpectrumMap& map) {
    const SpectrumMap db = to_db(map);
    out << "b_tesla,freq_ghz,power_db\n";
    for (std::size_t i = 0; i < db.grid.field_count(); ++i) {
        const std::string b = format_g9(db.grid.field_t[i]);
        for (std::size_t j = 0; j < db.grid.probe_count(); ++j) {
            out << b << ',' << format_g9(db.grid.probe_ghz[j]) << ',' << format_g9(db.at(i, j)) << '\n';
        }
    }
}

SpectrumMap read_spectrum_csv(std::istream& in, std::string_view source) {
    std::string line;
    expect_header(in, "b_tesla,freq_ghz,power_db", {}, source, line);
    std::vector<double> fields, probes, power;
    std::size_t lineno = 1;
    std::size_t column = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (strip_cr(line).empty()) continue;
        const auto cells = split_commas(line);
        if (cells.size() != 3) {
            throw DataError(std::string(source) + ":" + std::to_string(lineno) + ": expected 3 columns");
        }
        const double b = parse_cell(cells[0], source, lineno);
        const double f = parse_cell(cells[1], source, lineno);
        const double p = parse_cell(cells[2], source, lineno);
        if (fields.empty() || b != fields.back()) {
            if (!fields.empty() && column != probes.size()) {
                throw DataError(std::string(source) + ":" + std::to_string(lineno) + ": incomplete frequency row");
            }
            fields.push_back(b);
            column = 0;
        }
        if (fields.size() == 1) {
            probes.push_back(f);
        } else if (column >= probes.size() || probes[column] != f) {
            throw DataError(std::string(source) + ":" + std::to_string(lineno) +
                            ": frequency axis differs from the first field row");
        }
        ++column;
        power.push_back(p);
    }
    if (fields.empty()) throw DataError(std::string(source) + ": no data rows");
    if (column != probes.size()) throw DataError(std::string(source) + ": incomplete final frequency row");

    SpectrumMap map;
    map.grid = make_grid(std::move(fields), std::move(probes));
    map.power = std::move(power);
    map.scale = PowerScale::db_relative;
    return map;
}

void write_branches_csv(std::ostream& out, const BranchSet& branches) {
    out << "b_tesla,branch_id,freq_ghz,linewidth_mhz,photon_fraction\n";
    for (std::size_t i = 0; i < branches.field_t.size(); ++i) {
        for (std::size_t b = 0; b < branches.branches.size(); ++b) {
            const auto& m = branches.branches[b][i];
            out << format_g9(branches.field_t[i]) << ',' << b << ',' << format_g9(m.frequency_ghz) << ','
                << format_g9(m.linewidth_mhz) << ',' << format_g9(m.photon_fraction) << '\n';
        }
    }
}

void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory) {
    out << "t_ns,mode_label,re,im\n";
    const auto modes = trajectory.amplitudes.cols();
    for (std::size_t s = 0; s < trajectory.times_ns.size(); ++s) {
        const std::string t = format_g9(trajectory.times_ns[s]);
        for (Eigen::Index k = 0; k < modes; ++k) {
            const cplx a = trajectory.amplitudes(static_cast<Eigen::Index>(s), k);
            out << t << ',' << trajectory.index_map->label(static_cast<std::size_t>(k)) << ',' << format_g9(a.real())
                << ',' << format_g9(a.imag()) << '\n';
        }
    }
}

std::vector<DiameterFieldSample> read_diameter_csv(std::istream& in, std::string_view source) {
    std::string line;
    expect_header(in, "diameter_mm,b_fh_tesla", "diameter_mm,b_fh_tesla,sigma_tesla", source, line);
    const bool with_sigma = strip_cr(line) == "diameter_mm,b_fh_tesla,sigma_tesla";
    std::vector<DiameterFieldSample> out;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (strip_cr(line).empty()) continue;
        const auto cells = split_commas(line);
        if (cells.size() != (with_sigma ? 3u : 2u)) {
            throw DataError(std::string(source) + ":" + std::to_string(lineno) + ": wrong column count");
        }
        DiameterFieldSample s;
        s.diameter_mm = parse_cell(cells[0], source, lineno);
        s.b_fh_t = parse_cell(cells[1], source, lineno);
        if (with_sigma) s.sigma_t = parse_cell(cells[2], source, lineno);
        if (!(s.diameter_mm > 0.0)) {
            throw DataError(std::string(source) + ":" + std::to_string(lineno) + ": diameter must be > 0");
        }
        out.push_back(s);
    }
    return out;
}

void write_diameter_csv(std::ostream& out, const std::vector<DiameterFieldSample>& samples) {
    const bool with_sigma = !samples.empty() && samples.front().sigma_t.has_value();
    out << (with_sigma ? "diameter_mm,b_fh_tesla,sigma_tesla\n" : "diameter_mm,b_fh_tesla\n");
    for (const auto& s : samples) {
        out << format_g9(s.diameter_mm) << ',' << format_g9(s.b_fh_t);
        if (with_sigma) out << ',' << format_g9(s.sigma_t.value_or(0.0));
        out << '\n';
    }
}

} // namespace hsim
