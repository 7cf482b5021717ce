#include "hsim/spec_io.hpp"

#include "hsim/errors.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace hsim {

namespace {

enum class Section { none, constants, photon, magnon, coupling, skipped };

struct Context {
    std::string_view source;
    std::size_t line = 0;

    [[noreturn]] void fail(const std::string& message) const {
        throw SpecError(std::string(source) + ":" + std::to_string(line) + ": " + message);
    }
};

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

double parse_number(std::string_view text, std::string_view key, const Context& ctx) {
    double value = 0.0;
    const char* begin = text.data();
    const char* end = text.data() + text.size();
    if (!text.empty() && *begin == '+') ++begin;
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr != end || !std::isfinite(value)) {
        ctx.fail("key '" + std::string(key) + "': '" + std::string(text) + "' is not a finite number");
    }
    return value;
}

using Fields = std::map<std::string, std::string, std::less<>>;

Fields tokenize(std::string_view line, const Context& ctx) {
    Fields fields;
    std::size_t pos = 0;
    while (pos < line.size()) {
        while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\t')) ++pos;
        if (pos >= line.size()) break;
        std::size_t end = pos;
        while (end < line.size() && line[end] != ' ' && line[end] != '\t') ++end;
        const std::string_view token = line.substr(pos, end - pos);
        const auto eq = token.find('=');
        if (eq == std::string_view::npos || eq == 0 || eq + 1 == token.size()) {
            ctx.fail("expected key=value, got '" + std::string(token) + "'");
        }
        std::string key(token.substr(0, eq));
        if (!fields.emplace(key, std::string(token.substr(eq + 1))).second) {
            ctx.fail("duplicate key '" + key + "'");
        }
        pos = end;
    }
    return fields;
}

template <std::size_t N>
void check_keys(const Fields& fields, const std::array<std::string_view, N>& allowed, std::string_view section,
                const Context& ctx) {
    for (const auto& [key, value] : fields) {
        bool known = false;
        for (auto a : allowed) known = known || key == a;
        if (!known) ctx.fail("unknown key '" + key + "' in [" + std::string(section) + "]");
    }
}

const std::string& required(const Fields& fields, std::string_view key, std::string_view section, const Context& ctx) {
    auto it = fields.find(key);
    if (it == fields.end()) ctx.fail("[" + std::string(section) + "] entry is missing '" + std::string(key) + "'");
    return it->second;
}

std::optional<double> optional_number(const Fields& fields, std::string_view key, const Context& ctx) {
    auto it = fields.find(key);
    if (it == fields.end()) return std::nullopt;
    return parse_number(it->second, key, ctx);
}

} // namespace

std::string format_number(double value) {
    std::array<char, 64> buf{};
    const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    if (ec != std::errc()) throw std::runtime_error("format_number failed");
    return std::string(buf.data(), ptr);
}

SystemSpec parse_spec(std::string_view text, std::string_view source) {
    SystemSpec spec;
    Context ctx{source, 0};
    Section section = Section::none;
    bool gyromagnetic_seen = false;

    std::size_t start = 0;
    while (start <= text.size()) {
        const std::size_t nl = text.find('\n', start);
        std::string_view raw = text.substr(start, nl == std::string_view::npos ? std::string_view::npos : nl - start);
        ++ctx.line;
        start = nl == std::string_view::npos ? text.size() + 1 : nl + 1;

        if (const auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
        const std::string_view line = trim(raw);
        if (line.empty()) continue;

        if (line.front() == '[') {
            if (line.back() != ']') ctx.fail("malformed section header '" + std::string(line) + "'");
            const std::string_view name = trim(line.substr(1, line.size() - 2));
            if (name == "constants") section = Section::constants;
            else if (name == "photon_modes") section = Section::photon;
            else if (name == "magnon_modes") section = Section::magnon;
            else if (name == "couplings") section = Section::coupling;
            else if (name == "diagnostics" || name == "parameters") section = Section::skipped;
            else ctx.fail("unknown section [" + std::string(name) + "]");
            continue;
        }

        switch (section) {
        case Section::none:
            ctx.fail("entry outside of any section");
        case Section::skipped:
            break;
        case Section::constants: {
            const Fields f = tokenize(line, ctx);
            check_keys(f, std::array<std::string_view, 1>{"gyromagnetic_ghz_per_t"}, "constants", ctx);
            if (gyromagnetic_seen) ctx.fail("gyromagnetic_ghz_per_t given twice");
            gyromagnetic_seen = true;
            spec.gyromagnetic_ghz_per_t = parse_number(f.begin()->second, f.begin()->first, ctx);
            break;
        }
        case Section::photon: {
            const Fields f = tokenize(line, ctx);
            check_keys(f, std::array<std::string_view, 4>{"label", "frequency_ghz", "linewidth_mhz", "readout_weight"},
                       "photon_modes", ctx);
            PhotonModeSpec p;
            p.label = required(f, "label", "photon_modes", ctx);
            p.frequency_ghz = parse_number(required(f, "frequency_ghz", "photon_modes", ctx), "frequency_ghz", ctx);
            p.linewidth_mhz = parse_number(required(f, "linewidth_mhz", "photon_modes", ctx), "linewidth_mhz", ctx);
            p.readout_weight = optional_number(f, "readout_weight", ctx).value_or(1.0);
            spec.photon_modes.push_back(std::move(p));
            break;
        }
        case Section::magnon: {
            const Fields f = tokenize(line, ctx);
            check_keys(f,
                       std::array<std::string_view, 5>{"label", "field_offset_mt", "linewidth_mhz", "diameter_mm",
                                                       "gyromagnetic_override_ghz_per_t"},
                       "magnon_modes", ctx);
            MagnonModeSpec m;
            m.label = required(f, "label", "magnon_modes", ctx);
            m.field_offset_mt = optional_number(f, "field_offset_mt", ctx).value_or(0.0);
            m.linewidth_mhz = parse_number(required(f, "linewidth_mhz", "magnon_modes", ctx), "linewidth_mhz", ctx);
            m.diameter_mm = optional_number(f, "diameter_mm", ctx);
            m.gyromagnetic_override_ghz_per_t = optional_number(f, "gyromagnetic_override_ghz_per_t", ctx);
            spec.magnon_modes.push_back(std::move(m));
            break;
        }
        case Section::coupling: {
            const Fields f = tokenize(line, ctx);
            check_keys(f, std::array<std::string_view, 3>{"a", "b", "g_mhz"}, "couplings", ctx);
            CouplingSpec c;
            c.mode_a = required(f, "a", "couplings", ctx);
            c.mode_b = required(f, "b", "couplings", ctx);
            c.strength_mhz = parse_number(required(f, "g_mhz", "couplings", ctx), "g_mhz", ctx);
            spec.couplings.push_back(std::move(c));
            break;
        }
        }
    }

    try {
        build_system(spec);
    } catch (const SpecError& e) {
        throw SpecError(std::string(source) + ": " + e.what());
    }
    return spec;
}

SystemSpec load_spec(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw SpecError("cannot open spec file '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_spec(buf.str(), path.string());
}

std::string format_spec(const SystemSpec& spec) {
    std::ostringstream os;
    os << "[constants]\n";
    os << "gyromagnetic_ghz_per_t=" << format_number(spec.gyromagnetic_ghz_per_t) << "\n\n";
    os << "[photon_modes]\n";
    for (const auto& p : spec.photon_modes) {
        os << "label=" << p.label << " frequency_ghz=" << format_number(p.frequency_ghz)
           << " linewidth_mhz=" << format_number(p.linewidth_mhz)
           << " readout_weight=" << format_number(p.readout_weight) << "\n";
    }
    os << "\n[magnon_modes]\n";
    for (const auto& m : spec.magnon_modes) {
        os << "label=" << m.label << " field_offset_mt=" << format_number(m.field_offset_mt)
           << " linewidth_mhz=" << format_number(m.linewidth_mhz);
        if (m.diameter_mm) os << " diameter_mm=" << format_number(*m.diameter_mm);
        if (m.gyromagnetic_override_ghz_per_t) {
            os << " gyromagnetic_override_ghz_per_t=" << format_number(*m.gyromagnetic_override_ghz_per_t);
        }
        os << "\n";
    }
    os << "\n[couplings]\n";
    for (const auto& c : spec.couplings) {
        os << "a=" << c.mode_a << " b=" << c.mode_b << " g_mhz=" << format_number(c.strength_mhz) << "\n";
    }
    return os.str();
}

void save_spec(const std::filesystem::path& path, const SystemSpec& spec) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw SpecError("cannot write spec file '" + path.string() + "'");
    out << format_spec(spec);
}

std::string format_fit_result(const FitResult& result) {
    std::ostringstream os;
    os << format_spec(result.fitted_spec);
    os << "\n[diagnostics]\n";
    os << "objective=" << format_number(result.objective) << "\n";
    os << "iterations=" << result.iterations << "\n";
    os << "evaluations=" << result.evaluations << "\n";
    os << "best_restart=" << result.best_restart << "\n";
    os << "converged=" << (result.converged ? "true" : "false") << "\n";
    os << "\n[parameters]\n";
    for (const auto& c : result.changes) {
        os << "path=" << c.path << " initial=" << format_number(c.initial) << " fitted=" << format_number(c.fitted)
           << " change=" << format_number(c.fitted - c.initial) << " lower=" << format_number(c.bounds.lower)
           << " upper=" << format_number(c.bounds.upper) << "\n";
    }
    return os.str();
}

} // namespace hsim
