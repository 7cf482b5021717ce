#include "hsim/size_effects.hpp"

#include "hsim/errors.hpp"
#include "hsim/model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace hsim {

namespace {

double curvature_prefactor(double larmor_wavelength_mm, double saturation_magnetization_mt) {
    const double pi2 = std::numbers::pi * std::numbers::pi;
    return 2.0 * pi2 * saturation_magnetization_mt / (45.0 * larmor_wavelength_mm * larmor_wavelength_mm);
}

} // namespace

double larmor_wavelength_mm(double frequency_ghz) {
    if (!(frequency_ghz > 0.0)) throw SpecError("wavelength: frequency must be > 0");
    return kSpeedOfLightMmGhz / frequency_ghz;
}

double offset_curvature(const SizeEffectParams& params) {
    if (!(params.saturation_magnetization_mt > 0.0)) throw SpecError("saturation magnetization must be > 0");
    if (!(params.relative_permittivity > 1.0)) throw SpecError("relative permittivity must be > 1");
    if (!(params.larmor_wavelength_mm > 0.0)) throw SpecError("Larmor wavelength must be > 0");
    return curvature_prefactor(params.larmor_wavelength_mm, params.saturation_magnetization_mt) *
           (5.0 + params.relative_permittivity);
}

double permittivity_from_curvature(double curvature_mt_per_mm2, double larmor_wavelength_mm,
                                   double saturation_magnetization_mt) {
    if (!(larmor_wavelength_mm > 0.0) || !(saturation_magnetization_mt > 0.0)) {
        throw SpecError("permittivity extraction needs positive wavelength and magnetization");
    }
    return curvature_mt_per_mm2 / curvature_prefactor(larmor_wavelength_mm, saturation_magnetization_mt) - 5.0;
}

double offset_field(double diameter_mm, const SizeEffectParams& params) {
    if (!(diameter_mm >= 0.0)) throw SpecError("diameter must be >= 0");
    return -offset_curvature(params) * diameter_mm * diameter_mm + params.zero_diameter_offset_mt;
}

double predicted_b_fh(double diameter_mm, double cavity_frequency_ghz, double gyromagnetic_ghz_per_t,
                      const SizeEffectParams& params) {
    if (!(gyromagnetic_ghz_per_t > 0.0)) throw SpecError("gyromagnetic ratio must be > 0");
    return cavity_frequency_ghz / gyromagnetic_ghz_per_t - 1e-3 * offset_field(diameter_mm, params);
}

SizeEffectFit fit_size_effect(std::span<const DiameterFieldSample> samples, double cavity_frequency_ghz,
                              double gyromagnetic_ghz_per_t, double saturation_magnetization_mt) {
    if (samples.size() < 3) throw DataError("size-effect fit needs at least 3 samples");
    if (!(gyromagnetic_ghz_per_t > 0.0)) throw SpecError("gyromagnetic ratio must be > 0");
    const bool weighted = std::all_of(samples.begin(), samples.end(), [](const auto& s) { return s.sigma_t.has_value(); });
    const bool any_sigma = std::any_of(samples.begin(), samples.end(), [](const auto& s) { return s.sigma_t.has_value(); });
    if (any_sigma && !weighted) throw DataError("size-effect fit: either every sample or none carries an uncertainty");

    double s = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& p : samples) {
        if (!(p.diameter_mm > 0.0)) throw DataError("size-effect fit: diameters must be > 0");
        if (weighted && !(*p.sigma_t > 0.0)) throw DataError("size-effect fit: uncertainties must be > 0");
        const double w = weighted ? 1.0 / (*p.sigma_t * *p.sigma_t) : 1.0;
        const double x = p.diameter_mm * p.diameter_mm;
        s += w;
        sx += w * x;
        sy += w * p.b_fh_t;
        sxx += w * x * x;
        sxy += w * x * p.b_fh_t;
    }
    const double det = s * sxx - sx * sx;
    const auto [dmin, dmax] = std::minmax_element(samples.begin(), samples.end(),
                                                  [](const auto& a, const auto& b) { return a.diameter_mm < b.diameter_mm; });
    if (dmin->diameter_mm == dmax->diameter_mm || !(det > 1e-12 * s * sxx)) {
        throw DataError("size-effect fit: rank-deficient design (need at least 2 distinct diameters)");
    }
    const double slope = (s * sxy - sx * sy) / det;        // T/mm²
    const double intercept = (sxx * sy - sx * sxy) / det;  // T

    double rss = 0.0;
    for (const auto& p : samples) {
        const double r = p.b_fh_t - (intercept + slope * p.diameter_mm * p.diameter_mm);
        rss += r * r;
    }
    const auto n = static_cast<double>(samples.size());
    const double variance_scale = weighted ? 1.0 : rss / (n - 2.0);

    SizeEffectFit fit;
    fit.weighted = weighted;
    fit.curvature_mt_per_mm2 = 1e3 * slope;
    fit.zero_diameter_offset_mt = 1e3 * (cavity_frequency_ghz / gyromagnetic_ghz_per_t - intercept);
    const double lambda = larmor_wavelength_mm(cavity_frequency_ghz);
    fit.relative_permittivity = permittivity_from_curvature(fit.curvature_mt_per_mm2, lambda, saturation_magnetization_mt);
    fit.curvature_sigma = 1e3 * std::sqrt(variance_scale * s / det);
    fit.offset_sigma = 1e3 * std::sqrt(variance_scale * sxx / det);
    fit.permittivity_sigma = fit.curvature_sigma / curvature_prefactor(lambda, saturation_magnetization_mt);
    fit.residual_rms_t = std::sqrt(rss / n);
    return fit;
}

double apparent_g_factor(double fitted_slope_ghz_per_t) {
    if (!(fitted_slope_ghz_per_t > 0.0)) throw SpecError("apparent g-factor: slope must be > 0");
    return 2.0 * fitted_slope_ghz_per_t / kDefaultGyromagneticGhzPerT;
}

} // namespace hsim
