// size_effects.hpp: diameter-dependent resonance offset of magnetic spheres
//
//   b(φ) = ω_c/γ − B_fh = −k·φ² + b₀,   k = 2π²·M₀·(5 + ε_r) / (45·λ_m²)
//
// with M₀ in mT, λ_m and φ in mm, so k is in mT/mm².

#pragma once

#include <cstddef>
#include <optional>
#include <span>

namespace hsim {

inline constexpr double kSpeedOfLightMmGhz = 299.792458;   // mm·GHz
inline constexpr double kYigSaturationMagnetizationMt = 178.0;

struct SizeEffectParams {
    double saturation_magnetization_mt = kYigSaturationMagnetizationMt;
    double relative_permittivity = 15.0;
    double larmor_wavelength_mm = 0.0;
    double zero_diameter_offset_mt = 0.0;
};

// λ = c/ν in mm.
double larmor_wavelength_mm(double frequency_ghz);

// k in mT/mm².  Throws SpecError unless M₀ > 0, ε_r > 1, λ_m > 0.
double offset_curvature(const SizeEffectParams& params);

// Inverse of offset_curvature for ε_r.
double permittivity_from_curvature(double curvature_mt_per_mm2, double larmor_wavelength_mm,
                                   double saturation_magnetization_mt = kYigSaturationMagnetizationMt);

// b(φ) in mT; diameter >= 0.
double offset_field(double diameter_mm, const SizeEffectParams& params);

// ω_c/γ − b(φ) in tesla.
double predicted_b_fh(double diameter_mm, double cavity_frequency_ghz, double gyromagnetic_ghz_per_t,
                      const SizeEffectParams& params);

struct DiameterFieldSample {
    double diameter_mm = 0.0;
    double b_fh_t = 0.0;
    std::optional<double> sigma_t;
};

struct SizeEffectFit {
    double curvature_mt_per_mm2 = 0.0;   // k, the slope of B_fh against φ²
    double zero_diameter_offset_mt = 0.0;
    double relative_permittivity = 0.0;
    double curvature_sigma = 0.0;
    double offset_sigma = 0.0;
    double permittivity_sigma = 0.0;
    double residual_rms_t = 0.0;
    bool weighted = false;
};

// Least squares of B_fh against φ² (weights 1/σ² when every sample carries
// σ, otherwise unit weights with the covariance scaled by the residual
// variance).  λ_m is taken at the cavity frequency.  Throws DataError for
// fewer than 3 samples or fewer than 2 distinct diameters.
SizeEffectFit fit_size_effect(std::span<const DiameterFieldSample> samples, double cavity_frequency_ghz,
                              double gyromagnetic_ghz_per_t,
                              double saturation_magnetization_mt = kYigSaturationMagnetizationMt);

// g = 2·slope/28 GHz/T.
double apparent_g_factor(double fitted_slope_ghz_per_t);

} // namespace hsim
