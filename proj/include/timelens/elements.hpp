#pragma once

//
// Optical-element algebra. Every element maps a SampledEnvelope to a new
// SampledEnvelope; chains compose left to right.
//
// Sign pairing, relative to the analysis kernel e^{+i w t}:
//   GDD multiplies the spectrum by       exp(+i phi w^2 / 2)
//   a focusing lens multiplies time by   exp(+i k t^2 / 2), k > 0
// With phi = 1/k this pairing reproduces the collimated (compressed) output;
// verify_sign_convention() locks it at runtime.
//

#include <cmath>
#include <complex>
#include <cstddef>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "timelens/envelope.hpp"
#include "timelens/errors.hpp"
#include "timelens/units.hpp"

namespace timelens {

enum class LensSign { focusing, diverging };
enum class ShearSlope { up, down };

struct Gdd {
    double phi_ps2 = 0.0;
};

struct QuadraticLens {
    double k_inv_ps2 = 0.0;  // chirp rate, ps^-2; positive = focusing pairing
};

struct SinusoidalEom {
    double depth_rad = 0.0;   // modulation depth A
    double f_rf_thz = 0.0;    // drive frequency
    double t0_ps = 0.0;       // pulse-to-extremum offset
    LensSign sign = LensSign::focusing;
};

struct LinearShear {
    double depth_rad = 0.0;
    double f_rf_thz = 0.0;
    ShearSlope slope = ShearSlope::up;  // up = positive spectral shift
};

struct GaussianFilter {
    WidthParam width;          // amplitude transmission exp(-w^2 / (2 width^2))
    AngularFrequency center;   // absolute center frequency
};

struct Attenuator {
    double eta = 1.0;  // intensity transmission in (0, 1]
};

using OpticalElement =
    std::variant<Gdd, QuadraticLens, SinusoidalEom, LinearShear, GaussianFilter, Attenuator>;
using ElementChain = std::vector<OpticalElement>;

// --------------------------------------------------------------------------
// closed-form element parameters

/// K = 4 pi^2 f_RF^2 A, the chirp rate of the parabolic region of a
/// sinusoidal phase drive.
inline double chirp_factor(double f_rf_thz, double depth_rad) {
    detail::require(std::isfinite(f_rf_thz) && f_rf_thz > 0.0,
                    "chirp_factor: drive frequency must be positive");
    detail::require(std::isfinite(depth_rad) && depth_rad > 0.0,
                    "chirp_factor: modulation depth must be positive");
    return 4.0 * constants::pi * constants::pi * f_rf_thz * f_rf_thz * depth_rad;
}

/// Collimation condition phi = 1/K.
inline double collimation_gdd(double k_inv_ps2) {
    detail::require(std::isfinite(k_inv_ps2) && k_inv_ps2 > 0.0,
                    "collimation_gdd: chirp rate must be positive");
    return 1.0 / k_inv_ps2;
}

/// Length of the contiguous interval around a sinusoid extremum where the
/// phase deviates from its parabolic approximation by at most tol_rad.
/// Capped at one modulation period.
inline double aperture_length(double f_rf_thz, double depth_rad, double tol_rad) {
    detail::require(std::isfinite(f_rf_thz) && f_rf_thz > 0.0,
                    "aperture_length: drive frequency must be positive");
    detail::require(std::isfinite(depth_rad) && depth_rad > 0.0,
                    "aperture_length: modulation depth must be positive");
    detail::require(std::isfinite(tol_rad) && tol_rad > 0.0,
                    "aperture_length: tolerance must be positive");
    // residual r(u) = A (cos u - 1 + u^2/2), monotone increasing on [0, pi]
    const auto residual = [&](double u) { return depth_rad * (std::cos(u) - 1.0 + u * u / 2.0); };
    double lo = 0.0, hi = constants::pi;
    if (residual(hi) <= tol_rad) {
        // tolerance admits the whole period
        return 1.0 / f_rf_thz;
    }
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (residual(mid) < tol_rad ? lo : hi) = mid;
    }
    const double u_star = 0.5 * (lo + hi);
    return 2.0 * u_star / (constants::two_pi * f_rf_thz);
}

inline double aperture_fill_fraction(double chirped_fwhm_ps, double f_rf_thz, double depth_rad,
                                     double tol_rad = 0.5) {
    detail::require(std::isfinite(chirped_fwhm_ps) && chirped_fwhm_ps >= 0.0,
                    "aperture_fill_fraction: duration must be non-negative");
    return chirped_fwhm_ps / aperture_length(f_rf_thz, depth_rad, tol_rad);
}

// --------------------------------------------------------------------------
// element application

namespace detail {

inline double temporal_sigma(const SampledEnvelope& env, double t_ref) {
    double w = 0.0, acc = 0.0;
    for (std::size_t k = 0; k < env.samples.size(); ++k) {
        const double i = std::norm(env.samples[k]);
        const double t = env.grid.time_at(k) - t_ref;
        w += i;
        acc += i * t * t;
    }
    if (!(w > 0.0)) throw DomainError("temporal_sigma: zero energy");
    return std::sqrt(acc / w);
}

inline double spectral_sigma(const SampledSpectrum& spec) {
    double w = 0.0, m1 = 0.0, m2 = 0.0;
    for (std::size_t j = 0; j < spec.amplitudes.size(); ++j) {
        const double i = std::norm(spec.amplitudes[j]);
        const double x = spec.detuning_at(j);
        w += i;
        m1 += i * x;
        m2 += i * x * x;
    }
    if (!(w > 0.0)) throw DomainError("spectral_sigma: zero energy");
    m1 /= w;
    return std::sqrt(std::max(0.0, m2 / w - m1 * m1));
}

}  // namespace detail

inline SampledEnvelope apply_gdd(const SampledEnvelope& env, double phi_ps2) {
    detail::require(std::isfinite(phi_ps2), "apply_gdd: GDD must be finite");
    SampledSpectrum spec = to_spectrum(env);
    if (phi_ps2 == 0.0) return to_time(spec);

    // Pre-flight stretch estimate: dispersed duration grows by ~|phi| * sigma_w.
    const double sigma_t = detail::temporal_sigma(env, centroid(env));
    const double sigma_w = detail::spectral_sigma(spec);
    const double need_span = 16.0 * (sigma_t + std::abs(phi_ps2) * sigma_w);
    if (env.grid.span_ps() < need_span) {
        std::ostringstream msg;
        msg << "apply_gdd: estimated post-GDD extent needs a span of " << need_span
            << " ps but the grid provides " << env.grid.span_ps() << " ps (ratio "
            << env.grid.span_ps() / need_span << " < 1)";
        throw GridError(msg.str());
    }
    for (std::size_t j = 0; j < spec.amplitudes.size(); ++j) {
        const double w = spec.detuning_at(j);
        spec.amplitudes[j] *= std::polar(1.0, 0.5 * phi_ps2 * w * w);
    }
    SampledEnvelope out = to_time(spec);
    detail::check_boundary_guard(out, "apply_gdd");
    return out;
}

/// Quadratic temporal phase exp(i k tbar^2 / 2), tbar measured from the pulse
/// temporal centroid shifted by `time_offset_ps` (the lens time reference).
inline SampledEnvelope apply_quadratic_lens(const SampledEnvelope& env, double k_inv_ps2,
                                            double time_offset_ps = 0.0) {
    detail::require(std::isfinite(k_inv_ps2), "apply_quadratic_lens: chirp rate must be finite");
    detail::require(std::isfinite(time_offset_ps), "apply_quadratic_lens: offset must be finite");
    SampledEnvelope out = env;
    if (k_inv_ps2 == 0.0) return out;
    const double t_ref = centroid(env) + time_offset_ps;
    for (std::size_t k = 0; k < out.samples.size(); ++k) {
        const double t = out.grid.time_at(k) - t_ref;
        out.samples[k] *= std::polar(1.0, 0.5 * k_inv_ps2 * t * t);
    }
    return out;
}

/// Sinusoidal electro-optic phase with the requested extremum at tbar = t0.
/// Focusing applies +A(1 - cos u); its parabolic region is exactly
/// K tbar^2 / 2 with K = chirp_factor(f_RF, A).
inline SampledEnvelope apply_sinusoidal_eom(const SampledEnvelope& env, const SinusoidalEom& eom,
                                            double time_offset_ps = 0.0) {
    detail::require(std::isfinite(eom.depth_rad) && eom.depth_rad >= 0.0,
                    "apply_sinusoidal_eom: depth must be non-negative");
    detail::require(std::isfinite(eom.f_rf_thz) && eom.f_rf_thz > 0.0,
                    "apply_sinusoidal_eom: drive frequency must be positive");
    SampledEnvelope out = env;
    if (eom.depth_rad == 0.0) return out;
    const double t_ref = centroid(env) + eom.t0_ps + time_offset_ps;
    const double sgn = eom.sign == LensSign::focusing ? 1.0 : -1.0;
    for (std::size_t k = 0; k < out.samples.size(); ++k) {
        const double u = constants::two_pi * eom.f_rf_thz * (out.grid.time_at(k) - t_ref);
        out.samples[k] *= std::polar(1.0, sgn * eom.depth_rad * (1.0 - std::cos(u)));
    }
    return out;
}

/// Full sinusoidal phase with the pulse at a zero crossing; to first order a
/// constant spectral shift of +-2 pi A f_RF ("up" = shift towards higher
/// frequency).
inline SampledEnvelope apply_linear_shear(const SampledEnvelope& env, const LinearShear& shear) {
    detail::require(std::isfinite(shear.depth_rad) && shear.depth_rad >= 0.0,
                    "apply_linear_shear: depth must be non-negative");
    detail::require(std::isfinite(shear.f_rf_thz) && shear.f_rf_thz > 0.0,
                    "apply_linear_shear: drive frequency must be positive");
    SampledEnvelope out = env;
    if (shear.depth_rad == 0.0) return out;
    const double t_ref = centroid(env);
    const double duration = 2.355 * detail::temporal_sigma(env, t_ref);
    const double quarter_wave = 0.25 / (constants::two_pi * shear.f_rf_thz);
    if (duration > quarter_wave) {
        std::ostringstream msg;
        msg << "linear shear: pulse duration " << duration
            << " ps is not small against the modulation slope region "
            << 1.0 / (constants::two_pi * shear.f_rf_thz) << " ps; shift is no longer linear";
        out.warnings.push_back(msg.str());
    }
    // e^{-i A sin(2 pi f tbar)} shifts the spectrum up under the e^{+i w t}
    // analysis kernel.
    const double sgn = shear.slope == ShearSlope::up ? -1.0 : 1.0;
    for (std::size_t k = 0; k < out.samples.size(); ++k) {
        const double u = constants::two_pi * shear.f_rf_thz * (out.grid.time_at(k) - t_ref);
        out.samples[k] *= std::polar(1.0, sgn * shear.depth_rad * std::sin(u));
    }
    return out;
}

inline SampledEnvelope apply_gaussian_filter(const SampledEnvelope& env,
                                             const GaussianFilter& filter) {
    detail::require(filter.width.rad_per_ps > 0.0,
                    "apply_gaussian_filter: filter width must be positive");
    detail::require(std::isfinite(filter.center.rad_per_ps) && filter.center.rad_per_ps > 0.0,
                    "apply_gaussian_filter: filter center must be positive");
    SampledSpectrum spec = to_spectrum(env);
    const double inv_two_w2 = 0.5 / (filter.width.rad_per_ps * filter.width.rad_per_ps);
    for (std::size_t j = 0; j < spec.amplitudes.size(); ++j) {
        const double d = env.carrier.rad_per_ps + spec.detuning_at(j) - filter.center.rad_per_ps;
        spec.amplitudes[j] *= std::exp(-d * d * inv_two_w2);
    }
    SampledEnvelope out = to_time(spec);
    detail::check_boundary_guard(out, "apply_gaussian_filter");
    return out;
}

inline SampledEnvelope apply_attenuator(const SampledEnvelope& env, double eta) {
    detail::require(std::isfinite(eta) && eta > 0.0 && eta <= 1.0,
                    "apply_attenuator: transmission must be in (0, 1]");
    SampledEnvelope out = env;
    const double a = std::sqrt(eta);
    for (Complex& s : out.samples) s *= a;
    return out;
}

inline SampledEnvelope apply_element(const SampledEnvelope& env, const OpticalElement& element) {
    return std::visit(
        [&](const auto& e) -> SampledEnvelope {
            using E = std::decay_t<decltype(e)>;
            if constexpr (std::is_same_v<E, Gdd>) return apply_gdd(env, e.phi_ps2);
            if constexpr (std::is_same_v<E, QuadraticLens>)
                return apply_quadratic_lens(env, e.k_inv_ps2);
            if constexpr (std::is_same_v<E, SinusoidalEom>) return apply_sinusoidal_eom(env, e);
            if constexpr (std::is_same_v<E, LinearShear>) return apply_linear_shear(env, e);
            if constexpr (std::is_same_v<E, GaussianFilter>) return apply_gaussian_filter(env, e);
            if constexpr (std::is_same_v<E, Attenuator>) return apply_attenuator(env, e.eta);
        },
        element);
}

inline SampledEnvelope apply_chain(SampledEnvelope env, const ElementChain& chain) {
    if (chain.empty()) throw DomainError("apply_chain: chain is empty");
    for (const OpticalElement& e : chain) env = apply_element(env, e);
    return env;
}

// --------------------------------------------------------------------------
// sign-pairing self-test

/// One-shot check that the (phi, k) pairing above reproduces the collimated
/// compression (and the opposite lens sign the expansion). Throws on failure.
inline void verify_sign_convention() {
    static const bool ok = [] {
        const TimeGrid grid = make_time_grid(2048, 0.25);
        const AngularFrequency carrier = wavelength_to_omega(Wavelength{830.0});
        const FwhmBandwidth dnu{0.401};
        const double k = 0.101;
        const SampledEnvelope input = synthesize_gaussian(grid, carrier, dnu);
        const SampledEnvelope dispersed = apply_gdd(input, 1.0 / k);

        const double compressed =
            spectral_fwhm(to_spectrum(apply_quadratic_lens(dispersed, k))).thz;
        const double expected_c = constants::ln2 / (constants::pi * constants::pi) * k / dnu.thz;
        if (std::abs(compressed - expected_c) > 0.05 * expected_c)
            throw GridError("sign convention self-test: focusing pairing failed");

        const double expanded =
            spectral_fwhm(to_spectrum(apply_quadratic_lens(dispersed, -k))).thz;
        if (expanded < 1.5 * dnu.thz)
            throw GridError("sign convention self-test: diverging pairing failed");
        return true;
    }();
    (void)ok;
}

}  // namespace timelens
