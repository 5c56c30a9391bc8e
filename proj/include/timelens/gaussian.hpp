#pragma once

//
// Exact closed-form channel for Gaussian pulses through quadratic-phase
// chains. A pulse is tracked by its complex spectral width parameter p,
// spectral amplitude scale * exp(-p w^2 / 2) with Re(p) > 0:
//   GDD phi:       p -> p - i phi
//   lens k:        1/p -> 1/p - i k      (scale picks up sqrt(q/p))
//   filter:        p -> p + 1/width^2    (co-centered only)
// This generalizes the collimated special case to arbitrary mismatched and
// diverging chains, giving the FFT engine an independent oracle.
//

#include <cmath>
#include <complex>
#include <vector>

#include "timelens/elements.hpp"
#include "timelens/errors.hpp"
#include "timelens/units.hpp"

namespace timelens {

struct GaussianPulse {
    AngularFrequency carrier;
    Complex width_param_ps2;   // p
    Complex amplitude_scale;   // only the modulus is physically meaningful
};

/// Gaussian temporal-offset distribution p(tau) ∝ exp(-(tau/T)^2).
/// Note the distribution width T is sqrt(2) times the standard deviation.
struct JitterModel {
    double width_ps = 0.0;

    double tau_std() const { return width_ps / std::sqrt(2.0); }
};

inline GaussianPulse make_gaussian_pulse(AngularFrequency carrier, FwhmBandwidth dnu) {
    detail::require(std::isfinite(carrier.rad_per_ps) && carrier.rad_per_ps > 0.0,
                    "make_gaussian_pulse: carrier must be positive");
    const double dw = fwhm_to_width_param(dnu).rad_per_ps;
    const double p = 1.0 / (dw * dw);
    // unit energy: |s|^2 sqrt(pi / Re p) = 1
    const double s = std::pow(p / constants::pi, 0.25);
    return {carrier, {p, 0.0}, {s, 0.0}};
}

inline double pulse_energy(const GaussianPulse& pulse) {
    return std::norm(pulse.amplitude_scale) *
           std::sqrt(constants::pi / pulse.width_param_ps2.real());
}

inline WidthParam width_param(const GaussianPulse& pulse) {
    return {1.0 / std::sqrt(pulse.width_param_ps2.real())};
}

/// Spectral intensity FWHM of the pulse.
inline FwhmBandwidth fwhm_bandwidth(const GaussianPulse& pulse) {
    return width_param_to_fwhm(width_param(pulse));
}

inline bool is_gaussian_exact(const OpticalElement& element, AngularFrequency carrier) {
    if (std::holds_alternative<Gdd>(element) || std::holds_alternative<QuadraticLens>(element) ||
        std::holds_alternative<Attenuator>(element))
        return true;
    if (const auto* f = std::get_if<GaussianFilter>(&element))
        return std::abs(f->center.rad_per_ps - carrier.rad_per_ps) <=
               1e-9 * carrier.rad_per_ps;
    return false;
}

inline bool is_gaussian_exact(const ElementChain& chain, AngularFrequency carrier) {
    for (const OpticalElement& e : chain)
        if (!is_gaussian_exact(e, carrier)) return false;
    return true;
}

inline GaussianPulse propagate(GaussianPulse pulse, const ElementChain& chain) {
    for (const OpticalElement& element : chain) {
        if (!is_gaussian_exact(element, pulse.carrier)) {
            if (std::get_if<GaussianFilter>(&element))
                throw UnsupportedElementError(
                    "propagate: Gaussian filter detuned from the pulse carrier is not "
                    "representable in the exact channel");
            throw UnsupportedElementError(
                "propagate: chain element is not quadratic-exact (use the sampled engine)");
        }
        if (const auto* gdd = std::get_if<Gdd>(&element)) {
            pulse.width_param_ps2 -= Complex{0.0, gdd->phi_ps2};
        } else if (const auto* lens = std::get_if<QuadraticLens>(&element)) {
            if (lens->k_inv_ps2 != 0.0) {
                const Complex p = pulse.width_param_ps2;
                const Complex q = 1.0 / (1.0 / p - Complex{0.0, lens->k_inv_ps2});
                pulse.width_param_ps2 = q;
                pulse.amplitude_scale *= std::sqrt(q / p);
            }
        } else if (const auto* filter = std::get_if<GaussianFilter>(&element)) {
            const double w = filter->width.rad_per_ps;
            detail::require(w > 0.0, "propagate: filter width must be positive");
            pulse.width_param_ps2 += 1.0 / (w * w);
        } else if (const auto* att = std::get_if<Attenuator>(&element)) {
            detail::require(att->eta > 0.0 && att->eta <= 1.0,
                            "propagate: attenuator transmission must be in (0, 1]");
            pulse.amplitude_scale *= std::sqrt(att->eta);
        }
        if (!(pulse.width_param_ps2.real() > 0.0))
            throw DomainError("propagate: pulse lost normalizability (Re p <= 0)");
    }
    return pulse;
}

// --------------------------------------------------------------------------
// collimated-chain formulas

/// Output bandwidth of the collimated compressor: dnu' = (ln2/pi^2) K / dnu0.
inline FwhmBandwidth compressed_bandwidth(FwhmBandwidth dnu0, double k_inv_ps2) {
    detail::require(std::isfinite(dnu0.thz) && dnu0.thz > 0.0,
                    "compressed_bandwidth: input bandwidth must be positive");
    detail::require(std::isfinite(k_inv_ps2) && k_inv_ps2 > 0.0,
                    "compressed_bandwidth: chirp rate must be positive");
    return {constants::ln2 / (constants::pi * constants::pi) * k_inv_ps2 / dnu0.thz};
}

/// C = dnu0 / dnu' = (pi^2/ln2) dnu0^2 / K.
inline double compression_factor(FwhmBandwidth dnu0, double k_inv_ps2) {
    detail::require(std::isfinite(dnu0.thz) && dnu0.thz > 0.0,
                    "compression_factor: input bandwidth must be positive");
    detail::require(std::isfinite(k_inv_ps2) && k_inv_ps2 > 0.0,
                    "compression_factor: chirp rate must be positive");
    return constants::pi * constants::pi / constants::ln2 * dnu0.thz * dnu0.thz / k_inv_ps2;
}

/// Timing-jitter broadening factor sqrt(1 + T^2 dw^2) on the compressed width.
inline double jitter_broadening_factor(WidthParam dw, double jitter_width_ps) {
    detail::require(std::isfinite(jitter_width_ps) && jitter_width_ps >= 0.0,
                    "jitter_broadening_factor: jitter width must be non-negative");
    const double x = jitter_width_ps * dw.rad_per_ps;
    return std::sqrt(1.0 + x * x);
}

/// Jitter-averaged compressed spectral intensity, unit area, evaluated on the
/// given detuning grid: a Gaussian of intensity 1/e half-width
/// (K/dw) sqrt(1 + T^2 dw^2).
inline std::vector<double> jittered_spectrum(WidthParam dw, double k_inv_ps2,
                                             double jitter_width_ps,
                                             const std::vector<double>& detunings) {
    detail::require(dw.rad_per_ps > 0.0, "jittered_spectrum: input width must be positive");
    detail::require(std::isfinite(k_inv_ps2) && k_inv_ps2 > 0.0,
                    "jittered_spectrum: chirp rate must be positive");
    const double broaden = jitter_broadening_factor(dw, jitter_width_ps);
    const double a = k_inv_ps2 / dw.rad_per_ps * broaden;
    std::vector<double> out(detunings.size());
    const double norm = 1.0 / (std::sqrt(constants::pi) * a);
    for (std::size_t i = 0; i < detunings.size(); ++i) {
        const double x = detunings[i] / a;
        out[i] = norm * std::exp(-x * x);
    }
    return out;
}

/// Scalar form: jitter-broadened FWHM bandwidth.
inline FwhmBandwidth jittered_bandwidth(FwhmBandwidth dnu0, double k_inv_ps2,
                                        double jitter_width_ps) {
    const FwhmBandwidth base = compressed_bandwidth(dnu0, k_inv_ps2);
    const double broaden = jitter_broadening_factor(fwhm_to_width_param(dnu0), jitter_width_ps);
    return {base.thz * broaden};
}

}  // namespace timelens
