#pragma once

//
// Narrowband-absorber figures of merit. The absorber is a unit-peak Gaussian
// intensity transmission T(w) = exp(-(w - w_c)^2 / width^2); fluxes are
// overlap integrals of T with unit-area spectral intensities.
//

#include <cmath>
#include <cstddef>
#include <vector>

#include "timelens/errors.hpp"
#include "timelens/gaussian.hpp"
#include "timelens/units.hpp"

namespace timelens {

struct AbsorberSpec {
    FwhmBandwidth fwhm;         // intensity FWHM of the transmission window
    AngularFrequency center;
};

/// Transmitted fraction of a co-centered Gaussian input without the
/// compressor: F0 = [1 + (dw/dw_F)^2]^(-1/2).
inline double flux_direct(WidthParam input_width, WidthParam filter_width) {
    detail::require(input_width.rad_per_ps > 0.0, "flux_direct: input width must be positive");
    detail::require(filter_width.rad_per_ps > 0.0, "flux_direct: filter width must be positive");
    const double r = input_width.rad_per_ps / filter_width.rad_per_ps;
    return 1.0 / std::sqrt(1.0 + r * r);
}

/// Transmitted fraction with the compressor in place (jitter-broadened
/// compressed spectrum, times the device transmission eta):
/// F1 = eta [1 + (K/(dw dw_F))^2 (1 + T^2 dw^2)]^(-1/2).
inline double flux_compressed(WidthParam input_width, WidthParam filter_width, double k_inv_ps2,
                              double jitter_width_ps, double eta) {
    detail::require(input_width.rad_per_ps > 0.0,
                    "flux_compressed: input width must be positive");
    detail::require(filter_width.rad_per_ps > 0.0,
                    "flux_compressed: filter width must be positive");
    detail::require(std::isfinite(k_inv_ps2) && k_inv_ps2 > 0.0,
                    "flux_compressed: chirp rate must be positive");
    detail::require(std::isfinite(jitter_width_ps) && jitter_width_ps >= 0.0,
                    "flux_compressed: jitter width must be non-negative");
    detail::require(std::isfinite(eta) && eta > 0.0 && eta <= 1.0,
                    "flux_compressed: transmission must be in (0, 1]");
    const double dw = input_width.rad_per_ps;
    const double r = k_inv_ps2 / (dw * filter_width.rad_per_ps);
    const double broaden = 1.0 + jitter_width_ps * jitter_width_ps * dw * dw;
    return eta / std::sqrt(1.0 + r * r * broaden);
}

/// R = F1 / F0, the flux gain of compressing before the absorber.
inline double absorption_ratio(WidthParam input_width, WidthParam filter_width, double k_inv_ps2,
                               double jitter_width_ps, double eta) {
    return flux_compressed(input_width, filter_width, k_inv_ps2, jitter_width_ps, eta) /
           flux_direct(input_width, filter_width);
}

/// Discrete overlap of a unit-area sampled spectral intensity with the
/// absorber transmission. `detunings` are relative to `carrier`.
inline double numeric_flux(const std::vector<double>& detunings,
                           const std::vector<double>& intensity, double domega,
                           const AbsorberSpec& absorber, AngularFrequency carrier) {
    if (detunings.size() != intensity.size())
        throw DomainError("numeric_flux: grid and intensity sizes differ");
    detail::require(domega > 0.0, "numeric_flux: bin width must be positive");
    double area = 0.0;
    for (double v : intensity) {
        detail::require(std::isfinite(v) && v >= 0.0,
                        "numeric_flux: intensity must be finite and non-negative");
        area += v;
    }
    area *= domega;
    if (std::abs(area - 1.0) > 1e-6)
        throw DomainError("numeric_flux: spectrum is not unit-normalized (area " +
                          std::to_string(area) + ")");
    const double w_f = fwhm_to_width_param(absorber.fwhm).rad_per_ps;
    double acc = 0.0;
    for (std::size_t j = 0; j < intensity.size(); ++j) {
        const double d = carrier.rad_per_ps + detunings[j] - absorber.center.rad_per_ps;
        acc += intensity[j] * std::exp(-d * d / (w_f * w_f));
    }
    return acc * domega;
}

}  // namespace timelens
