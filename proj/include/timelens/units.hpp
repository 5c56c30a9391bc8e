#pragma once

//
// Base units used throughout the library: time in ps, angular frequency in
// rad/ps (numerically equal to Trad/s), ordinary frequency in THz, wavelength
// in nm at I/O boundaries only. This keeps chirp rates (ps^-2) and dispersion
// (ps^2) at order unity.
//

#include <cmath>
#include <string>

#include "timelens/errors.hpp"

namespace timelens {

namespace constants {

/// Speed of light in nm/ps (CODATA exact value rescaled).
inline constexpr double c_nm_per_ps = 299792.458;
inline constexpr double pi = 3.14159265358979323846;
inline constexpr double two_pi = 2.0 * pi;
inline constexpr double ln2 = 0.69314718055994530942;

}  // namespace constants

struct AngularFrequency {
    double rad_per_ps = 0.0;
};

struct Wavelength {
    double nm = 0.0;
};

/// Intensity FWHM in ordinary frequency.
struct FwhmBandwidth {
    double thz = 0.0;
};

/// Gaussian spectral amplitude 1/e half-width.
struct WidthParam {
    double rad_per_ps = 0.0;
};

namespace detail {

inline void require(bool ok, const std::string& msg) {
    if (!ok) throw DomainError(msg);
}

}  // namespace detail

inline AngularFrequency wavelength_to_omega(Wavelength lambda) {
    detail::require(std::isfinite(lambda.nm) && lambda.nm > 0.0,
                    "wavelength_to_omega: wavelength must be finite and positive, got " +
                        std::to_string(lambda.nm) + " nm");
    return {constants::two_pi * constants::c_nm_per_ps / lambda.nm};
}

inline Wavelength omega_to_wavelength(AngularFrequency omega) {
    detail::require(std::isfinite(omega.rad_per_ps) && omega.rad_per_ps > 0.0,
                    "omega_to_wavelength: frequency must be finite and positive");
    return {constants::two_pi * constants::c_nm_per_ps / omega.rad_per_ps};
}

/// Δν = c·Δλ/λ0², the small-span bandwidth conversion.
inline FwhmBandwidth bandwidth_nm_to_thz(double dlambda_nm, Wavelength lambda0) {
    detail::require(std::isfinite(dlambda_nm) && dlambda_nm >= 0.0,
                    "bandwidth_nm_to_thz: bandwidth must be finite and non-negative");
    detail::require(std::isfinite(lambda0.nm) && lambda0.nm > 0.0,
                    "bandwidth_nm_to_thz: center wavelength must be finite and positive");
    return {constants::c_nm_per_ps * dlambda_nm / (lambda0.nm * lambda0.nm)};
}

inline double bandwidth_thz_to_nm(FwhmBandwidth dnu, Wavelength lambda0) {
    detail::require(std::isfinite(dnu.thz) && dnu.thz >= 0.0,
                    "bandwidth_thz_to_nm: bandwidth must be finite and non-negative");
    detail::require(std::isfinite(lambda0.nm) && lambda0.nm > 0.0,
                    "bandwidth_thz_to_nm: center wavelength must be finite and positive");
    return dnu.thz * lambda0.nm * lambda0.nm / constants::c_nm_per_ps;
}

/// Δω = π·Δν/√(ln 2) relates the intensity FWHM to the amplitude 1/e half-width.
inline WidthParam fwhm_to_width_param(FwhmBandwidth dnu) {
    detail::require(std::isfinite(dnu.thz) && dnu.thz > 0.0,
                    "fwhm_to_width_param: bandwidth must be finite and positive");
    return {constants::pi * dnu.thz / std::sqrt(constants::ln2)};
}

inline FwhmBandwidth width_param_to_fwhm(WidthParam dw) {
    detail::require(std::isfinite(dw.rad_per_ps) && dw.rad_per_ps > 0.0,
                    "width_param_to_fwhm: width must be finite and positive");
    return {std::sqrt(constants::ln2) * dw.rad_per_ps / constants::pi};
}

}  // namespace timelens
