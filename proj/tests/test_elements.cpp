#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "timelens/elements.hpp"
#include "timelens/gaussian.hpp"

using namespace timelens;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

const AngularFrequency kCarrier = wavelength_to_omega(Wavelength{830.0});

SampledEnvelope reference_pulse(FwhmBandwidth dnu = FwhmBandwidth{0.401}) {
    return synthesize_gaussian(make_time_grid(16384, 0.08), kCarrier, dnu);
}

double max_rel_diff(const std::vector<Complex>& a, const std::vector<Complex>& b) {
    double peak = 0.0, diff = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        peak = std::max(peak, std::abs(a[i]));
        diff = std::max(diff, std::abs(a[i] - b[i]));
    }
    return diff / peak;
}

}  // namespace

TEST_CASE("chirp factor and collimation GDD", "[elements]") {
    const double k10 = chirp_factor(0.01, 25.7);
    CHECK_THAT(k10, WithinRel(0.1014595, 1e-6));
    CHECK(std::abs(k10 - 0.101) < 0.009);  // quoted 0.101 +- 0.009 ps^-2

    CHECK_THAT(collimation_gdd(0.101), WithinRel(9.90099, 1e-5));

    const double k40 = chirp_factor(0.04, 7.2);
    CHECK_THAT(k40, WithinRel(0.4547914, 1e-6));
    CHECK_THAT(collimation_gdd(k40), WithinRel(2.1988104, 1e-6));  // quoted as 2.2 ps^2

    CHECK_THROWS_AS(chirp_factor(0.0, 25.7), DomainError);
    CHECK_THROWS_AS(chirp_factor(0.01, -1.0), DomainError);
    CHECK_THROWS_AS(collimation_gdd(0.0), DomainError);
}

TEST_CASE("GDD application", "[elements]") {
    const SampledEnvelope env = reference_pulse();

    SECTION("zero GDD is the identity") {
        CHECK(max_rel_diff(apply_gdd(env, 0.0).samples, env.samples) < 1e-12);
    }

    SECTION("phase-only in frequency: spectral intensity unchanged") {
        const auto before = spectral_intensity(to_spectrum(env));
        const auto after = spectral_intensity(to_spectrum(apply_gdd(env, 9.9)));
        double peak = 0.0, diff = 0.0;
        for (std::size_t i = 0; i < before.size(); ++i) {
            peak = std::max(peak, before[i]);
            diff = std::max(diff, std::abs(before[i] - after[i]));
        }
        CHECK(diff / peak < 1e-12);
    }

    SECTION("Gaussian stretch formula") {
        // T = T0 sqrt(1 + (4 ln2 phi / T0^2)^2), frozen at 24.968 ps for the
        // 401 GHz / 9.9 ps^2 pair
        const double t0 = 2.0 * constants::ln2 / (constants::pi * 0.401);
        const double x = 4.0 * constants::ln2 * 9.9 / (t0 * t0);
        const double expected = t0 * std::sqrt(1.0 + x * x);
        CHECK_THAT(expected, WithinRel(24.9679, 1e-4));
        CHECK_THAT(temporal_fwhm(apply_gdd(env, 9.9)), WithinRel(expected, 0.005));
    }

    SECTION("energy conserved") {
        CHECK_THAT(energy(apply_gdd(env, 9.9)), WithinRel(energy(env), 1e-12));
    }

    SECTION("stretch beyond the grid is a grid error") {
        const SampledEnvelope small =
            synthesize_gaussian(make_time_grid(1024, 0.05), kCarrier, FwhmBandwidth{0.401});
        CHECK_THROWS_AS(apply_gdd(small, 40.0), GridError);
    }
}

TEST_CASE("quadratic lens", "[elements]") {
    const SampledEnvelope env = reference_pulse();

    SECTION("zero chirp is the identity") {
        CHECK(max_rel_diff(apply_quadratic_lens(env, 0.0).samples, env.samples) == 0.0);
    }

    SECTION("phase-only in time: temporal intensity unchanged") {
        const auto before = temporal_intensity(env);
        const auto after = temporal_intensity(apply_quadratic_lens(env, 0.101));
        double peak = 0.0, diff = 0.0;
        for (std::size_t i = 0; i < before.size(); ++i) {
            peak = std::max(peak, before[i]);
            diff = std::max(diff, std::abs(before[i] - after[i]));
        }
        CHECK(diff / peak < 1e-12);
    }

    SECTION("collimated chain compresses per the closed form") {
        const SampledEnvelope out = apply_quadratic_lens(apply_gdd(env, 1.0 / 0.101), 0.101);
        CHECK_THAT(spectral_fwhm(to_spectrum(out)).thz, WithinRel(0.0176890, 0.01));
    }

    SECTION("lens/anti-lens composes to the identity") {
        const SampledEnvelope there = apply_quadratic_lens(env, 0.25);
        const SampledEnvelope back = apply_quadratic_lens(there, -0.25);
        CHECK(max_rel_diff(back.samples, env.samples) < 1e-12);
    }
}

TEST_CASE("sinusoidal EOM", "[elements]") {
    const SampledEnvelope env = reference_pulse();

    SECTION("zero depth is the identity") {
        const SinusoidalEom off{0.0, 0.01, 0.0, LensSign::focusing};
        CHECK(max_rel_diff(apply_sinusoidal_eom(env, off).samples, env.samples) == 0.0);
    }

    SECTION("quadratic limit: short pulse sees the parabolic region only") {
        const SinusoidalEom eom{25.7, 0.01, 0.0, LensSign::focusing};
        const double k = chirp_factor(0.01, 25.7);
        const double f_eom = spectral_fwhm(to_spectrum(apply_sinusoidal_eom(env, eom))).thz;
        const double f_lens = spectral_fwhm(to_spectrum(apply_quadratic_lens(env, k))).thz;
        CHECK(std::abs(f_eom - f_lens) / f_lens < 0.01);
    }

    SECTION("full compression chain shows quartic aberration above the ideal lens") {
        // source chosen so the chirped pulse fills the aperture (fill ~ 1)
        const SampledEnvelope src = reference_pulse(FwhmBandwidth{0.425});
        const double k = chirp_factor(0.01, 25.7);
        const SampledEnvelope chirped = apply_gdd(src, 1.0 / k);
        const double fill =
            aperture_fill_fraction(temporal_fwhm(chirped), 0.01, 25.7, 0.5);
        CHECK_THAT(fill, WithinAbs(1.0, 0.08));
        const double f_eom = spectral_fwhm(to_spectrum(apply_sinusoidal_eom(
                                               chirped, {25.7, 0.01, 0.0, LensSign::focusing})))
                                 .thz;
        const double f_lens =
            spectral_fwhm(to_spectrum(apply_quadratic_lens(chirped, k))).thz;
        INFO("aberrated " << f_eom * 1e3 << " GHz vs ideal " << f_lens * 1e3 << " GHz");
        CHECK(f_eom > f_lens);
    }

    SECTION("lens convergence: FWHM difference shrinks with aperture fill") {
        const double k = chirp_factor(0.01, 25.7);
        double prev_diff = 1e9;
        for (double dnu : {0.401, 0.2005, 0.10025}) {
            const SampledEnvelope src = reference_pulse(FwhmBandwidth{dnu});
            const SampledEnvelope chirped = apply_gdd(src, 1.0 / k);
            const double f_eom =
                spectral_fwhm(to_spectrum(apply_sinusoidal_eom(
                                  chirped, {25.7, 0.01, 0.0, LensSign::focusing})))
                    .thz;
            const double f_lens =
                spectral_fwhm(to_spectrum(apply_quadratic_lens(chirped, k))).thz;
            const double diff = std::abs(f_eom - f_lens) / f_lens;
            CHECK(diff < prev_diff);
            prev_diff = diff;
        }
    }

    SECTION("energy conserved") {
        const SinusoidalEom eom{25.7, 0.01, 0.0, LensSign::focusing};
        CHECK_THAT(energy(apply_sinusoidal_eom(env, eom)), WithinRel(energy(env), 1e-12));
    }
}

TEST_CASE("linear shear", "[elements]") {
    const SampledEnvelope env = reference_pulse();
    const double expected_shift = constants::two_pi * 25.7 * 0.01;  // 1.6148 rad/ps

    SECTION("up slope shifts the centroid by +2 pi A f_RF") {
        const SampledSpectrum spec =
            to_spectrum(apply_linear_shear(env, {25.7, 0.01, ShearSlope::up}));
        const double shift = spectral_centroid(spec).rad_per_ps - kCarrier.rad_per_ps;
        CHECK_THAT(shift, WithinRel(expected_shift, 0.005));
        // paper: 1.61 +- 0.14 x 10^12 rad/s, i.e. 1.61 rad/ps
        CHECK(std::abs(shift - 1.61) < 0.14);
    }

    SECTION("down slope mirrors the shift") {
        const double up = spectral_centroid(to_spectrum(apply_linear_shear(
                                                env, {25.7, 0.01, ShearSlope::up})))
                              .rad_per_ps -
                          kCarrier.rad_per_ps;
        const double down = spectral_centroid(to_spectrum(apply_linear_shear(
                                                  env, {25.7, 0.01, ShearSlope::down})))
                                .rad_per_ps -
                            kCarrier.rad_per_ps;
        CHECK_THAT(up + down, WithinAbs(0.0, 1e-9));
    }

    SECTION("wavelength shift at 830 nm") {
        const SampledSpectrum spec =
            to_spectrum(apply_linear_shear(env, {25.7, 0.01, ShearSlope::up}));
        const double shift = spectral_centroid(spec).rad_per_ps - kCarrier.rad_per_ps;
        const double dlambda =
            bandwidth_thz_to_nm(FwhmBandwidth{shift / constants::two_pi}, Wavelength{830.0});
        CHECK(std::abs(dlambda - 0.59) < 0.01);  // paper: 0.59 +- 0.05 nm
    }

    SECTION("long pulse gets a warning") {
        const SampledEnvelope slow =
            synthesize_gaussian(make_time_grid(16384, 0.08), kCarrier, FwhmBandwidth{0.02});
        const SampledEnvelope out = apply_linear_shear(slow, {25.7, 0.01, ShearSlope::up});
        CHECK(!out.warnings.empty());
        CHECK(apply_linear_shear(env, {25.7, 0.01, ShearSlope::up}).warnings.empty());
    }

    SECTION("energy conserved") {
        CHECK_THAT(energy(apply_linear_shear(env, {25.7, 0.01, ShearSlope::up})),
                   WithinRel(energy(env), 1e-12));
    }
}

TEST_CASE("gaussian filter", "[elements]") {
    const SampledEnvelope env = reference_pulse();

    SECTION("infinitely wide filter is the identity") {
        const GaussianFilter wide{WidthParam{1e12}, kCarrier};
        CHECK(max_rel_diff(apply_gaussian_filter(env, wide).samples, env.samples) < 1e-12);
    }

    SECTION("co-centered transmitted energy fraction") {
        // [1 + (dw/dw_F)^2]^(-1/2) with dw(401 GHz), dw_F(57 GHz) -> 0.14073
        const GaussianFilter f{fwhm_to_width_param(FwhmBandwidth{0.057}), kCarrier};
        CHECK_THAT(energy(apply_gaussian_filter(env, f)) / energy(env),
                   WithinRel(0.1407300, 5e-4));
    }

    SECTION("far-detuned filter transmits nothing") {
        const GaussianFilter far{fwhm_to_width_param(FwhmBandwidth{0.057}),
                                 AngularFrequency{kCarrier.rad_per_ps + 40.0}};
        CHECK(energy(apply_gaussian_filter(env, far)) < 1e-8);
    }

    SECTION("commutes with GDD (both diagonal in frequency)") {
        const GaussianFilter f{fwhm_to_width_param(FwhmBandwidth{0.2}), kCarrier};
        const SampledEnvelope a = apply_gaussian_filter(apply_gdd(env, 5.0), f);
        const SampledEnvelope b = apply_gdd(apply_gaussian_filter(env, f), 5.0);
        CHECK(max_rel_diff(a.samples, b.samples) < 1e-12);
    }
}

TEST_CASE("attenuator", "[elements]") {
    const SampledEnvelope env = reference_pulse();
    CHECK_THAT(energy(apply_attenuator(env, 0.27)), WithinRel(0.27 * energy(env), 1e-12));
    CHECK_THROWS_AS(apply_attenuator(env, 0.0), DomainError);
    CHECK_THROWS_AS(apply_attenuator(env, 1.2), DomainError);
}

TEST_CASE("aperture fill fraction", "[elements]") {
    // independently root-found: |A(cos u - 1 + u^2/2)| = 0.5 rad at u = 0.831403
    // for A = 25.7, i.e. an aperture of 26.46438 ps at 10 GHz
    CHECK_THAT(aperture_length(0.01, 25.7, 0.5), WithinRel(26.46438, 1e-6));

    SECTION("fraction is linear in duration and vanishes with it") {
        CHECK(aperture_fill_fraction(0.0, 0.01, 25.7, 0.5) == 0.0);
        const double one = aperture_fill_fraction(5.0, 0.01, 25.7, 0.5);
        CHECK_THAT(aperture_fill_fraction(10.0, 0.01, 25.7, 0.5), WithinRel(2.0 * one, 1e-12));
    }

    SECTION("huge tolerance caps at one period") {
        CHECK_THAT(aperture_length(0.01, 25.7, 1e6), WithinRel(100.0, 1e-12));
    }

    CHECK_THROWS_AS(aperture_length(0.01, 25.7, 0.0), DomainError);
    CHECK_THROWS_AS(aperture_fill_fraction(-1.0, 0.01, 25.7, 0.5), DomainError);
}

TEST_CASE("GDD/anti-GDD composes to the identity", "[elements]") {
    const SampledEnvelope env = reference_pulse();
    const SampledEnvelope back = apply_gdd(apply_gdd(env, 7.7), -7.7);
    CHECK(max_rel_diff(back.samples, env.samples) < 1e-12);
}

TEST_CASE("chain application", "[elements]") {
    const SampledEnvelope env = reference_pulse();
    const ElementChain chain{Gdd{1.0 / 0.101}, QuadraticLens{0.101}, Attenuator{0.27}};
    const SampledEnvelope out = apply_chain(env, chain);
    CHECK_THAT(energy(out), WithinRel(0.27, 1e-10));
    CHECK_THROWS_AS(apply_chain(env, ElementChain{}), DomainError);
}

TEST_CASE("sign convention self-test", "[elements]") {
    CHECK_NOTHROW(verify_sign_convention());
}
