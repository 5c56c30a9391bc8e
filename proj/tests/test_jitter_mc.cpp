#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <vector>

#include "timelens/jitter_mc.hpp"

using namespace timelens;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

const AngularFrequency kCarrier = wavelength_to_omega(Wavelength{830.0});

// Compact grid for per-shot work: span 655.36 ps, Nyquist 19.6 rad/ps.
SampledEnvelope mc_input() {
    return synthesize_gaussian(make_time_grid(4096, 0.16), kCarrier, FwhmBandwidth{0.401});
}

const ElementChain kCollimated{Gdd{1.0 / 0.101}, QuadraticLens{0.101}};

double ks_p_value(std::vector<double> samples, double sigma) {
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double d = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double cdf = 0.5 * std::erfc(-samples[i] / (sigma * std::sqrt(2.0)));
        const double lo = static_cast<double>(i) / n;
        const double hi = static_cast<double>(i + 1) / n;
        d = std::max({d, std::abs(cdf - lo), std::abs(cdf - hi)});
    }
    const double lambda = (std::sqrt(n) + 0.12 + 0.11 / std::sqrt(n)) * d;
    double q = 0.0;
    for (int j = 1; j <= 100; ++j)
        q += 2.0 * ((j % 2) ? 1.0 : -1.0) * std::exp(-2.0 * j * j * lambda * lambda);
    return std::clamp(q, 0.0, 1.0);
}

}  // namespace

TEST_CASE("zero jitter equals the single-shot chain for any seed", "[jitter_mc]") {
    const SampledEnvelope env = mc_input();
    const AveragedSpectrum a = averaged_spectrum(env, kCollimated, {5, 1, JitterModel{0.0}});
    const AveragedSpectrum b = averaged_spectrum(env, kCollimated, {5, 999, JitterModel{0.0}});
    REQUIRE(a.intensity.size() == b.intensity.size());
    for (std::size_t i = 0; i < a.intensity.size(); ++i)
        CHECK(a.intensity[i] == b.intensity[i]);

    const double direct = spectral_fwhm(to_spectrum(apply_chain(env, kCollimated))).thz;
    CHECK_THAT(a.fwhm().thz, WithinRel(direct, 1e-6));
}

TEST_CASE("same seed gives bit-identical output", "[jitter_mc]") {
    const SampledEnvelope env = mc_input();
    const McConfig cfg{64, 20260810, JitterModel{0.5}};
    const AveragedSpectrum a = averaged_spectrum(env, kCollimated, cfg);
    const AveragedSpectrum b = averaged_spectrum(env, kCollimated, cfg);
    REQUIRE(a.intensity.size() == b.intensity.size());
    CHECK(std::memcmp(a.intensity.data(), b.intensity.data(),
                      a.intensity.size() * sizeof(double)) == 0);
    CHECK(std::memcmp(a.std_error.data(), b.std_error.data(),
                      a.std_error.size() * sizeof(double)) == 0);
}

TEST_CASE("quadratic-lens average converges to the closed form", "[jitter_mc]") {
    const SampledEnvelope env = mc_input();
    const double expected = jittered_bandwidth(FwhmBandwidth{0.401}, 0.101, 0.5).thz;
    const AveragedSpectrum avg =
        averaged_spectrum(env, kCollimated, {20000, 42, JitterModel{0.5}});
    CHECK_THAT(avg.fwhm().thz, WithinRel(expected, 0.01));

    SECTION("incoherent average conserves energy") {
        CHECK_THAT(avg.total_energy(), WithinAbs(1.0, 1e-10));
    }

    SECTION("standard errors are positive and small against the peak") {
        const double peak = *std::max_element(avg.intensity.begin(), avg.intensity.end());
        const std::size_t j =
            static_cast<std::size_t>(std::max_element(avg.intensity.begin(), avg.intensity.end()) -
                                     avg.intensity.begin());
        CHECK(avg.std_error[j] > 0.0);
        CHECK(avg.std_error[j] < 0.05 * peak);
    }
}

TEST_CASE("fixed offset rigidly shifts the spectrum by K*tau", "[jitter_mc]") {
    const SampledEnvelope env = mc_input();
    const SampledEnvelope dispersed = apply_gdd(env, 1.0 / 0.101);
    const double k = 0.101;
    const double domega = env.grid.domega();
    const int bins = 40;
    const double tau = bins * domega / k;  // shift lands exactly on the grid

    const auto ref = spectral_intensity(to_spectrum(apply_quadratic_lens(dispersed, k, 0.0)));
    const auto shifted =
        spectral_intensity(to_spectrum(apply_quadratic_lens(dispersed, k, tau)));
    double peak = 0.0, diff = 0.0;
    for (std::size_t j = 0; j + bins < ref.size(); ++j) {
        peak = std::max(peak, ref[j]);
        diff = std::max(diff, std::abs(shifted[j + bins] - ref[j]));
    }
    CHECK(diff / peak < 1e-9);
}

TEST_CASE("Monte Carlo error scales like 1/sqrt(n)", "[jitter_mc]") {
    const SampledEnvelope env = mc_input();
    const double expected = jittered_bandwidth(FwhmBandwidth{0.401}, 0.101, 0.5).thz;
    for (std::size_t n : {std::size_t{1000}, std::size_t{10000}}) {
        const AveragedSpectrum avg =
            averaged_spectrum(env, kCollimated, {n, 7, JitterModel{0.5}});
        const double err = std::abs(avg.fwhm().thz - expected) / expected;
        CHECK(err < 0.01 * std::sqrt(1e5 / static_cast<double>(n)));
    }
}

TEST_CASE("timing-offset marginal passes a KS test against its Gaussian", "[jitter_mc]") {
    const JitterModel jitter{0.5};
    std::vector<double> taus(100000);
    for (std::size_t i = 0; i < taus.size(); ++i)
        taus[i] = jitter_offset(jitter, 31337, i);
    const double p = ks_p_value(std::move(taus), jitter.tau_std());
    INFO("KS p = " << p);
    CHECK(p > 0.01);
}

TEST_CASE("drift series", "[jitter_mc]") {
    const SampledEnvelope env =
        synthesize_gaussian(make_time_grid(2048, 0.16), kCarrier, FwhmBandwidth{0.401});

    SECTION("zero jitter gives a constant series") {
        const auto series = drift_series(env, kCollimated, JitterModel{0.0}, 16, 5);
        for (double c : series) CHECK(c == series.front());
    }

    SECTION("centroid mean converges to the carrier") {
        const std::size_t n = 10000;
        const auto series = drift_series(env, kCollimated, JitterModel{0.5}, n, 99);
        double mean = 0.0;
        for (double c : series) mean += c;
        mean /= static_cast<double>(n);
        double var = 0.0;
        for (double c : series) var += (c - mean) * (c - mean);
        var /= static_cast<double>(n - 1);
        const double se = std::sqrt(var / static_cast<double>(n));
        CHECK(std::abs(mean - kCarrier.rad_per_ps) < 3.0 * se);
    }

    SECTION("centroid spread equals K * T / sqrt(2)") {
        const std::size_t n = 100000;
        const JitterModel jitter{0.5};
        const auto series = drift_series(env, kCollimated, jitter, n, 2024);
        double mean = 0.0;
        for (double c : series) mean += c;
        mean /= static_cast<double>(n);
        double var = 0.0;
        for (double c : series) var += (c - mean) * (c - mean);
        var /= static_cast<double>(n - 1);
        CHECK_THAT(std::sqrt(var), WithinRel(0.101 * jitter.tau_std(), 0.02));
    }
}

TEST_CASE("chain validation", "[jitter_mc]") {
    const SampledEnvelope env = mc_input();
    CHECK_THROWS_AS(averaged_spectrum(env, {Gdd{9.9}}, {10, 1, JitterModel{0.5}}),
                    ConfigError);
    CHECK_THROWS_AS(averaged_spectrum(env, {QuadraticLens{0.1}, QuadraticLens{0.1}},
                                      {10, 1, JitterModel{0.5}}),
                    ConfigError);
    CHECK_THROWS_AS(averaged_spectrum(env, kCollimated, {0, 1, JitterModel{0.5}}),
                    ConfigError);
}
