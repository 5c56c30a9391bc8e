#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>

#include "timelens/calibration.hpp"
#include "timelens/elements.hpp"
#include "timelens/envelope.hpp"

using namespace timelens;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("modulation depth from the measured shear", "[calibration]") {
    const double a = modulation_depth_from_shift(0.59, Wavelength{830.0}, 0.01);
    CHECK_THAT(a, WithinRel(25.67536, 1e-5));
    CHECK(std::abs(a - 25.7) < 2.2);  // paper: 25.7 +- 2.2 rad

    SECTION("linear in the shift") {
        CHECK_THAT(modulation_depth_from_shift(1.18, Wavelength{830.0}, 0.01),
                   WithinRel(2.0 * a, 1e-12));
    }

    SECTION("implied collimation GDD lands on the paper value") {
        const double phi = collimation_gdd(chirp_factor(0.01, a));
        CHECK_THAT(phi, WithinRel(9.865605, 1e-5));
        CHECK(std::abs(phi - 9.9) < 0.9);  // paper: 9.9 +- 0.9 ps^2
    }

    CHECK_THROWS_AS(modulation_depth_from_shift(0.0, Wavelength{830.0}, 0.01), DomainError);
    CHECK_THROWS_AS(modulation_depth_from_shift(0.59, Wavelength{830.0}, 0.0), DomainError);
}

TEST_CASE("calibration loop closes through the shear simulation", "[calibration]") {
    const double a = modulation_depth_from_shift(0.59, Wavelength{830.0}, 0.01);
    const AngularFrequency carrier = wavelength_to_omega(Wavelength{830.0});
    const SampledEnvelope env =
        synthesize_gaussian(make_time_grid(16384, 0.08), carrier, FwhmBandwidth{0.39166});
    const SampledSpectrum spec =
        to_spectrum(apply_linear_shear(env, {a, 0.01, ShearSlope::up}));
    const double shift = spectral_centroid(spec).rad_per_ps - carrier.rad_per_ps;
    const double dlambda =
        bandwidth_thz_to_nm(FwhmBandwidth{shift / constants::two_pi}, Wavelength{830.0});
    CHECK_THAT(dlambda, WithinRel(0.59, 0.005));
}

TEST_CASE("fiber length for a target GDD", "[calibration]") {
    CHECK_THAT(fiber_length_for_gdd(9.9, kDefaultBeta2Ps2PerKm), WithinRel(255.814, 1e-4));
    CHECK(std::abs(fiber_length_for_gdd(9.9, kDefaultBeta2Ps2PerKm) - 256.0) < 1.0);

    SECTION("40 GHz case within 1% of the installed 56.5 m") {
        const double l = fiber_length_for_gdd(collimation_gdd(chirp_factor(0.04, 7.2)),
                                              kDefaultBeta2Ps2PerKm);
        CHECK_THAT(l, WithinRel(56.8168, 1e-4));
        CHECK(std::abs(l - 56.5) / 56.5 < 0.01);
    }

    CHECK(fiber_length_for_gdd(0.0, kDefaultBeta2Ps2PerKm) == 0.0);
    CHECK_THROWS_AS(fiber_length_for_gdd(9.9, -38.7), DomainError);
    CHECK_THROWS_AS(fiber_length_for_gdd(9.9, 0.0), DomainError);
    // anomalous-dispersion pairing is fine as long as signs agree
    CHECK_THAT(fiber_length_for_gdd(-9.9, -38.7), WithinRel(255.814, 1e-4));
}

TEST_CASE("transmission budget", "[calibration]") {
    const LossBudget paper{256.0, 3.4, {{"eom", 0.39}}, 2, 0.3};

    SECTION("paper budget total") {
        const double eta = total_transmission(paper);
        CHECK_THAT(eta, WithinRel(0.2779871, 1e-5));
        CHECK(std::abs(eta - 0.28) < 0.04);  // paper estimate 0.28 +- 0.04
        CHECK(std::abs(eta - 0.27) < 0.02);  // consistent with measured 0.27 +- 0.01
    }

    SECTION("fiber-only factor") {
        const LossBudget fiber_only{256.0, 3.4, {}, 0, 0.0};
        const double eta = total_transmission(fiber_only);
        CHECK_THAT(eta, WithinRel(0.8183894, 1e-6));
        CHECK(std::abs(eta - 0.82) / 0.82 < 0.01);  // paper quotes 0.82
    }

    SECTION("empty budget transmits everything") {
        CHECK(total_transmission(LossBudget{}) == 1.0);
    }

    SECTION("multiplicative under concatenation") {
        const LossBudget fiber{256.0, 3.4, {}, 0, 0.0};
        const LossBudget rest{0.0, 0.0, {{"eom", 0.39}}, 2, 0.3};
        CHECK_THAT(total_transmission(fiber) * total_transmission(rest),
                   WithinRel(total_transmission(paper), 1e-12));
    }

    SECTION("invalid device transmission") {
        const LossBudget bad{0.0, 0.0, {{"dev", 1.7}}, 0, 0.0};
        CHECK_THROWS_AS(total_transmission(bad), DomainError);
    }
}

TEST_CASE("component catalog", "[calibration]") {
    const std::string path = "test_catalog.tmp";

    SECTION("parses keys, values and comments") {
        {
            std::ofstream out(path);
            out << "# fibers\n"
                << "fiber.hi780.loss_db_per_km = 3.4\n"
                << "fiber.hi780.beta2_ps2_per_km = 38.7   # back-computed\n"
                << "\n"
                << "eom.ln_wg_10ghz.transmission = 0.39\n";
        }
        const ComponentCatalog cat = ComponentCatalog::load(path);
        CHECK(cat.get("fiber.hi780.loss_db_per_km") == 3.4);
        CHECK(cat.get("fiber.hi780.beta2_ps2_per_km") == 38.7);
        CHECK(cat.has("eom.ln_wg_10ghz.transmission"));
        CHECK_THROWS_AS(cat.get("no.such.key"), ConfigError);
        std::remove(path.c_str());
    }

    SECTION("rejects malformed lines") {
        {
            std::ofstream out(path);
            out << "fiber.hi780.loss_db_per_km 3.4\n";
        }
        CHECK_THROWS_AS(ComponentCatalog::load(path), ConfigError);
        {
            std::ofstream out(path);
            out << "fiber.x = not_a_number\n";
        }
        CHECK_THROWS_AS(ComponentCatalog::load(path), ConfigError);
        {
            std::ofstream out(path);
            out << "a = 1\na = 2\n";
        }
        CHECK_THROWS_AS(ComponentCatalog::load(path), ConfigError);
        std::remove(path.c_str());
    }

    SECTION("missing file is an I/O error") {
        CHECK_THROWS_AS(ComponentCatalog::load("does_not_exist.catalog"), IoError);
    }

    SECTION("shipped catalog carries the default components") {
        const ComponentCatalog cat =
            ComponentCatalog::load(std::string(TIMELENS_SOURCE_DIR) + "/data/components.catalog");
        CHECK(cat.get("fiber.hi780.beta2_ps2_per_km") == kDefaultBeta2Ps2PerKm);
        CHECK(cat.get("fiber.hi780.loss_db_per_km") == 3.4);
        CHECK(cat.get("eom.ln_wg_10ghz.transmission") == 0.39);
        CHECK(cat.get("connector.fc_pc.loss_db") == 0.3);
    }
}
