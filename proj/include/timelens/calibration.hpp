#pragma once

//
// Hardware-facing calculators: modulation-depth retrieval from a measured
// spectral shear, dispersion-to-fiber-length mapping, and transmission
// budgets, plus the key-value component catalog loader.
//

#include <cmath>
#include <cstddef>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "timelens/errors.hpp"
#include "timelens/units.hpp"

namespace timelens {

/// Default group-velocity dispersion of the single-mode fiber catalog entry,
/// ps^2/km (back-computed once from the 9.9 ps^2 / 256 m pairing).
inline constexpr double kDefaultBeta2Ps2PerKm = 38.7;

/// Modulation depth from the measured shear-induced wavelength shift:
/// A = dOmega / (2 pi f_RF) with dOmega = 2 pi c dLambda / lambda0^2.
inline double modulation_depth_from_shift(double dlambda_nm, Wavelength lambda0,
                                          double f_rf_thz) {
    detail::require(std::isfinite(dlambda_nm) && dlambda_nm > 0.0,
                    "modulation_depth_from_shift: wavelength shift must be positive");
    detail::require(std::isfinite(f_rf_thz) && f_rf_thz > 0.0,
                    "modulation_depth_from_shift: drive frequency must be positive");
    const double domega = constants::two_pi * bandwidth_nm_to_thz(dlambda_nm, lambda0).thz;
    return domega / (constants::two_pi * f_rf_thz);
}

/// Fiber length (meters) delivering the requested GDD at dispersion beta2.
inline double fiber_length_for_gdd(double phi_ps2, double beta2_ps2_per_km) {
    detail::require(std::isfinite(phi_ps2), "fiber_length_for_gdd: GDD must be finite");
    detail::require(std::isfinite(beta2_ps2_per_km) && beta2_ps2_per_km != 0.0,
                    "fiber_length_for_gdd: dispersion must be non-zero");
    if (phi_ps2 == 0.0) return 0.0;
    const double km = phi_ps2 / beta2_ps2_per_km;
    if (km < 0.0)
        throw DomainError("fiber_length_for_gdd: GDD and fiber dispersion have opposite signs");
    return km * 1000.0;
}

struct LossBudget {
    double fiber_length_m = 0.0;
    double fiber_loss_db_per_km = 0.0;
    std::vector<std::pair<std::string, double>> device_transmissions;
    int connector_interfaces = 0;
    double connector_loss_db = 0.0;
};

inline double total_transmission(const LossBudget& budget) {
    detail::require(budget.fiber_length_m >= 0.0 && budget.fiber_loss_db_per_km >= 0.0 &&
                        budget.connector_interfaces >= 0 && budget.connector_loss_db >= 0.0,
                    "total_transmission: losses must be non-negative");
    const double db = budget.fiber_length_m / 1000.0 * budget.fiber_loss_db_per_km +
                      budget.connector_interfaces * budget.connector_loss_db;
    double eta = std::pow(10.0, -db / 10.0);
    for (const auto& [label, t] : budget.device_transmissions) {
        detail::require(std::isfinite(t) && t > 0.0 && t <= 1.0,
                        "total_transmission: device '" + label + "' transmission must be in (0, 1]");
        eta *= t;
    }
    return eta;
}

// --------------------------------------------------------------------------
// component catalog: flat "key = value" text, '#' comments

class ComponentCatalog {
public:
    static ComponentCatalog load(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw IoError("component catalog: cannot open '" + path + "'");
        ComponentCatalog cat;
        std::string line;
        std::size_t line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            const auto hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            const auto strip = [](std::string s) {
                const auto a = s.find_first_not_of(" \t\r");
                if (a == std::string::npos) return std::string{};
                const auto b = s.find_last_not_of(" \t\r");
                return s.substr(a, b - a + 1);
            };
            if (strip(line).empty()) continue;
            const auto eq = line.find('=');
            if (eq == std::string::npos)
                throw ConfigError("component catalog: line " + std::to_string(line_no) +
                                  " is not 'key = value'");
            const std::string key = strip(line.substr(0, eq));
            const std::string value = strip(line.substr(eq + 1));
            if (key.empty())
                throw ConfigError("component catalog: empty key at line " +
                                  std::to_string(line_no));
            try {
                std::size_t used = 0;
                const double v = std::stod(value, &used);
                if (used != value.size()) throw std::invalid_argument(value);
                if (!cat.values_.emplace(key, v).second)
                    throw ConfigError("component catalog: duplicate key '" + key + "' at line " +
                                      std::to_string(line_no));
            } catch (const std::invalid_argument&) {
                throw ConfigError("component catalog: non-numeric value '" + value +
                                  "' for key '" + key + "' at line " + std::to_string(line_no));
            }
        }
        return cat;
    }

    double get(const std::string& key) const {
        const auto it = values_.find(key);
        if (it == values_.end())
            throw ConfigError("component catalog: missing key '" + key + "'");
        return it->second;
    }

    bool has(const std::string& key) const { return values_.count(key) != 0; }
    const std::map<std::string, double>& entries() const { return values_; }

private:
    std::map<std::string, double> values_;
};

}  // namespace timelens
