#pragma once

//
// Shipped scenario presets, embedded so the CLI works from any directory.
// The same files are mirrored under presets/ for editing; a unit test keeps
// the two in sync.
//

#include <string>
#include <vector>

namespace timelens {

struct PresetDef {
    const char* name;
    const char* json_text;
};

inline constexpr const char* kPreset_compression_10ghz = R"__json__({
  "schema_version": 1,
  "name": "compression_10ghz",
  "description": "10 GHz bandwidth compressor: 0.9 nm pulses at 830 nm through 9.9 ps^2 of dispersion and a 25.7 rad sinusoidal lens. Measured references: initial 0.92 +- 0.06 nm (401 +- 26 GHz), compressed 0.15 +- 0.01 nm (65 +- 4 GHz), device transmission 0.27 +- 0.01. With timing jitter T = 0.5 ps the collimated closed form gives 22.2 GHz.",
  "source": { "lambda0_nm": 830.0, "fwhm_nm": 0.9 },
  "chain": [
    { "type": "gdd", "phi_ps2": 9.9 },
    { "type": "sinusoidal_eom", "depth_rad": 25.7, "f_rf_ghz": 10.0, "sign": "focusing" },
    { "type": "attenuator", "eta": 0.27 }
  ],
  "jitter": { "t_ps": 0.5, "n_samples": 10000, "seed": 1 },
  "absorber": { "fwhm_ghz": 57.0 },
  "measurement": { "irf_fwhm_nm": 0.07, "total_counts": 200000, "seed": 2 }
}
)__json__";

inline constexpr const char* kPreset_diverging_10ghz = R"__json__({
  "schema_version": 1,
  "name": "diverging_10ghz",
  "description": "Same 10 GHz compressor with the lens sign flipped: collimation becomes expansion, the temporal analogue of a diverging lens. The ideal quadratic lens gives 802 GHz; the measured reference is 1.45 +- 0.17 nm (631 +- 74 GHz), aperture and jitter limited.",
  "source": { "lambda0_nm": 830.0, "fwhm_nm": 0.92 },
  "chain": [
    { "type": "gdd", "phi_ps2": 9.9009901 },
    { "type": "quadratic_lens", "k_inv_ps2": -0.101 }
  ]
}
)__json__";

inline constexpr const char* kPreset_compression_40ghz = R"__json__({
  "schema_version": 1,
  "name": "compression_40ghz",
  "description": "40 GHz lens at 7.2 rad on 1.98 +- 0.08 nm pulses: 2.2 ps^2 of dispersion (56.5 m of HI-780 fiber). The ideal-lens closed form gives 37.1 GHz; the measured compressed bandwidth reference is 0.66 +- 0.04 nm, jitter and aperture limited.",
  "source": { "lambda0_nm": 830.0, "fwhm_nm": 1.98 },
  "chain": [
    { "type": "gdd", "phi_ps2": 2.2 },
    { "type": "sinusoidal_eom", "depth_rad": 7.2, "f_rf_ghz": 40.0, "sign": "focusing" }
  ],
  "jitter": { "t_ps": 0.5, "n_samples": 5000, "seed": 1 }
}
)__json__";

inline constexpr const char* kPreset_absorption_sweep = R"__json__({
  "schema_version": 1,
  "name": "absorption_sweep",
  "description": "Flux gain into a narrowband absorber across 820-860 nm, with the filter FWHM tracking the hardware from 0.13 to 0.16 nm. The compressor model is wavelength independent in frequency units; the residual slope comes from converting fixed nm bandwidths at each center wavelength. Reference at 830 nm: predicted ratio 1.8 +- 0.2, measured 2.0 +- 0.2.",
  "source": { "lambda0_nm": 830.0, "fwhm_nm": 0.92 },
  "chain": [
    { "type": "gdd", "phi_ps2": 9.9 },
    { "type": "quadratic_lens", "k_inv_ps2": 0.101 },
    { "type": "attenuator", "eta": 0.27 }
  ],
  "jitter": { "t_ps": 0.5, "n_samples": 1, "seed": 1 },
  "absorber": { "fwhm_nm_range": [0.13, 0.16] },
  "sweep": {
    "parameter": "source.lambda0_nm",
    "values": [820, 822, 824, 826, 828, 830, 832, 834, 836, 838, 840,
               842, 844, 846, 848, 850, 852, 854, 856, 858, 860]
  }
}
)__json__";

inline const std::vector<PresetDef>& presets() {
    static const std::vector<PresetDef> defs = {
        {"compression_10ghz", kPreset_compression_10ghz},
        {"diverging_10ghz", kPreset_diverging_10ghz},
        {"compression_40ghz", kPreset_compression_40ghz},
        {"absorption_sweep", kPreset_absorption_sweep},
    };
    return defs;
}

/// nullptr when no preset has that name.
inline const char* find_preset(const std::string& name) {
    for (const PresetDef& p : presets())
        if (name == p.name) return p.json_text;
    return nullptr;
}

}  // namespace timelens
