#pragma once

//
// Config-driven experiment runner: parses a scenario description, executes
// the sampled (FFT), exact-Gaussian and Monte Carlo channels, and emits
// comparison reports, CSV spectra and an optional vector plot.
//
// Scenario files are strict JSON: unknown keys are hard errors. The schema
// is documented in the repository README; shipped presets are embedded in
// presets.hpp and mirrored under presets/.
//

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "timelens/absorber.hpp"
#include "timelens/calibration.hpp"
#include "timelens/elements.hpp"
#include "timelens/envelope.hpp"
#include "timelens/errors.hpp"
#include "timelens/gaussian.hpp"
#include "timelens/jitter_mc.hpp"
#include "timelens/measurement.hpp"
#include "timelens/units.hpp"

namespace timelens {

using Json = nlohmann::json;

// --------------------------------------------------------------------------
// scenario description

struct SourceSpec {
    double lambda0_nm = 830.0;
    double fwhm_nm = 0.9;
};

struct FilterSpec {
    double fwhm_ghz = 0.0;
    double center_detuning_rad_per_ps = 0.0;
};

struct JitterSpec {
    double t_ps = 0.0;
    std::size_t n_samples = 1;
    std::uint64_t seed = 1;
};

struct AbsorberScenarioSpec {
    std::optional<double> fwhm_ghz;
    std::optional<double> fwhm_nm;
    std::optional<std::pair<double, double>> fwhm_nm_range;  // interpolated over the sweep
    double center_detuning_rad_per_ps = 0.0;
};

struct MeasurementSpec {
    std::optional<double> irf_fwhm_nm;
    std::optional<std::string> irf_file;
    std::optional<std::uint64_t> total_counts;
    std::uint64_t seed = 1;
};

struct GridSpec {
    std::size_t n_samples = std::size_t{1} << 16;
    double dt_ps = 0.02;
};

struct SweepSpec {
    std::string parameter;
    std::vector<double> values;
};

struct Scenario {
    int schema_version = 1;
    std::string name;
    std::string description;
    SourceSpec source;
    std::optional<FilterSpec> pre_filter;
    ElementChain chain;
    std::optional<JitterSpec> jitter;
    std::optional<AbsorberScenarioSpec> absorber;
    std::optional<MeasurementSpec> measurement;
    GridSpec grid;
    std::optional<SweepSpec> sweep;
};

// --------------------------------------------------------------------------
// strict JSON helpers

namespace detail {

inline void check_keys(const Json& obj, const std::string& path,
                       std::initializer_list<const char*> allowed) {
    for (const auto& [key, value] : obj.items()) {
        bool known = false;
        for (const char* a : allowed)
            if (key == a) {
                known = true;
                break;
            }
        if (!known)
            throw ConfigError("scenario: unknown key '" + key + "' in " + path);
    }
}

inline const Json& require_key(const Json& obj, const std::string& path, const char* key) {
    const auto it = obj.find(key);
    if (it == obj.end())
        throw ConfigError("scenario: missing mandatory key '" + std::string(key) + "' in " +
                          path);
    return *it;
}

inline double as_number(const Json& v, const std::string& path) {
    if (!v.is_number()) throw ConfigError("scenario: " + path + " must be a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw ConfigError("scenario: " + path + " must be finite");
    return d;
}

inline std::uint64_t as_uint(const Json& v, const std::string& path) {
    if (!v.is_number_unsigned())
        throw ConfigError("scenario: " + path + " must be a non-negative integer");
    return v.get<std::uint64_t>();
}

inline std::string as_string(const Json& v, const std::string& path) {
    if (!v.is_string()) throw ConfigError("scenario: " + path + " must be a string");
    return v.get<std::string>();
}

inline OpticalElement parse_element(const Json& e, const std::string& path,
                                    AngularFrequency carrier) {
    if (!e.is_object()) throw ConfigError("scenario: " + path + " must be an object");
    const std::string type = as_string(require_key(e, path, "type"), path + ".type");
    if (type == "gdd") {
        check_keys(e, path, {"type", "phi_ps2"});
        return Gdd{as_number(require_key(e, path, "phi_ps2"), path + ".phi_ps2")};
    }
    if (type == "quadratic_lens") {
        check_keys(e, path, {"type", "k_inv_ps2"});
        return QuadraticLens{as_number(require_key(e, path, "k_inv_ps2"), path + ".k_inv_ps2")};
    }
    if (type == "sinusoidal_eom") {
        check_keys(e, path, {"type", "depth_rad", "f_rf_ghz", "t0_ps", "sign"});
        SinusoidalEom eom;
        eom.depth_rad = as_number(require_key(e, path, "depth_rad"), path + ".depth_rad");
        eom.f_rf_thz = as_number(require_key(e, path, "f_rf_ghz"), path + ".f_rf_ghz") * 1e-3;
        eom.t0_ps = e.contains("t0_ps") ? as_number(e["t0_ps"], path + ".t0_ps") : 0.0;
        const std::string sign = as_string(require_key(e, path, "sign"), path + ".sign");
        if (sign == "focusing")
            eom.sign = LensSign::focusing;
        else if (sign == "diverging")
            eom.sign = LensSign::diverging;
        else
            throw ConfigError("scenario: " + path + ".sign must be 'focusing' or 'diverging'");
        return eom;
    }
    if (type == "linear_shear") {
        check_keys(e, path, {"type", "depth_rad", "f_rf_ghz", "slope"});
        LinearShear shear;
        shear.depth_rad = as_number(require_key(e, path, "depth_rad"), path + ".depth_rad");
        shear.f_rf_thz = as_number(require_key(e, path, "f_rf_ghz"), path + ".f_rf_ghz") * 1e-3;
        const std::string slope = as_string(require_key(e, path, "slope"), path + ".slope");
        if (slope == "up")
            shear.slope = ShearSlope::up;
        else if (slope == "down")
            shear.slope = ShearSlope::down;
        else
            throw ConfigError("scenario: " + path + ".slope must be 'up' or 'down'");
        return shear;
    }
    if (type == "gaussian_filter") {
        check_keys(e, path, {"type", "fwhm_ghz", "center_detuning_rad_per_ps"});
        const double fwhm_ghz = as_number(require_key(e, path, "fwhm_ghz"), path + ".fwhm_ghz");
        if (fwhm_ghz <= 0.0)
            throw ConfigError("scenario: " + path + ".fwhm_ghz must be positive");
        const double det = e.contains("center_detuning_rad_per_ps")
                               ? as_number(e["center_detuning_rad_per_ps"],
                                           path + ".center_detuning_rad_per_ps")
                               : 0.0;
        return GaussianFilter{fwhm_to_width_param(FwhmBandwidth{fwhm_ghz * 1e-3}),
                              AngularFrequency{carrier.rad_per_ps + det}};
    }
    if (type == "attenuator") {
        check_keys(e, path, {"type", "eta"});
        const double eta = as_number(require_key(e, path, "eta"), path + ".eta");
        if (!(eta > 0.0 && eta <= 1.0))
            throw ConfigError("scenario: " + path + ".eta must be in (0, 1]");
        return Attenuator{eta};
    }
    throw ConfigError("scenario: " + path + ".type '" + type + "' is not a known element");
}

}  // namespace detail

// --------------------------------------------------------------------------
// parsing

inline Scenario parse_scenario_json(const Json& j, const std::string& name_hint) {
    if (!j.is_object()) throw ConfigError("scenario: top level must be a JSON object");
    detail::check_keys(j, "scenario",
                       {"schema_version", "name", "description", "source", "pre_filter", "chain",
                        "jitter", "absorber", "measurement", "grid", "sweep"});

    Scenario s;
    const Json& version = detail::require_key(j, "scenario", "schema_version");
    if (!version.is_number_integer() || version.get<int>() != 1)
        throw ConfigError("scenario: schema_version must be the integer 1");
    s.schema_version = 1;
    s.name = j.contains("name") ? detail::as_string(j["name"], "name") : name_hint;
    if (s.name.empty()) s.name = "scenario";
    if (j.contains("description"))
        s.description = detail::as_string(j["description"], "description");

    const Json& src = detail::require_key(j, "scenario", "source");
    detail::check_keys(src, "source", {"lambda0_nm", "fwhm_nm"});
    s.source.lambda0_nm =
        detail::as_number(detail::require_key(src, "source", "lambda0_nm"), "source.lambda0_nm");
    s.source.fwhm_nm =
        detail::as_number(detail::require_key(src, "source", "fwhm_nm"), "source.fwhm_nm");
    if (s.source.lambda0_nm <= 0.0 || s.source.fwhm_nm <= 0.0)
        throw ConfigError("scenario: source wavelength and bandwidth must be positive");
    const AngularFrequency carrier = wavelength_to_omega(Wavelength{s.source.lambda0_nm});

    if (j.contains("pre_filter")) {
        const Json& pf = j["pre_filter"];
        detail::check_keys(pf, "pre_filter", {"fwhm_ghz", "center_detuning_rad_per_ps"});
        FilterSpec spec;
        spec.fwhm_ghz = detail::as_number(detail::require_key(pf, "pre_filter", "fwhm_ghz"),
                                          "pre_filter.fwhm_ghz");
        if (spec.fwhm_ghz <= 0.0)
            throw ConfigError("scenario: pre_filter.fwhm_ghz must be positive");
        if (pf.contains("center_detuning_rad_per_ps"))
            spec.center_detuning_rad_per_ps = detail::as_number(
                pf["center_detuning_rad_per_ps"], "pre_filter.center_detuning_rad_per_ps");
        s.pre_filter = spec;
    }

    const Json& chain = detail::require_key(j, "scenario", "chain");
    if (!chain.is_array() || chain.empty())
        throw ConfigError("scenario: chain must be a non-empty array");
    for (std::size_t i = 0; i < chain.size(); ++i)
        s.chain.push_back(detail::parse_element(
            chain[i], "chain[" + std::to_string(i) + "]", carrier));

    if (j.contains("jitter")) {
        const Json& jit = j["jitter"];
        detail::check_keys(jit, "jitter", {"t_ps", "n_samples", "seed"});
        JitterSpec spec;
        spec.t_ps = detail::as_number(detail::require_key(jit, "jitter", "t_ps"), "jitter.t_ps");
        if (spec.t_ps < 0.0) throw ConfigError("scenario: jitter.t_ps must be non-negative");
        spec.n_samples = detail::as_uint(detail::require_key(jit, "jitter", "n_samples"),
                                         "jitter.n_samples");
        if (spec.n_samples < 1)
            throw ConfigError("scenario: jitter.n_samples must be at least 1");
        spec.seed = jit.contains("seed") ? detail::as_uint(jit["seed"], "jitter.seed") : 1;
        s.jitter = spec;
    }

    if (j.contains("absorber")) {
        const Json& ab = j["absorber"];
        detail::check_keys(ab, "absorber",
                           {"fwhm_ghz", "fwhm_nm", "fwhm_nm_range", "center_detuning_rad_per_ps"});
        AbsorberScenarioSpec spec;
        int forms = 0;
        if (ab.contains("fwhm_ghz")) {
            spec.fwhm_ghz = detail::as_number(ab["fwhm_ghz"], "absorber.fwhm_ghz");
            ++forms;
        }
        if (ab.contains("fwhm_nm")) {
            spec.fwhm_nm = detail::as_number(ab["fwhm_nm"], "absorber.fwhm_nm");
            ++forms;
        }
        if (ab.contains("fwhm_nm_range")) {
            const Json& r = ab["fwhm_nm_range"];
            if (!r.is_array() || r.size() != 2)
                throw ConfigError("scenario: absorber.fwhm_nm_range must be [low, high]");
            spec.fwhm_nm_range = {detail::as_number(r[0], "absorber.fwhm_nm_range[0]"),
                                  detail::as_number(r[1], "absorber.fwhm_nm_range[1]")};
            if (!j.contains("sweep"))
                throw ConfigError("scenario: absorber.fwhm_nm_range requires a sweep");
            ++forms;
        }
        if (forms != 1)
            throw ConfigError(
                "scenario: absorber needs exactly one of fwhm_ghz, fwhm_nm, fwhm_nm_range");
        if (ab.contains("center_detuning_rad_per_ps"))
            spec.center_detuning_rad_per_ps = detail::as_number(
                ab["center_detuning_rad_per_ps"], "absorber.center_detuning_rad_per_ps");
        s.absorber = spec;
    }

    if (j.contains("measurement")) {
        const Json& m = j["measurement"];
        detail::check_keys(m, "measurement", {"irf_fwhm_nm", "irf_file", "total_counts", "seed"});
        MeasurementSpec spec;
        if (m.contains("irf_fwhm_nm"))
            spec.irf_fwhm_nm = detail::as_number(m["irf_fwhm_nm"], "measurement.irf_fwhm_nm");
        if (m.contains("irf_file"))
            spec.irf_file = detail::as_string(m["irf_file"], "measurement.irf_file");
        if (spec.irf_fwhm_nm.has_value() == spec.irf_file.has_value())
            throw ConfigError(
                "scenario: measurement needs exactly one of irf_fwhm_nm, irf_file");
        if (m.contains("total_counts"))
            spec.total_counts = detail::as_uint(m["total_counts"], "measurement.total_counts");
        if (m.contains("seed")) spec.seed = detail::as_uint(m["seed"], "measurement.seed");
        s.measurement = spec;
    }

    if (j.contains("grid")) {
        const Json& g = j["grid"];
        detail::check_keys(g, "grid", {"n_samples", "dt_ps"});
        if (g.contains("n_samples"))
            s.grid.n_samples =
                static_cast<std::size_t>(detail::as_uint(g["n_samples"], "grid.n_samples"));
        if (g.contains("dt_ps")) s.grid.dt_ps = detail::as_number(g["dt_ps"], "grid.dt_ps");
    }

    if (j.contains("sweep")) {
        const Json& sw = j["sweep"];
        detail::check_keys(sw, "sweep", {"parameter", "values"});
        SweepSpec spec;
        spec.parameter =
            detail::as_string(detail::require_key(sw, "sweep", "parameter"), "sweep.parameter");
        static const std::vector<std::string> kSweepable = {
            "source.lambda0_nm", "source.fwhm_nm", "jitter.t_ps", "absorber.fwhm_ghz",
            "absorber.fwhm_nm"};
        if (std::find(kSweepable.begin(), kSweepable.end(), spec.parameter) == kSweepable.end())
            throw ConfigError("scenario: sweep.parameter '" + spec.parameter +
                              "' is not sweepable");
        const Json& values = detail::require_key(sw, "sweep", "values");
        if (!values.is_array() || values.size() < 2)
            throw ConfigError("scenario: sweep.values needs at least 2 entries");
        for (std::size_t i = 0; i < values.size(); ++i)
            spec.values.push_back(
                detail::as_number(values[i], "sweep.values[" + std::to_string(i) + "]"));
        s.sweep = spec;
    }
    return s;
}

inline Scenario parse_scenario_text(const std::string& text, const std::string& name_hint) {
    Json j;
    try {
        j = Json::parse(text);
    } catch (const Json::parse_error& e) {
        throw ConfigError(std::string("scenario: JSON parse error: ") + e.what());
    }
    return parse_scenario_json(j, name_hint);
}

inline Scenario parse_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("scenario: cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario_text(buf.str(), std::filesystem::path(path).stem().string());
}

// --------------------------------------------------------------------------
// run report

struct SpectrumArtifact {
    std::string label;
    std::vector<double> detuning_rad_per_ps;
    std::vector<double> wavelength_nm;
    std::vector<double> intensity;
    std::vector<double> std_error;        // MC channel only
    std::vector<std::uint64_t> counts;    // measured channel only
};

struct PointReport {
    std::optional<double> swept_value;
    std::optional<double> fwhm_initial_ghz;
    std::optional<double> fwhm_numeric_ghz;
    std::optional<double> fwhm_analytic_ghz;
    std::optional<double> fwhm_mc_ghz;
    std::optional<double> fwhm_measured_ghz;
    std::optional<double> compression_numeric;
    std::optional<double> compression_analytic;
    std::optional<double> compression_apparent;
    std::optional<double> aperture_fill;
    std::optional<double> eta_chain;
    std::optional<double> flux_ratio_analytic;
    std::optional<double> flux_ratio_numeric;
    std::vector<std::string> warnings;
    std::vector<std::string> notes;
};

struct RunReport {
    std::string scenario_name;
    std::string description;
    std::vector<PointReport> points;
    std::vector<SpectrumArtifact> spectra;       // non-sweep runs only
    std::vector<std::string> artifact_files;
};

struct RunOptions {
    std::string out_dir = ".";
    std::optional<std::uint64_t> seed;           // overrides jitter + measurement seeds
    std::optional<std::size_t> grid_points;      // overrides grid.n_samples
    bool plot = false;
    bool ideal_lens = false;                     // replace sinusoidal lenses by quadratic ones
    bool no_jitter = false;                      // skip the Monte Carlo channel
    bool write_files = true;
};

// --------------------------------------------------------------------------
// artifact writers

namespace detail {

inline std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

/// Index range where the intensity rises above 1e-12 of its peak, padded.
inline std::pair<std::size_t, std::size_t> informative_range(const std::vector<double>& y) {
    double peak = 0.0;
    for (double v : y) peak = std::max(peak, v);
    if (!(peak > 0.0)) return {0, y.size()};
    const double limit = 1e-12 * peak;
    std::size_t lo = 0, hi = y.size() - 1;
    while (lo < hi && y[lo] < limit) ++lo;
    while (hi > lo && y[hi] < limit) --hi;
    const std::size_t pad = std::max<std::size_t>(8, (hi - lo) / 20);
    lo = lo > pad ? lo - pad : 0;
    hi = std::min(y.size() - 1, hi + pad);
    return {lo, hi + 1};
}

inline void write_spectrum_csv(const std::string& path, const SpectrumArtifact& art) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write '" + path + "'");
    out << "detuning_rad_per_ps,wavelength_nm,intensity";
    if (!art.counts.empty()) out << ",counts";
    if (!art.std_error.empty()) out << ",stderr";
    out << "\n";
    const auto [lo, hi] = informative_range(art.intensity);
    for (std::size_t i = lo; i < hi; ++i) {
        out << fmt_double(art.detuning_rad_per_ps[i]) << ',' << fmt_double(art.wavelength_nm[i])
            << ',' << fmt_double(art.intensity[i]);
        if (!art.counts.empty()) out << ',' << art.counts[i];
        if (!art.std_error.empty()) out << ',' << fmt_double(art.std_error[i]);
        out << "\n";
    }
    if (!out) throw IoError("failed while writing '" + path + "'");
}

inline void add_optional(Json& j, const char* key, const std::optional<double>& v) {
    if (v) j[key] = *v;
}

inline Json point_to_json(const PointReport& p) {
    Json j = Json::object();
    add_optional(j, "swept_value", p.swept_value);
    add_optional(j, "fwhm_initial_ghz", p.fwhm_initial_ghz);
    add_optional(j, "fwhm_numeric_ghz", p.fwhm_numeric_ghz);
    add_optional(j, "fwhm_analytic_ghz", p.fwhm_analytic_ghz);
    add_optional(j, "fwhm_mc_ghz", p.fwhm_mc_ghz);
    add_optional(j, "fwhm_measured_ghz", p.fwhm_measured_ghz);
    add_optional(j, "compression_numeric", p.compression_numeric);
    add_optional(j, "compression_analytic", p.compression_analytic);
    add_optional(j, "compression_apparent", p.compression_apparent);
    add_optional(j, "aperture_fill", p.aperture_fill);
    add_optional(j, "eta_chain", p.eta_chain);
    add_optional(j, "flux_ratio_analytic", p.flux_ratio_analytic);
    add_optional(j, "flux_ratio_numeric", p.flux_ratio_numeric);
    if (!p.warnings.empty()) j["warnings"] = p.warnings;
    if (!p.notes.empty()) j["notes"] = p.notes;
    return j;
}

}  // namespace detail

inline Json report_to_json(const RunReport& report) {
    Json j = Json::object();
    j["scenario"] = report.scenario_name;
    if (!report.description.empty()) j["description"] = report.description;
    Json points = Json::array();
    for (const PointReport& p : report.points) points.push_back(detail::point_to_json(p));
    j["points"] = std::move(points);
    if (!report.artifact_files.empty()) j["artifacts"] = report.artifact_files;
    return j;
}

/// Overlaid normalized spectra as a standalone SVG; deterministic bytes for
/// identical inputs.
inline void emit_plot(const RunReport& report, const std::string& path) {
    if (report.spectra.empty())
        throw DomainError("emit_plot: report contains no spectra");

    const double width = 880.0, height = 520.0;
    const double ml = 64.0, mr = 20.0, mt = 28.0, mb = 48.0;

    double x_min = 1e300, x_max = -1e300;
    for (const SpectrumArtifact& s : report.spectra) {
        double peak = 0.0;
        for (double v : s.intensity) peak = std::max(peak, v);
        for (std::size_t i = 0; i < s.intensity.size(); ++i) {
            if (s.intensity[i] >= 1e-3 * peak) {
                x_min = std::min(x_min, s.wavelength_nm[i]);
                x_max = std::max(x_max, s.wavelength_nm[i]);
            }
        }
    }
    const double pad = 0.08 * (x_max - x_min);
    x_min -= pad;
    x_max += pad;

    const auto color_for = [](const std::string& label) -> const char* {
        if (label == "initial") return "#e08214";
        if (label == "output") return "#2a9640";
        if (label == "analytic") return "#777777";
        if (label == "mc_average") return "#3465c8";
        if (label == "measured") return "#9646b4";
        return "#222222";
    };

    std::ostringstream svg;
    svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"880\" height=\"520\" "
           "viewBox=\"0 0 880 520\">\n"
        << "<rect width=\"880\" height=\"520\" fill=\"white\"/>\n"
        << "<g stroke=\"#333333\" stroke-width=\"1\" fill=\"none\">"
        << "<path d=\"M " << ml << ' ' << mt << " L " << ml << ' ' << height - mb << " L "
        << width - mr << ' ' << height - mb << "\"/></g>\n";

    char buf[64];
    for (int tick = 0; tick <= 4; ++tick) {
        const double x = x_min + (x_max - x_min) * tick / 4.0;
        const double px = ml + (width - ml - mr) * tick / 4.0;
        std::snprintf(buf, sizeof(buf), "%.3f", x);
        svg << "<text x=\"" << px << "\" y=\"" << height - mb + 18.0
            << "\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\">" << buf
            << "</text>\n";
    }
    svg << "<text x=\"" << (ml + width - mr) / 2.0 << "\" y=\"" << height - 10.0
        << "\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\">wavelength "
           "(nm)</text>\n"
        << "<text x=\"16\" y=\"" << (mt + height - mb) / 2.0
        << "\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\" "
           "transform=\"rotate(-90 16 "
        << (mt + height - mb) / 2.0 << ")\">normalized intensity</text>\n";

    double legend_y = mt + 14.0;
    for (const SpectrumArtifact& s : report.spectra) {
        double peak = 0.0;
        for (double v : s.intensity) peak = std::max(peak, v);
        if (!(peak > 0.0)) continue;
        svg << "<polyline fill=\"none\" stroke=\"" << color_for(s.label)
            << "\" stroke-width=\"1.5\" points=\"";
        const std::size_t stride = std::max<std::size_t>(1, s.intensity.size() / 4000);
        bool first = true;
        for (std::size_t i = 0; i < s.intensity.size(); i += stride) {
            const double x = s.wavelength_nm[i];
            if (x < x_min || x > x_max) continue;
            const double px = ml + (x - x_min) / (x_max - x_min) * (width - ml - mr);
            const double py = height - mb - (s.intensity[i] / peak) * (height - mt - mb);
            std::snprintf(buf, sizeof(buf), "%.2f,%.2f", px, py);
            svg << (first ? "" : " ") << buf;
            first = false;
        }
        svg << "\"/>\n";
        svg << "<rect x=\"" << width - mr - 170.0 << "\" y=\"" << legend_y - 9.0
            << "\" width=\"18\" height=\"4\" fill=\"" << color_for(s.label) << "\"/>"
            << "<text x=\"" << width - mr - 146.0 << "\" y=\"" << legend_y
            << "\" font-family=\"sans-serif\" font-size=\"12\">" << s.label << "</text>\n";
        legend_y += 18.0;
    }
    svg << "</svg>\n";

    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("emit_plot: cannot write '" + path + "'");
    out << svg.str();
}

// --------------------------------------------------------------------------
// execution

namespace detail {

struct PointSetup {
    SourceSpec source;
    std::optional<JitterSpec> jitter;
    std::optional<AbsorberSpec> absorber;
};

inline PointSetup materialize_point(const Scenario& s, std::optional<double> swept_value,
                                    std::size_t /*index*/) {
    PointSetup setup;
    setup.source = s.source;
    setup.jitter = s.jitter;

    std::optional<double> absorber_fwhm_nm;
    if (s.absorber && s.absorber->fwhm_nm) absorber_fwhm_nm = s.absorber->fwhm_nm;

    if (s.sweep && swept_value) {
        const std::string& p = s.sweep->parameter;
        if (p == "source.lambda0_nm")
            setup.source.lambda0_nm = *swept_value;
        else if (p == "source.fwhm_nm")
            setup.source.fwhm_nm = *swept_value;
        else if (p == "jitter.t_ps") {
            if (!setup.jitter) throw ConfigError("scenario: sweep over jitter.t_ps needs jitter");
            setup.jitter->t_ps = *swept_value;
        }
        if (s.absorber && s.absorber->fwhm_nm_range) {
            const auto [lo, hi] = *s.absorber->fwhm_nm_range;
            const double v0 = s.sweep->values.front(), v1 = s.sweep->values.back();
            const double t = v1 == v0 ? 0.0 : (*swept_value - v0) / (v1 - v0);
            absorber_fwhm_nm = lo + t * (hi - lo);
        }
    }

    if (s.absorber) {
        const AngularFrequency carrier =
            wavelength_to_omega(Wavelength{setup.source.lambda0_nm});
        double fwhm_ghz = 0.0;
        if (s.absorber->fwhm_ghz) fwhm_ghz = *s.absorber->fwhm_ghz;
        if (absorber_fwhm_nm)
            fwhm_ghz = bandwidth_nm_to_thz(*absorber_fwhm_nm,
                                           Wavelength{setup.source.lambda0_nm})
                           .thz *
                       1e3;
        if (s.sweep && swept_value) {
            const std::string& p = s.sweep->parameter;
            if (p == "absorber.fwhm_ghz") fwhm_ghz = *swept_value;
            if (p == "absorber.fwhm_nm")
                fwhm_ghz = bandwidth_nm_to_thz(*swept_value,
                                               Wavelength{setup.source.lambda0_nm})
                               .thz *
                           1e3;
        }
        if (fwhm_ghz <= 0.0) throw ConfigError("scenario: absorber bandwidth must be positive");
        setup.absorber = AbsorberSpec{
            FwhmBandwidth{fwhm_ghz * 1e-3},
            AngularFrequency{carrier.rad_per_ps + s.absorber->center_detuning_rad_per_ps}};
    }
    return setup;
}

inline ElementChain effective_chain(const ElementChain& chain, bool ideal_lens) {
    if (!ideal_lens) return chain;
    ElementChain out;
    for (const OpticalElement& e : chain) {
        if (const auto* eom = std::get_if<SinusoidalEom>(&e)) {
            const double k = chirp_factor(eom->f_rf_thz, eom->depth_rad);
            out.push_back(QuadraticLens{eom->sign == LensSign::focusing ? k : -k});
        } else {
            out.push_back(e);
        }
    }
    return out;
}

/// |K| of the single lens element, if the chain has exactly one.
inline std::optional<double> chain_lens_rate(const ElementChain& chain) {
    std::optional<double> k;
    int lenses = 0;
    for (const OpticalElement& e : chain) {
        if (const auto* lens = std::get_if<QuadraticLens>(&e)) {
            ++lenses;
            k = std::abs(lens->k_inv_ps2);
        } else if (const auto* eom = std::get_if<SinusoidalEom>(&e)) {
            ++lenses;
            k = chirp_factor(eom->f_rf_thz, eom->depth_rad);
        }
    }
    return lenses == 1 ? k : std::nullopt;
}

inline double attenuator_product(const ElementChain& chain) {
    double eta = 1.0;
    for (const OpticalElement& e : chain)
        if (const auto* att = std::get_if<Attenuator>(&e)) eta *= att->eta;
    return eta;
}

inline SpectrumArtifact make_artifact(const std::string& label, AngularFrequency carrier,
                                      const TimeGrid& grid, std::vector<double> intensity) {
    SpectrumArtifact art;
    art.label = label;
    const std::size_t n = intensity.size();
    art.detuning_rad_per_ps.resize(n);
    art.wavelength_nm.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double det = grid.detuning_at(j);
        art.detuning_rad_per_ps[j] = det;
        art.wavelength_nm[j] =
            constants::two_pi * constants::c_nm_per_ps / (carrier.rad_per_ps + det);
    }
    art.intensity = std::move(intensity);
    return art;
}

inline void normalize_area(std::vector<double>& y, double dx) {
    double area = 0.0;
    for (double v : y) area += v;
    area *= dx;
    if (area > 0.0)
        for (double& v : y) v /= area;
}

}  // namespace detail

/// Execute one scenario point; fills the report entry and (optionally) the
/// spectra list for artifact output.
inline PointReport run_point(const Scenario& s, const detail::PointSetup& setup,
                             const RunOptions& options, std::vector<SpectrumArtifact>* spectra) {
    PointReport point;
    const AngularFrequency carrier = wavelength_to_omega(Wavelength{setup.source.lambda0_nm});
    const FwhmBandwidth dnu_src =
        bandwidth_nm_to_thz(setup.source.fwhm_nm, Wavelength{setup.source.lambda0_nm});

    GridSpec grid_spec = s.grid;
    if (options.grid_points) grid_spec.n_samples = *options.grid_points;
    const TimeGrid grid = make_time_grid(grid_spec.n_samples, grid_spec.dt_ps);

    std::optional<GaussianFilter> pre_filter;
    if (s.pre_filter)
        pre_filter = GaussianFilter{
            fwhm_to_width_param(FwhmBandwidth{s.pre_filter->fwhm_ghz * 1e-3}),
            AngularFrequency{carrier.rad_per_ps + s.pre_filter->center_detuning_rad_per_ps}};

    const ElementChain chain = detail::effective_chain(s.chain, options.ideal_lens);
    if (options.ideal_lens) {
        for (const OpticalElement& e : s.chain)
            if (std::holds_alternative<SinusoidalEom>(e)) {
                point.notes.push_back("sinusoidal lens idealized to its quadratic chirp rate");
                break;
            }
    }

    // ---- sampled (FFT) channel
    SampledEnvelope env = synthesize_gaussian(grid, carrier, dnu_src);
    if (pre_filter) env = apply_gaussian_filter(env, *pre_filter);
    const SampledSpectrum initial_spec = to_spectrum(env);
    const double initial_energy = energy(initial_spec);
    point.fwhm_initial_ghz = spectral_fwhm(initial_spec).thz * 1e3;

    SampledEnvelope out = env;
    for (const OpticalElement& e : chain) {
        if (const auto* eom = std::get_if<SinusoidalEom>(&e))
            point.aperture_fill = aperture_fill_fraction(temporal_fwhm(out), eom->f_rf_thz,
                                                         eom->depth_rad, 0.5);
        out = apply_element(out, e);
    }
    const SampledSpectrum out_spec = to_spectrum(out);
    point.fwhm_numeric_ghz = spectral_fwhm(out_spec).thz * 1e3;
    point.eta_chain = energy(out_spec) / initial_energy;
    point.compression_numeric = *point.fwhm_initial_ghz / *point.fwhm_numeric_ghz;
    point.warnings = out.warnings;

    // ---- exact Gaussian channel
    GaussianPulse pulse = make_gaussian_pulse(carrier, dnu_src);
    std::optional<GaussianPulse> analytic_initial, analytic_out;
    ElementChain analytic_chain;
    if (pre_filter) analytic_chain.push_back(*pre_filter);
    analytic_chain.insert(analytic_chain.end(), chain.begin(), chain.end());
    if (is_gaussian_exact(analytic_chain, carrier)) {
        analytic_initial =
            pre_filter ? propagate(pulse, {OpticalElement{*pre_filter}}) : pulse;
        analytic_out = propagate(pulse, analytic_chain);
        point.fwhm_analytic_ghz = fwhm_bandwidth(*analytic_out).thz * 1e3;
        point.compression_analytic =
            fwhm_bandwidth(*analytic_initial).thz / fwhm_bandwidth(*analytic_out).thz;
    } else {
        point.notes.push_back("exact channel unavailable: chain is not quadratic-exact");
    }

    // ---- Monte Carlo channel
    std::optional<AveragedSpectrum> mc;
    const bool sweep_mode = s.sweep.has_value();
    if (setup.jitter && !options.no_jitter && !sweep_mode) {
        std::uint64_t seed = setup.jitter->seed;
        if (options.seed) seed = *options.seed;
        const McConfig cfg{setup.jitter->n_samples, seed, JitterModel{setup.jitter->t_ps}};
        mc = averaged_spectrum(env, chain, cfg);
        point.fwhm_mc_ghz = mc->fwhm().thz * 1e3;
    } else if (setup.jitter && sweep_mode) {
        point.notes.push_back("Monte Carlo channel skipped in sweep mode");
    } else if (setup.jitter && options.no_jitter) {
        point.notes.push_back("Monte Carlo channel disabled on request");
    }

    // jitter-broadened closed form, when the collimated model applies
    const std::optional<double> k_lens = detail::chain_lens_rate(chain);
    if (setup.jitter && k_lens) {
        const FwhmBandwidth dnu_in =
            analytic_initial ? fwhm_bandwidth(*analytic_initial) : dnu_src;
        const double broadened =
            jittered_bandwidth(dnu_in, *k_lens, setup.jitter->t_ps).thz * 1e3;
        std::ostringstream note;
        note << "collimated closed form with timing jitter T = " << setup.jitter->t_ps
             << " ps: " << detail::fmt_double(broadened) << " GHz";
        point.notes.push_back(note.str());
    }

    // ---- absorber figures
    if (setup.absorber) {
        const double eta_analytic = detail::attenuator_product(chain);
        if (k_lens) {
            const WidthParam dw_in = analytic_initial ? width_param(*analytic_initial)
                                                      : fwhm_to_width_param(dnu_src);
            const WidthParam dw_f = fwhm_to_width_param(setup.absorber->fwhm);
            const double t_ps = setup.jitter ? setup.jitter->t_ps : 0.0;
            point.flux_ratio_analytic =
                absorption_ratio(dw_in, dw_f, *k_lens, t_ps, eta_analytic);
        }
        // numeric route: overlap of the unit-normalized spectra, times the
        // measured chain transmission
        std::vector<double> init_i = spectral_intensity(initial_spec);
        detail::normalize_area(init_i, initial_spec.domega());
        std::vector<double> init_d(init_i.size());
        for (std::size_t j = 0; j < init_d.size(); ++j) init_d[j] = initial_spec.detuning_at(j);
        const double f_init = numeric_flux(init_d, init_i, initial_spec.domega(),
                                           *setup.absorber, carrier);
        std::vector<double> out_i;
        std::vector<double> out_d;
        double out_domega = 0.0;
        if (mc) {
            out_i = mc->intensity;
            out_domega = mc->domega();
            out_d.resize(out_i.size());
            for (std::size_t j = 0; j < out_d.size(); ++j) out_d[j] = mc->detuning_at(j);
        } else {
            out_i = spectral_intensity(out_spec);
            out_domega = out_spec.domega();
            out_d.resize(out_i.size());
            for (std::size_t j = 0; j < out_d.size(); ++j) out_d[j] = out_spec.detuning_at(j);
        }
        detail::normalize_area(out_i, out_domega);
        const double f_out = numeric_flux(out_d, out_i, out_domega, *setup.absorber, carrier);
        point.flux_ratio_numeric = *point.eta_chain * f_out / f_init;
    }

    // ---- measurement channel
    std::optional<SpectrumArtifact> measured;
    if (s.measurement) {
        const InstrumentResponse irf =
            s.measurement->irf_fwhm_nm ? InstrumentResponse::gaussian(*s.measurement->irf_fwhm_nm)
                                       : load_irf_table(*s.measurement->irf_file);
        const Wavelength lambda0{setup.source.lambda0_nm};

        std::vector<double> base_i;
        double base_domega = 0.0;
        const TimeGrid* base_grid = nullptr;
        if (mc) {
            base_i = mc->intensity;
            base_domega = mc->domega();
            base_grid = &mc->grid;
        } else {
            base_i = spectral_intensity(out_spec);
            base_domega = out_spec.domega();
            base_grid = &out_spec.grid;
        }
        detail::normalize_area(base_i, base_domega);
        std::vector<double> conv = convolve_irf(base_i, base_domega, irf, lambda0);
        point.fwhm_measured_ghz =
            measure_fwhm(conv, base_domega) / constants::two_pi * 1e3;

        std::vector<double> init_i = spectral_intensity(initial_spec);
        detail::normalize_area(init_i, initial_spec.domega());
        const std::vector<double> init_conv =
            convolve_irf(init_i, initial_spec.domega(), irf, lambda0);
        const double init_measured =
            measure_fwhm(init_conv, initial_spec.domega()) / constants::two_pi * 1e3;
        point.compression_apparent = init_measured / *point.fwhm_measured_ghz;

        measured = detail::make_artifact("measured", carrier, *base_grid, conv);
        if (s.measurement->total_counts) {
            std::uint64_t seed = s.measurement->seed;
            if (options.seed) seed = *options.seed + 1;
            measured->counts = poissonize(conv, *s.measurement->total_counts, seed);
        }
    }

    // ---- spectra artifacts
    if (spectra) {
        spectra->push_back(detail::make_artifact("initial", carrier, initial_spec.grid,
                                                 spectral_intensity(initial_spec)));
        spectra->push_back(detail::make_artifact("output", carrier, out_spec.grid,
                                                 spectral_intensity(out_spec)));
        if (analytic_out) {
            const WidthParam a = width_param(*analytic_out);
            std::vector<double> exact(out_spec.grid.n_samples);
            const double scale = std::norm(analytic_out->amplitude_scale);
            for (std::size_t j = 0; j < exact.size(); ++j) {
                const double w = out_spec.grid.detuning_at(j);
                exact[j] = scale * std::exp(-w * w / (a.rad_per_ps * a.rad_per_ps));
            }
            spectra->push_back(
                detail::make_artifact("analytic", carrier, out_spec.grid, std::move(exact)));
        }
        if (mc) {
            SpectrumArtifact art =
                detail::make_artifact("mc_average", carrier, mc->grid, mc->intensity);
            art.std_error = mc->std_error;
            spectra->push_back(std::move(art));
        }
        if (measured) spectra->push_back(std::move(*measured));
    }
    return point;
}

inline RunReport run(const Scenario& s, const RunOptions& options = {}) {
    RunReport report;
    report.scenario_name = s.name;
    report.description = s.description;

    const std::filesystem::path out_dir(options.out_dir);
    if (options.write_files) std::filesystem::create_directories(out_dir);

    if (!s.sweep) {
        PointReport point = run_point(s, detail::materialize_point(s, std::nullopt, 0), options,
                                      &report.spectra);
        report.points.push_back(std::move(point));
    } else {
        for (std::size_t i = 0; i < s.sweep->values.size(); ++i) {
            const double v = s.sweep->values[i];
            PointReport point =
                run_point(s, detail::materialize_point(s, v, i), options, nullptr);
            point.swept_value = v;
            report.points.push_back(std::move(point));
        }
    }

    if (options.write_files) {
        for (const SpectrumArtifact& art : report.spectra) {
            const std::string file = s.name + "_" + art.label + ".csv";
            detail::write_spectrum_csv((out_dir / file).string(), art);
            report.artifact_files.push_back(file);
        }
        if (s.sweep) {
            const std::string file = s.name + "_sweep.csv";
            std::ofstream sw((out_dir / file).string(), std::ios::binary);
            if (!sw) throw IoError("cannot write sweep table");
            sw << "swept_value,fwhm_initial_ghz,fwhm_numeric_ghz,fwhm_analytic_ghz,"
                  "flux_ratio_analytic,flux_ratio_numeric,eta_chain\n";
            const auto cell = [](const std::optional<double>& v) {
                return v ? detail::fmt_double(*v) : std::string{};
            };
            for (const PointReport& p : report.points)
                sw << cell(p.swept_value) << ',' << cell(p.fwhm_initial_ghz) << ','
                   << cell(p.fwhm_numeric_ghz) << ',' << cell(p.fwhm_analytic_ghz) << ','
                   << cell(p.flux_ratio_analytic) << ',' << cell(p.flux_ratio_numeric) << ','
                   << cell(p.eta_chain) << "\n";
            report.artifact_files.push_back(file);
        }
        {
            const std::string file = s.name + "_report.json";
            std::ofstream rj((out_dir / file).string(), std::ios::binary);
            if (!rj) throw IoError("cannot write report");
            rj << report_to_json(report).dump(2) << "\n";
            report.artifact_files.push_back(file);
        }
        if (options.plot) {
            const std::string file = s.name + ".svg";
            emit_plot(report, (out_dir / file).string());
            report.artifact_files.push_back(file);
        }
    }
    return report;
}

// --------------------------------------------------------------------------
// transmission-budget chain files

/// Budget chain description: JSON naming catalog components plus lengths and
/// connector counts; resolved against a ComponentCatalog.
inline LossBudget parse_budget(const std::string& path, const ComponentCatalog& catalog) {
    std::ifstream in(path);
    if (!in) throw IoError("budget: cannot open '" + path + "'");
    Json j;
    try {
        j = Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw ConfigError(std::string("budget: JSON parse error: ") + e.what());
    }
    detail::check_keys(j, "budget", {"schema_version", "name", "fiber", "devices", "connectors"});
    const Json& version = detail::require_key(j, "budget", "schema_version");
    if (!version.is_number_integer() || version.get<int>() != 1)
        throw ConfigError("budget: schema_version must be the integer 1");

    LossBudget budget;
    if (j.contains("fiber")) {
        const Json& f = j["fiber"];
        detail::check_keys(f, "budget.fiber", {"component", "length_m"});
        const std::string comp =
            detail::as_string(detail::require_key(f, "budget.fiber", "component"),
                              "budget.fiber.component");
        budget.fiber_length_m = detail::as_number(
            detail::require_key(f, "budget.fiber", "length_m"), "budget.fiber.length_m");
        budget.fiber_loss_db_per_km = catalog.get(comp + ".loss_db_per_km");
    }
    if (j.contains("devices")) {
        const Json& devices = j["devices"];
        if (!devices.is_array()) throw ConfigError("budget: devices must be an array");
        for (std::size_t i = 0; i < devices.size(); ++i) {
            const std::string dev =
                detail::as_string(devices[i], "budget.devices[" + std::to_string(i) + "]");
            budget.device_transmissions.emplace_back(dev, catalog.get(dev + ".transmission"));
        }
    }
    if (j.contains("connectors")) {
        const Json& c = j["connectors"];
        detail::check_keys(c, "budget.connectors", {"component", "count"});
        const std::string comp =
            detail::as_string(detail::require_key(c, "budget.connectors", "component"),
                              "budget.connectors.component");
        budget.connector_interfaces = static_cast<int>(detail::as_uint(
            detail::require_key(c, "budget.connectors", "count"), "budget.connectors.count"));
        budget.connector_loss_db = catalog.get(comp + ".loss_db");
    }
    return budget;
}

// --------------------------------------------------------------------------
// human-readable table

inline std::string format_report(const RunReport& report) {
    std::ostringstream out;
    out << "scenario: " << report.scenario_name << "\n";
    if (!report.description.empty()) out << "  " << report.description << "\n";
    const auto cell = [](const std::optional<double>& v, const char* unit = "") {
        if (!v) return std::string("-");
        std::string r = detail::fmt_double(*v);
        r += unit;
        return r;
    };
    for (const PointReport& p : report.points) {
        if (p.swept_value) out << "point @ " << *p.swept_value << "\n";
        out << "  FWHM [GHz]  initial " << cell(p.fwhm_initial_ghz) << " | numeric "
            << cell(p.fwhm_numeric_ghz) << " | analytic " << cell(p.fwhm_analytic_ghz)
            << " | mc " << cell(p.fwhm_mc_ghz) << " | measured " << cell(p.fwhm_measured_ghz)
            << "\n";
        out << "  compression numeric " << cell(p.compression_numeric) << " | analytic "
            << cell(p.compression_analytic) << " | apparent " << cell(p.compression_apparent)
            << "\n";
        if (p.aperture_fill) out << "  aperture fill " << cell(p.aperture_fill) << "\n";
        if (p.eta_chain) out << "  chain transmission " << cell(p.eta_chain) << "\n";
        if (p.flux_ratio_analytic || p.flux_ratio_numeric)
            out << "  absorber flux ratio R  analytic " << cell(p.flux_ratio_analytic)
                << " | numeric " << cell(p.flux_ratio_numeric) << "\n";
        for (const std::string& w : p.warnings) out << "  warning: " << w << "\n";
        for (const std::string& n : p.notes) out << "  note: " << n << "\n";
    }
    if (!report.artifact_files.empty()) {
        out << "artifacts:";
        for (const std::string& f : report.artifact_files) out << ' ' << f;
        out << "\n";
    }
    return out.str();
}

}  // namespace timelens
