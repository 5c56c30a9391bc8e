#pragma once

//
// Monte Carlo model of RF-to-optical timing offset: draws per-shot offsets
// tau, applies the chain with the lens time reference shifted by tau, and
// averages spectral intensities incoherently.
//
// Per-shot spectra are computed on a decimated copy of the pre-lens envelope
// when the spectral support (including the lens shear bound) fits inside the
// reduced Nyquist band; this is alias-free and changes nothing but the cost.
//

#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "timelens/elements.hpp"
#include "timelens/envelope.hpp"
#include "timelens/errors.hpp"
#include "timelens/gaussian.hpp"
#include "timelens/rng.hpp"

namespace timelens {

struct McConfig {
    std::size_t n_samples = 1;
    std::uint64_t seed = 0;
    JitterModel jitter;
};

struct AveragedSpectrum {
    TimeGrid grid;
    AngularFrequency carrier;
    std::vector<double> intensity;   // mean |psi~|^2 over realizations
    std::vector<double> std_error;   // per-bin standard error of the mean

    double domega() const { return grid.domega(); }
    double detuning_at(std::size_t j) const { return grid.detuning_at(j); }
    double total_energy() const {
        double acc = 0.0;
        for (double v : intensity) acc += v;
        return acc * domega();
    }
    FwhmBandwidth fwhm() const {
        return {measure_fwhm(intensity, domega()) / constants::two_pi};
    }
};

/// Timing offset of realization `index`; the single source of tau draws.
inline double jitter_offset(const JitterModel& jitter, std::uint64_t seed, std::uint64_t index) {
    if (jitter.width_ps == 0.0) return 0.0;
    SplitMix64 stream = derive_stream(seed, index);
    return jitter.tau_std() * stream.next_normal();
}

namespace detail {

struct LensSplit {
    ElementChain pre;
    OpticalElement lens;
    ElementChain post;
};

inline LensSplit split_at_lens(const ElementChain& chain) {
    std::size_t lens_count = 0, lens_index = 0;
    for (std::size_t i = 0; i < chain.size(); ++i) {
        if (std::holds_alternative<QuadraticLens>(chain[i]) ||
            std::holds_alternative<SinusoidalEom>(chain[i])) {
            ++lens_count;
            lens_index = i;
        }
    }
    if (lens_count != 1)
        throw ConfigError("jitter Monte Carlo: chain must contain exactly one lens element, found " +
                          std::to_string(lens_count));
    LensSplit split;
    split.pre.assign(chain.begin(), chain.begin() + static_cast<std::ptrdiff_t>(lens_index));
    split.lens = chain[lens_index];
    split.post.assign(chain.begin() + static_cast<std::ptrdiff_t>(lens_index) + 1, chain.end());
    return split;
}

/// Outermost |detuning| carrying at least `threshold` of the peak amplitude.
inline double spectral_extent(const SampledSpectrum& spec, double threshold) {
    double peak = 0.0;
    for (const Complex& a : spec.amplitudes) peak = std::max(peak, std::abs(a));
    const double limit = threshold * peak;
    double ext = 0.0;
    for (std::size_t j = 0; j < spec.amplitudes.size(); ++j)
        if (std::abs(spec.amplitudes[j]) >= limit)
            ext = std::max(ext, std::abs(spec.detuning_at(j)));
    return ext;
}

inline double temporal_extent(const SampledEnvelope& env, double t_ref, double threshold) {
    double peak = 0.0;
    for (const Complex& s : env.samples) peak = std::max(peak, std::abs(s));
    const double limit = threshold * peak;
    double ext = 0.0;
    for (std::size_t k = 0; k < env.samples.size(); ++k)
        if (std::abs(env.samples[k]) >= limit)
            ext = std::max(ext, std::abs(env.grid.time_at(k) - t_ref));
    return ext;
}

inline SampledEnvelope decimate(const SampledEnvelope& env, std::size_t factor) {
    if (factor == 1) return env;
    SampledEnvelope out;
    out.grid = TimeGrid{env.grid.n_samples / factor, env.grid.dt_ps * static_cast<double>(factor),
                        env.grid.t_center_ps};
    out.carrier = env.carrier;
    out.warnings = env.warnings;
    out.samples.resize(out.grid.n_samples);
    for (std::size_t k = 0; k < out.grid.n_samples; ++k) out.samples[k] = env.samples[k * factor];
    return out;
}

// Shared per-realization machinery for averaged_spectrum and drift_series.
class McEngine {
public:
    McEngine(const SampledEnvelope& input, const ElementChain& chain, double tau_max)
        : split_(split_at_lens(chain)) {
        SampledEnvelope pre = input;
        for (const OpticalElement& e : split_.pre) pre = apply_element(pre, e);
        const SampledSpectrum pre_spec = to_spectrum(pre);
        t_ref_ = centroid(pre);

        // Lens instantaneous-frequency bound, for the alias guard.
        double shear_bound = 0.0;
        if (const auto* lens = std::get_if<QuadraticLens>(&split_.lens)) {
            const double t_ext = temporal_extent(pre, t_ref_, 1e-8);
            shear_bound = std::abs(lens->k_inv_ps2) * (t_ext + tau_max);
        } else {
            const auto& eom = std::get<SinusoidalEom>(split_.lens);
            shear_bound = eom.depth_rad * constants::two_pi * eom.f_rf_thz;
        }
        const double content = spectral_extent(pre_spec, 1e-8) + shear_bound;

        std::size_t factor = 1;
        while (pre.grid.n_samples / (2 * factor) >= 1024 &&
               constants::pi / (2.0 * static_cast<double>(factor) * pre.grid.dt_ps) >=
                   1.05 * content)
            factor *= 2;
        env_ = decimate(pre, factor);

        const std::size_t n = env_.grid.n_samples;
        tbar_.resize(n);
        for (std::size_t k = 0; k < n; ++k) tbar_[k] = env_.grid.time_at(k) - t_ref_;
        if (const auto* lens = std::get_if<QuadraticLens>(&split_.lens)) {
            quadratic_ = true;
            k_rate_ = lens->k_inv_ps2;
            base_.resize(n);
            for (std::size_t k = 0; k < n; ++k)
                base_[k] = env_.samples[k] * std::polar(1.0, 0.5 * k_rate_ * tbar_[k] * tbar_[k]);
        } else {
            const auto& eom = std::get<SinusoidalEom>(split_.lens);
            quadratic_ = false;
            eom_ = eom;
            cos_u_.resize(n);
            sin_u_.resize(n);
            for (std::size_t k = 0; k < n; ++k) {
                const double u = constants::two_pi * eom.f_rf_thz * (tbar_[k] - eom.t0_ps);
                cos_u_[k] = std::cos(u);
                sin_u_[k] = std::sin(u);
            }
        }
        work_.resize(n);
        spectrum_scale_ = env_.grid.dt_ps / std::sqrt(constants::two_pi);
    }

    std::size_t bins() const { return env_.grid.n_samples; }
    const TimeGrid& grid() const { return env_.grid; }
    AngularFrequency carrier() const { return env_.carrier; }

    /// Spectral intensity of one realization, monotonic detuning order.
    void realize(double tau, std::vector<double>& out) {
        const std::size_t n = bins();
        if (quadratic_) {
            // exp(i k (t-tau)^2/2) = base phase * e^{-i k tau t} * const
            const double step = -k_rate_ * tau * env_.grid.dt_ps;
            const Complex ratio = std::polar(1.0, step);
            Complex factor;
            for (std::size_t k = 0; k < n; ++k) {
                if (k % 1024 == 0) factor = std::polar(1.0, -k_rate_ * tau * tbar_[k]);
                work_[k] = base_[k] * factor;
                factor *= ratio;
            }
        } else {
            const double delta = constants::two_pi * eom_.f_rf_thz * tau;
            const double cd = std::cos(delta), sd = std::sin(delta);
            const double sgn = eom_.sign == LensSign::focusing ? 1.0 : -1.0;
            const double a = eom_.depth_rad;
            for (std::size_t k = 0; k < n; ++k) {
                const double theta = sgn * a * (1.0 - (cos_u_[k] * cd + sin_u_[k] * sd));
                work_[k] = env_.samples[k] * std::polar(1.0, theta);
            }
        }
        if (split_.post.empty()) {
            half_rotate(work_);
            fft_plan(n).transform(work_.data(), +1);
            const double s2 = spectrum_scale_ * spectrum_scale_;
            const std::size_t h = n / 2;
            out.resize(n);
            for (std::size_t j = 0; j < n; ++j) out[j] = std::norm(work_[(j + h) % n]) * s2;
        } else {
            SampledEnvelope shot{env_.grid, env_.carrier, work_, {}};
            for (const OpticalElement& e : split_.post) shot = apply_element(shot, e);
            const SampledSpectrum spec = to_spectrum(shot);
            out.resize(n);
            for (std::size_t j = 0; j < n; ++j) out[j] = std::norm(spec.amplitudes[j]);
        }
    }

private:
    LensSplit split_;
    SampledEnvelope env_;        // decimated pre-lens envelope
    bool quadratic_ = false;
    double k_rate_ = 0.0;
    SinusoidalEom eom_;
    double t_ref_ = 0.0;
    double spectrum_scale_ = 0.0;
    std::vector<double> tbar_, cos_u_, sin_u_;
    std::vector<Complex> base_, work_;
};

}  // namespace detail

/// Incoherent jitter average: mean spectral intensity over cfg.n_samples
/// realizations, each shifting the lens time reference by an offset drawn
/// from the jitter distribution. Deterministic given cfg.seed.
inline AveragedSpectrum averaged_spectrum(const SampledEnvelope& input, const ElementChain& chain,
                                          const McConfig& cfg) {
    if (cfg.n_samples < 1)
        throw ConfigError("averaged_spectrum: need at least one realization");
    detail::require(std::isfinite(cfg.jitter.width_ps) && cfg.jitter.width_ps >= 0.0,
                    "averaged_spectrum: jitter width must be non-negative");
    detail::McEngine engine(input, chain, 6.0 * cfg.jitter.tau_std());

    const std::size_t n = engine.bins();
    std::vector<double> sum(n, 0.0), sum_sq(n, 0.0), shot;
    for (std::uint64_t i = 0; i < cfg.n_samples; ++i) {
        const double tau = jitter_offset(cfg.jitter, cfg.seed, i);
        engine.realize(tau, shot);
        for (std::size_t j = 0; j < n; ++j) {
            sum[j] += shot[j];
            sum_sq[j] += shot[j] * shot[j];
        }
    }
    AveragedSpectrum out{engine.grid(), engine.carrier(), std::vector<double>(n),
                         std::vector<double>(n, 0.0)};
    const double nd = static_cast<double>(cfg.n_samples);
    for (std::size_t j = 0; j < n; ++j) {
        out.intensity[j] = sum[j] / nd;
        if (cfg.n_samples > 1) {
            const double var = std::max(0.0, (sum_sq[j] - sum[j] * sum[j] / nd) / (nd - 1.0));
            out.std_error[j] = std::sqrt(var / nd);
        }
    }
    return out;
}

/// Per-shot spectral centroid sequence (absolute angular frequency), for
/// drift visualization. For a quadratic lens, shot i sits at
/// carrier + K * tau_i.
inline std::vector<double> drift_series(const SampledEnvelope& input, const ElementChain& chain,
                                        const JitterModel& jitter, std::size_t n_steps,
                                        std::uint64_t seed) {
    if (n_steps < 1) throw ConfigError("drift_series: need at least one step");
    detail::require(std::isfinite(jitter.width_ps) && jitter.width_ps >= 0.0,
                    "drift_series: jitter width must be non-negative");
    detail::McEngine engine(input, chain, 6.0 * jitter.tau_std());

    std::vector<double> centroids(n_steps);
    std::vector<double> shot;
    for (std::uint64_t i = 0; i < n_steps; ++i) {
        engine.realize(jitter_offset(jitter, seed, i), shot);
        double w = 0.0, acc = 0.0;
        for (std::size_t j = 0; j < shot.size(); ++j) {
            w += shot[j];
            acc += shot[j] * engine.grid().detuning_at(j);
        }
        centroids[i] = engine.carrier().rad_per_ps + acc / w;
    }
    return centroids;
}

}  // namespace timelens
