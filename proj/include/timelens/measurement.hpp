#pragma once

//
// Spectral measurement simulation: instrument-response convolution and
// Poisson count statistics, producing raw-data-like spectra.
//

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "timelens/errors.hpp"
#include "timelens/rng.hpp"
#include "timelens/units.hpp"

namespace timelens {

struct InstrumentResponse {
    enum class Kind { gaussian, tabulated };
    Kind kind = Kind::gaussian;
    double fwhm_nm = 0.0;                          // gaussian kind
    std::vector<std::pair<double, double>> table;  // tabulated kind: (detuning rad/ps, response)

    static InstrumentResponse gaussian(double fwhm_nm) {
        detail::require(std::isfinite(fwhm_nm) && fwhm_nm > 0.0,
                        "instrument response: FWHM must be positive");
        InstrumentResponse irf;
        irf.fwhm_nm = fwhm_nm;
        return irf;
    }
};

/// Two-column text IRF: detuning (rad/ps) and relative response, '#' comments.
inline InstrumentResponse load_irf_table(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("instrument response: cannot open '" + path + "'");
    InstrumentResponse irf;
    irf.kind = InstrumentResponse::Kind::tabulated;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream row(line);
        double x, y;
        if (!(row >> x)) continue;  // blank
        if (!(row >> y))
            throw ConfigError("instrument response: line " + std::to_string(line_no) +
                              " needs two columns");
        if (!std::isfinite(x) || !std::isfinite(y) || y < 0.0)
            throw ConfigError("instrument response: invalid sample at line " +
                              std::to_string(line_no));
        irf.table.emplace_back(x, y);
    }
    if (irf.table.size() < 3)
        throw ConfigError("instrument response: table needs at least 3 samples");
    if (!std::is_sorted(irf.table.begin(), irf.table.end(),
                        [](const auto& a, const auto& b) { return a.first < b.first; }))
        throw ConfigError("instrument response: detuning column must be increasing");
    return irf;
}

namespace detail {

/// Sample the IRF as a unit-sum discrete kernel on a grid of spacing domega.
/// The kernel index origin (center) is returned alongside.
inline std::pair<std::vector<double>, std::ptrdiff_t> irf_kernel(const InstrumentResponse& irf,
                                                                 double domega,
                                                                 Wavelength lambda0) {
    std::vector<double> kernel;
    std::ptrdiff_t center = 0;
    if (irf.kind == InstrumentResponse::Kind::gaussian) {
        const double fwhm_w =
            constants::two_pi * bandwidth_nm_to_thz(irf.fwhm_nm, lambda0).thz;
        if (domega > fwhm_w / 4.0) {
            std::ostringstream msg;
            msg << "convolve_irf: spectrum grid (" << domega
                << " rad/ps) is coarser than IRF FWHM/4 (" << fwhm_w / 4.0 << " rad/ps)";
            throw ConfigError(msg.str());
        }
        const double sigma = fwhm_w / (2.0 * std::sqrt(2.0 * constants::ln2));
        const auto half = static_cast<std::ptrdiff_t>(std::ceil(9.0 * sigma / domega));
        kernel.resize(static_cast<std::size_t>(2 * half + 1));
        for (std::ptrdiff_t i = -half; i <= half; ++i) {
            const double x = static_cast<double>(i) * domega / sigma;
            kernel[static_cast<std::size_t>(i + half)] = std::exp(-0.5 * x * x);
        }
        center = half;
    } else {
        const double lo = irf.table.front().first, hi = irf.table.back().first;
        const double fwhm_guess = hi - lo;  // coarse span check only
        if (domega > fwhm_guess / 4.0)
            throw ConfigError("convolve_irf: spectrum grid is coarser than the tabulated IRF");
        const auto half_lo = static_cast<std::ptrdiff_t>(std::floor(lo / domega));
        const auto half_hi = static_cast<std::ptrdiff_t>(std::ceil(hi / domega));
        kernel.resize(static_cast<std::size_t>(half_hi - half_lo + 1), 0.0);
        for (std::ptrdiff_t i = half_lo; i <= half_hi; ++i) {
            const double x = static_cast<double>(i) * domega;
            // linear interpolation of the table
            const auto it = std::lower_bound(
                irf.table.begin(), irf.table.end(), x,
                [](const auto& p, double v) { return p.first < v; });
            double y = 0.0;
            if (it != irf.table.begin() && it != irf.table.end()) {
                const auto& b = *it;
                const auto& a = *(it - 1);
                const double t = (x - a.first) / (b.first - a.first);
                y = a.second + t * (b.second - a.second);
            } else if (it != irf.table.end() && it->first == x) {
                y = it->second;
            }
            kernel[static_cast<std::size_t>(i - half_lo)] = y;
        }
        center = -half_lo;
    }
    double sum = 0.0;
    for (double v : kernel) sum += v;
    if (!(sum > 0.0)) throw ConfigError("convolve_irf: IRF kernel has zero area");
    for (double& v : kernel) v /= sum;
    return {std::move(kernel), center};
}

}  // namespace detail

/// Area-preserving discrete convolution of a sampled spectral intensity with
/// the instrument response. The spectrum is assumed to decay to zero well
/// inside the array (so truncation at the edges loses nothing).
inline std::vector<double> convolve_irf(const std::vector<double>& intensity, double domega,
                                        const InstrumentResponse& irf, Wavelength lambda0) {
    detail::require(domega > 0.0, "convolve_irf: bin width must be positive");
    const auto [kernel, center] = detail::irf_kernel(irf, domega, lambda0);
    const auto n = static_cast<std::ptrdiff_t>(intensity.size());
    const auto m = static_cast<std::ptrdiff_t>(kernel.size());
    std::vector<double> out(intensity.size(), 0.0);
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        const double v = intensity[static_cast<std::size_t>(i)];
        if (v == 0.0) continue;
        for (std::ptrdiff_t k = 0; k < m; ++k) {
            const std::ptrdiff_t j = i + k - center;
            if (j >= 0 && j < n)
                out[static_cast<std::size_t>(j)] += v * kernel[static_cast<std::size_t>(k)];
        }
    }
    return out;
}

/// Per-bin independent Poisson draws with means proportional to the spectrum
/// and summing in expectation to total_counts. Deterministic per seed; bin i
/// uses stream(seed, i), so the draw is independent of evaluation order.
inline std::vector<std::uint64_t> poissonize(const std::vector<double>& intensity,
                                             std::uint64_t total_counts, std::uint64_t seed) {
    double area = 0.0;
    for (double v : intensity) {
        detail::require(std::isfinite(v) && v >= 0.0,
                        "poissonize: intensity must be finite and non-negative");
        area += v;
    }
    std::vector<std::uint64_t> counts(intensity.size(), 0);
    if (total_counts == 0) return counts;
    if (!(area > 0.0)) throw DomainError("poissonize: spectrum is identically zero");
    const double scale = static_cast<double>(total_counts) / area;
    for (std::size_t i = 0; i < intensity.size(); ++i) {
        SplitMix64 stream = derive_stream(seed, i);
        counts[i] = sample_poisson(intensity[i] * scale, stream);
    }
    return counts;
}

}  // namespace timelens
