#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <unordered_map>
#include <utility>
#include <vector>

#include "timelens/errors.hpp"
#include "timelens/units.hpp"

namespace timelens::detail {

using Complex = std::complex<double>;

inline bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

// Iterative radix-2 Cooley-Tukey transform for power-of-two sizes.
// Kernel sign: transform(+1) computes X_j = sum_k x_k e^{+2pi i jk/n},
// transform(-1) the conjugate kernel; neither applies a 1/n factor.
class FftPlan {
public:
    explicit FftPlan(std::size_t n) : n_(n), roots_(n / 2), bitrev_(n) {
        if (!is_power_of_two(n) || n < 2)
            throw DomainError("FftPlan: size must be a power of two >= 2");
        for (std::size_t k = 0; k < n / 2; ++k)
            roots_[k] = std::polar(1.0, constants::two_pi * static_cast<double>(k) /
                                            static_cast<double>(n));
        std::size_t lg = 0;
        while ((std::size_t{1} << lg) < n) ++lg;
        for (std::size_t i = 0; i < n; ++i) {
            std::size_t r = 0;
            for (std::size_t b = 0; b < lg; ++b) r |= ((i >> b) & 1u) << (lg - 1 - b);
            bitrev_[i] = r;
        }
    }

    std::size_t size() const { return n_; }

    void transform(Complex* data, int kernel_sign) const {
        for (std::size_t i = 0; i < n_; ++i)
            if (i < bitrev_[i]) std::swap(data[i], data[bitrev_[i]]);
        for (std::size_t len = 2; len <= n_; len <<= 1) {
            const std::size_t stride = n_ / len;
            const std::size_t half = len / 2;
            for (std::size_t base = 0; base < n_; base += len) {
                for (std::size_t k = 0; k < half; ++k) {
                    Complex w = roots_[k * stride];
                    if (kernel_sign < 0) w = std::conj(w);
                    const Complex u = data[base + k];
                    const Complex v = data[base + k + half] * w;
                    data[base + k] = u + v;
                    data[base + k + half] = u - v;
                }
            }
        }
    }

private:
    std::size_t n_;
    std::vector<Complex> roots_;
    std::vector<std::size_t> bitrev_;
};

/// Per-thread plan cache; twiddle tables are reused across repeated transforms
/// of the same size (the Monte Carlo hot path).
inline const FftPlan& fft_plan(std::size_t n) {
    thread_local std::unordered_map<std::size_t, std::unique_ptr<FftPlan>> cache;
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, std::make_unique<FftPlan>(n)).first;
    return *it->second;
}

/// Rotate a length-n array by n/2 (n even), mapping a centered layout to FFT
/// order and back. For even n the forward and inverse rotations coincide.
template <typename T>
void half_rotate(std::vector<T>& v) {
    const std::size_t h = v.size() / 2;
    for (std::size_t i = 0; i < h; ++i) std::swap(v[i], v[i + h]);
}

}  // namespace timelens::detail
