#pragma once

// Self-contained complex FFT. Power-of-two sizes run an iterative radix-2
// transform; every other size goes through Bluestein's chirp-z algorithm on
// a padded power-of-two convolution, so arbitrary lengths (e.g. one-second
// 32000-sample frames) transform exactly, without zero-padding the signal.

#include <cmath>
#include <complex>
#include <cstddef>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <unordered_map>
#include <vector>

namespace hive {

class Fft {
public:
    using cplx = std::complex<double>;

    explicit Fft(std::size_t n) : n_(n) {
        if (n == 0) throw std::invalid_argument("Fft: size must be positive");
        if (is_pow2(n)) {
            init_radix2(n);
        } else {
            init_bluestein();
        }
    }

    std::size_t size() const { return n_; }

    // In-place forward transform; x.size() must equal size().
    void forward(std::vector<cplx>& x) const {
        check(x);
        if (bluestein_) {
            bluestein(x, /*inverse=*/false);
        } else {
            radix2(x.data(), n_, /*inverse=*/false);
        }
    }

    // In-place inverse transform including the 1/n factor.
    void inverse(std::vector<cplx>& x) const {
        check(x);
        if (bluestein_) {
            bluestein(x, /*inverse=*/true);
        } else {
            radix2(x.data(), n_, /*inverse=*/true);
        }
        for (auto& v : x) v /= static_cast<double>(n_);
    }

    // Shared per-size plan; building twiddle tables once matters when a plan
    // is reused across thousands of frames.
    static const Fft& plan(std::size_t n) {
        static std::mutex mutex;
        static std::unordered_map<std::size_t, std::unique_ptr<Fft>> cache;
        std::lock_guard<std::mutex> lock(mutex);
        auto& slot = cache[n];
        if (!slot) slot = std::make_unique<Fft>(n);
        return *slot;
    }

    static bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

private:
    void check(const std::vector<cplx>& x) const {
        if (x.size() != n_) throw std::invalid_argument("Fft: length mismatch");
    }

    void init_radix2(std::size_t n) {
        twiddle_.resize(n / 2);
        for (std::size_t k = 0; k < n / 2; ++k) {
            const double a = -2.0 * pi() * static_cast<double>(k) / static_cast<double>(n);
            twiddle_[k] = cplx(std::cos(a), std::sin(a));
        }
        bitrev_.resize(n);
        std::size_t bits = 0;
        while ((std::size_t{1} << bits) < n) ++bits;
        for (std::size_t i = 0; i < n; ++i) {
            std::size_t r = 0;
            for (std::size_t b = 0; b < bits; ++b)
                if (i & (std::size_t{1} << b)) r |= std::size_t{1} << (bits - 1 - b);
            bitrev_[i] = r;
        }
    }

    void init_bluestein() {
        bluestein_ = true;
        conv_len_ = 1;
        while (conv_len_ < 2 * n_ - 1) conv_len_ <<= 1;
        init_radix2(conv_len_);

        // chirp[k] = exp(-i*pi*k^2/n); k^2 taken mod 2n to keep the angle exact
        // for large k.
        chirp_.resize(n_);
        for (std::size_t k = 0; k < n_; ++k) {
            const std::size_t k2 = (k * k) % (2 * n_);
            const double a = -pi() * static_cast<double>(k2) / static_cast<double>(n_);
            chirp_[k] = cplx(std::cos(a), std::sin(a));
        }
        // Spectrum of the conjugate chirp, wrapped for circular convolution.
        kernel_fft_.assign(conv_len_, cplx(0.0, 0.0));
        kernel_fft_[0] = std::conj(chirp_[0]);
        for (std::size_t k = 1; k < n_; ++k) {
            kernel_fft_[k] = std::conj(chirp_[k]);
            kernel_fft_[conv_len_ - k] = std::conj(chirp_[k]);
        }
        radix2(kernel_fft_.data(), conv_len_, /*inverse=*/false);
    }

    // Iterative radix-2 at the plan's table length (n_ for power-of-two
    // plans, conv_len_ for Bluestein plans).
    void radix2(cplx* x, std::size_t n, bool inverse) const {
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t j = bitrev_[i];
            if (j > i) std::swap(x[i], x[j]);
        }
        for (std::size_t len = 2; len <= n; len <<= 1) {
            const std::size_t half = len / 2;
            const std::size_t step = n / len;
            for (std::size_t base = 0; base < n; base += len) {
                for (std::size_t k = 0; k < half; ++k) {
                    cplx w = twiddle_[k * step];
                    if (inverse) w = std::conj(w);
                    const cplx t = w * x[base + k + half];
                    const cplx u = x[base + k];
                    x[base + k] = u + t;
                    x[base + k + half] = u - t;
                }
            }
        }
    }

    void bluestein(std::vector<cplx>& x, bool inverse) const {
        std::vector<cplx> a(conv_len_, cplx(0.0, 0.0));
        for (std::size_t k = 0; k < n_; ++k) {
            const cplx c = inverse ? std::conj(chirp_[k]) : chirp_[k];
            a[k] = x[k] * c;
        }
        radix2(a.data(), conv_len_, false);
        if (inverse) {
            for (std::size_t k = 0; k < conv_len_; ++k) a[k] *= std::conj(kernel_fft_[k]);
        } else {
            for (std::size_t k = 0; k < conv_len_; ++k) a[k] *= kernel_fft_[k];
        }
        radix2(a.data(), conv_len_, true);
        const double scale = 1.0 / static_cast<double>(conv_len_);
        for (std::size_t k = 0; k < n_; ++k) {
            const cplx c = inverse ? std::conj(chirp_[k]) : chirp_[k];
            x[k] = a[k] * scale * c;
        }
    }

    static constexpr double pi() { return 3.141592653589793238462643383279502884; }

    std::size_t n_ = 0;
    bool bluestein_ = false;
    std::size_t conv_len_ = 0;
    std::vector<cplx> twiddle_;
    std::vector<std::size_t> bitrev_;
    std::vector<cplx> chirp_;
    std::vector<cplx> kernel_fft_;
};

// Convenience forward transform of a real signal.
inline std::vector<std::complex<double>> fft_real(const std::vector<double>& x) {
    std::vector<std::complex<double>> buf(x.begin(), x.end());
    Fft::plan(x.size()).forward(buf);
    return buf;
}

// Index of the dominant nonnegative-frequency bin; handy as a test oracle and
// for peak checks on synthetic tones.
inline std::size_t dominant_bin(const std::vector<double>& x) {
    const auto spec = fft_real(x);
    std::size_t best = 0;
    double best_mag = -1.0;
    for (std::size_t k = 0; k <= spec.size() / 2; ++k) {
        const double m = std::abs(spec[k]);
        if (m > best_mag) {
            best_mag = m;
            best = k;
        }
    }
    return best;
}

// Dominant frequency in Hz of a real signal sampled at `sample_rate`.
inline double dominant_frequency(const std::vector<double>& x, double sample_rate) {
    if (x.empty()) return 0.0;
    return static_cast<double>(dominant_bin(x)) * sample_rate / static_cast<double>(x.size());
}

}  // namespace hive
