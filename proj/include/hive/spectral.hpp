#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "hive/audio.hpp"
#include "hive/errors.hpp"
#include "hive/fft.hpp"
#include "hive/matrix.hpp"

namespace hive {

// Band axis semantics of a FeatureMatrix. Values are part of the feature
// cache format; do not renumber.
enum class BandKind : uint8_t {
    LinearHz = 0,
    Mel = 1,
    Mfcc = 2,
    HhtBand = 3,
};

inline const char* band_kind_name(BandKind k) {
    switch (k) {
        case BandKind::LinearHz: return "linear-Hz";
        case BandKind::Mel: return "mel";
        case BandKind::Mfcc: return "mfcc";
        case BandKind::HhtBand: return "hht-band";
    }
    return "unknown";
}

// Time x band real matrix with axis metadata. band_centers (Hz) is filled by
// producers that have a meaningful frequency axis (STFT bins, Mel peaks).
struct FeatureMatrix {
    Matrix data;
    BandKind band_kind = BandKind::LinearHz;
    double frame_hop_s = 0.0;
    std::vector<double> band_centers;

    std::size_t frames() const { return data.rows(); }
    std::size_t bands() const { return data.cols(); }
};

namespace detail {

// Slaney mel scale: linear below 1 kHz, logarithmic above.
inline double hz_to_mel(double hz) {
    constexpr double lin_step = 200.0 / 3.0;
    constexpr double break_hz = 1000.0;
    constexpr double break_mel = break_hz / lin_step;
    const double log_step = std::log(6.4) / 27.0;
    if (hz < break_hz) return hz / lin_step;
    return break_mel + std::log(hz / break_hz) / log_step;
}

inline double mel_to_hz(double mel) {
    constexpr double lin_step = 200.0 / 3.0;
    constexpr double break_hz = 1000.0;
    constexpr double break_mel = break_hz / lin_step;
    const double log_step = std::log(6.4) / 27.0;
    if (mel < break_mel) return mel * lin_step;
    return break_hz * std::exp(log_step * (mel - break_mel));
}

}  // namespace detail

// Magnitude STFT with a periodic Hann window, no centering and no padding:
// frame f covers samples [f*hop, f*hop + window_len). Rows are frames,
// columns the window_len/2 + 1 nonnegative-frequency bins.
inline FeatureMatrix stft_magnitude(const AudioClip& clip, std::size_t window_len,
                                    std::size_t hop) {
    if (hop == 0 || window_len < hop)
        throw std::invalid_argument("stft_magnitude: need window_len >= hop >= 1");
    if (clip.samples.size() < window_len)
        throw DataError("stft_magnitude: clip shorter than one window (" +
                        std::to_string(clip.samples.size()) + " < " +
                        std::to_string(window_len) + " samples)");

    const std::size_t n_frames = 1 + (clip.samples.size() - window_len) / hop;
    const std::size_t n_bins = window_len / 2 + 1;

    std::vector<double> window(window_len);
    for (std::size_t i = 0; i < window_len; ++i)
        window[i] = 0.5 * (1.0 - std::cos(2.0 * 3.141592653589793 * static_cast<double>(i) /
                                          static_cast<double>(window_len)));

    const Fft& plan = Fft::plan(window_len);
    FeatureMatrix out;
    out.data = Matrix(n_frames, n_bins);
    out.band_kind = BandKind::LinearHz;
    out.frame_hop_s = static_cast<double>(hop) / clip.sample_rate;
    out.band_centers.resize(n_bins);
    for (std::size_t k = 0; k < n_bins; ++k)
        out.band_centers[k] =
            static_cast<double>(k) * clip.sample_rate / static_cast<double>(window_len);

    std::vector<std::complex<double>> buf(window_len);
    for (std::size_t f = 0; f < n_frames; ++f) {
        const double* src = clip.samples.data() + f * hop;
        for (std::size_t i = 0; i < window_len; ++i) buf[i] = src[i] * window[i];
        plan.forward(buf);
        double* row = out.data.row(f);
        for (std::size_t k = 0; k < n_bins; ++k) row[k] = std::abs(buf[k]);
    }
    return out;
}

// Triangular mel filterbank, one filter per row, peak value 1. Filter edges
// are n_mels + 2 points equally spaced on the Slaney mel scale between fmin
// and fmax, evaluated at the given bin frequencies.
inline Matrix mel_filterbank(const std::vector<double>& bin_hz, std::size_t n_mels, double fmin,
                             double fmax) {
    if (n_mels == 0) throw std::invalid_argument("mel_filterbank: n_mels must be >= 1");
    const double mel_lo = detail::hz_to_mel(fmin);
    const double mel_hi = detail::hz_to_mel(fmax);
    std::vector<double> edges(n_mels + 2);
    for (std::size_t i = 0; i < edges.size(); ++i)
        edges[i] = detail::mel_to_hz(mel_lo + (mel_hi - mel_lo) * static_cast<double>(i) /
                                                  static_cast<double>(n_mels + 1));

    Matrix fb(n_mels, bin_hz.size());
    for (std::size_t m = 0; m < n_mels; ++m) {
        const double left = edges[m], center = edges[m + 1], right = edges[m + 2];
        for (std::size_t k = 0; k < bin_hz.size(); ++k) {
            const double hz = bin_hz[k];
            double w = 0.0;
            if (hz > left && hz < right) {
                w = hz <= center ? (hz - left) / (center - left) : (right - hz) / (right - center);
            }
            fb(m, k) = w;
        }
    }
    return fb;
}

// Applies the mel filterbank to a linear-frequency magnitude spectrogram.
// fmax < 0 means Nyquist (the last bin's frequency).
inline FeatureMatrix mel_spectrogram(const FeatureMatrix& spec, std::size_t n_mels,
                                     double fmin = 0.0, double fmax = -1.0) {
    if (spec.band_kind != BandKind::LinearHz)
        throw std::invalid_argument("mel_spectrogram: input must be a linear-Hz spectrogram");
    if (spec.band_centers.size() != spec.bands())
        throw std::invalid_argument("mel_spectrogram: input lacks band centers");
    const double nyquist = spec.band_centers.back();
    if (fmax < 0.0) fmax = nyquist;
    if (fmax > nyquist + 1e-9)
        throw DataError("mel_spectrogram: fmax " + std::to_string(fmax) +
                        " exceeds Nyquist " + std::to_string(nyquist));

    const Matrix fb = mel_filterbank(spec.band_centers, n_mels, fmin, fmax);
    FeatureMatrix out;
    out.band_kind = BandKind::Mel;
    out.frame_hop_s = spec.frame_hop_s;
    out.data = Matrix(spec.frames(), n_mels);
    out.band_centers.resize(n_mels);
    {
        const double mel_lo = detail::hz_to_mel(fmin);
        const double mel_hi = detail::hz_to_mel(fmax);
        for (std::size_t m = 0; m < n_mels; ++m)
            out.band_centers[m] = detail::mel_to_hz(
                mel_lo + (mel_hi - mel_lo) * static_cast<double>(m + 1) /
                             static_cast<double>(n_mels + 1));
    }
    for (std::size_t f = 0; f < spec.frames(); ++f) {
        const double* src = spec.data.row(f);
        double* dst = out.data.row(f);
        for (std::size_t m = 0; m < n_mels; ++m) {
            const double* w = fb.row(m);
            double acc = 0.0;
            for (std::size_t k = 0; k < spec.bands(); ++k) acc += w[k] * src[k];
            dst[m] = acc;
        }
    }
    return out;
}

// Elementwise natural log with a floor that keeps digital silence finite.
inline FeatureMatrix log_mel(const FeatureMatrix& spec, double floor = 1e-10) {
    if (spec.band_kind != BandKind::Mel)
        throw std::invalid_argument("log_mel: input must be a mel spectrogram");
    if (floor <= 0.0) throw std::invalid_argument("log_mel: floor must be positive");
    FeatureMatrix out = spec;
    for (auto& v : out.data.data()) v = std::log(std::max(v, floor));
    return out;
}

// Orthonormal DCT-II per frame of a log-mel spectrogram, first n_coeffs kept.
inline FeatureMatrix mfcc(const FeatureMatrix& mel_log, std::size_t n_coeffs) {
    if (mel_log.band_kind != BandKind::Mel)
        throw std::invalid_argument("mfcc: input must be a (log-)mel spectrogram");
    const std::size_t n_mels = mel_log.bands();
    if (n_coeffs == 0 || n_coeffs > n_mels)
        throw std::invalid_argument("mfcc: need 1 <= n_coeffs <= n_mels");

    // DCT-II basis, rows orthonormal.
    Matrix basis(n_coeffs, n_mels);
    const double pi = 3.141592653589793;
    for (std::size_t k = 0; k < n_coeffs; ++k) {
        const double scale = k == 0 ? std::sqrt(1.0 / static_cast<double>(n_mels))
                                    : std::sqrt(2.0 / static_cast<double>(n_mels));
        for (std::size_t n = 0; n < n_mels; ++n)
            basis(k, n) = scale * std::cos(pi * static_cast<double>(k) *
                                           (2.0 * static_cast<double>(n) + 1.0) /
                                           (2.0 * static_cast<double>(n_mels)));
    }

    FeatureMatrix out;
    out.band_kind = BandKind::Mfcc;
    out.frame_hop_s = mel_log.frame_hop_s;
    out.data = Matrix(mel_log.frames(), n_coeffs);
    for (std::size_t f = 0; f < mel_log.frames(); ++f) {
        const double* src = mel_log.data.row(f);
        double* dst = out.data.row(f);
        for (std::size_t k = 0; k < n_coeffs; ++k) {
            const double* b = basis.row(k);
            double acc = 0.0;
            for (std::size_t n = 0; n < n_mels; ++n) acc += b[n] * src[n];
            dst[k] = acc;
        }
    }
    return out;
}

}  // namespace hive
