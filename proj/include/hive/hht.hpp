#pragma once

// Hilbert spectral analysis of EMD modes. Each IMF becomes an analytic
// signal (negative frequencies zeroed in the spectrum), whose modulus gives
// instantaneous amplitude and whose unwrapped phase difference gives
// instantaneous frequency. Per one-second frame this yields a mean
// normalized frequency and mean amplitude per mode; frames stack into a
// spectrogram which can be binned down to a compact band vector.

#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

#include "hive/audio.hpp"
#include "hive/emd.hpp"
#include "hive/errors.hpp"
#include "hive/fft.hpp"
#include "hive/parallel.hpp"

namespace hive {

// Amplitude/frequency tracks of one IMF. inst_freq has length N-1 (forward
// phase difference); values are clamped to [0, f_s/2].
struct AnalyticTrack {
    std::vector<double> amplitude;
    std::vector<double> inst_freq;
    std::size_t imf_index = 0;
};

inline AnalyticTrack analytic(const std::vector<double>& imf, double f_s) {
    if (imf.size() < 4) throw std::invalid_argument("analytic: signal too short");
    const std::size_t n = imf.size();

    std::vector<std::complex<double>> spec(imf.begin(), imf.end());
    const Fft& plan = Fft::plan(n);
    plan.forward(spec);
    // zero negative frequencies, double positives; DC and Nyquist stay
    for (std::size_t k = 1; k < (n + 1) / 2; ++k) spec[k] *= 2.0;
    for (std::size_t k = n / 2 + 1; k < n; ++k) spec[k] = 0.0;
    plan.inverse(spec);

    AnalyticTrack track;
    track.amplitude.resize(n);
    std::vector<double> phase(n);
    for (std::size_t i = 0; i < n; ++i) {
        track.amplitude[i] = std::abs(spec[i]);
        phase[i] = std::arg(spec[i]);
    }
    // unwrap
    const double pi = 3.141592653589793;
    double offset = 0.0;
    for (std::size_t i = 1; i < n; ++i) {
        double d = phase[i] + offset - phase[i - 1];
        while (d > pi) {
            offset -= 2.0 * pi;
            d -= 2.0 * pi;
        }
        while (d < -pi) {
            offset += 2.0 * pi;
            d += 2.0 * pi;
        }
        phase[i] += offset;
    }
    track.inst_freq.resize(n - 1);
    const double scale = f_s / (2.0 * pi);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double f = scale * (phase[i + 1] - phase[i]);
        track.inst_freq[i] = std::clamp(f, 0.0, f_s / 2.0);
    }
    return track;
}

// Per-IMF summary of one frame: mean normalized frequency (instantaneous
// frequency weighted by squared instantaneous amplitude) and mean amplitude.
struct HhtFrameFeature {
    std::vector<double> mnf;
    std::vector<double> mean_amp;
    double frame_time_s = 0.0;
};

// The first and last 1% of samples are excluded from the statistics to keep
// Hilbert edge artifacts out. A zero-amplitude IMF reports mnf 0.
inline HhtFrameFeature frame_features(const ImfSet& imf_set, double f_s) {
    HhtFrameFeature feat;
    feat.mnf.reserve(imf_set.imfs.size());
    feat.mean_amp.reserve(imf_set.imfs.size());
    for (std::size_t j = 0; j < imf_set.imfs.size(); ++j) {
        AnalyticTrack track = analytic(imf_set.imfs[j], f_s);
        track.imf_index = j;
        const std::size_t nf = track.inst_freq.size();
        std::size_t margin = nf / 100;
        if (2 * margin >= nf) margin = 0;
        double amp_sum = 0.0, weight_sum = 0.0, weighted_freq = 0.0;
        std::size_t count = 0;
        for (std::size_t i = margin; i < nf - margin; ++i) {
            const double a = track.amplitude[i];
            amp_sum += a;
            weight_sum += a * a;
            weighted_freq += track.inst_freq[i] * a * a;
            ++count;
        }
        feat.mean_amp.push_back(count > 0 ? amp_sum / static_cast<double>(count) : 0.0);
        feat.mnf.push_back(weight_sum > 0.0 ? weighted_freq / weight_sum : 0.0);
    }
    return feat;
}

// One HhtFrameFeature per second of audio.
struct HhtSpectrogram {
    std::vector<HhtFrameFeature> frames;
    double f_s = 0.0;
};

inline constexpr int kHhtSampleRate = 32000;

// Decomposes every one-second frame and summarizes it. The clip is resampled
// to 32 kHz when needed; frames are independent, so they may be processed by
// up to `workers` threads (output order is by frame index either way).
inline HhtSpectrogram hht_spectrogram(const AudioClip& clip, std::size_t workers = 1,
                                      const EmdConfig& cfg = {}) {
    const AudioClip& at_rate = clip;
    AudioClip resampled;
    const AudioClip* src = &at_rate;
    if (clip.sample_rate != kHhtSampleRate) {
        resampled = resample(clip, kHhtSampleRate);
        src = &resampled;
    }
    const auto frame_len = static_cast<std::size_t>(kHhtSampleRate);
    const std::size_t n_frames = src->samples.size() / frame_len;
    if (n_frames == 0)
        throw DataError("hht_spectrogram: clip shorter than one second (" +
                        std::to_string(src->samples.size()) + " samples)");

    HhtSpectrogram spec;
    spec.f_s = kHhtSampleRate;
    spec.frames.resize(n_frames);
    parallel_for(n_frames, workers, [&](std::size_t f) {
        std::vector<double> frame(src->samples.begin() + static_cast<std::ptrdiff_t>(f * frame_len),
                                  src->samples.begin() + static_cast<std::ptrdiff_t>((f + 1) * frame_len));
        ImfSet modes = decompose(frame, cfg);
        modes.source_frame = f;
        HhtFrameFeature feat = frame_features(modes, spec.f_s);
        feat.frame_time_s = static_cast<double>(f);
        spec.frames[f] = std::move(feat);
    });
    return spec;
}

// Aggregates a spectrogram over time into `out_bands` values: every
// (mnf, mean_amp) pair lands in its (fmax/bins)-wide frequency bin, bins are
// averaged over the frame count, then grouped bins/out_bands at a time.
// Pairs at or above fmax are discarded.
inline std::vector<double> hht_band_vector(const HhtSpectrogram& spec, double fmax = 6000.0,
                                           std::size_t bins = 6000, std::size_t out_bands = 20) {
    if (spec.frames.empty()) throw DataError("hht_band_vector: empty spectrogram");
    if (out_bands == 0 || bins % out_bands != 0)
        throw std::invalid_argument("hht_band_vector: bins must divide evenly into out_bands");
    if (fmax <= 0.0 || fmax > spec.f_s / 2.0)
        throw std::invalid_argument("hht_band_vector: fmax must lie in (0, f_s/2]");

    const double bin_width = fmax / static_cast<double>(bins);
    std::vector<double> acc(bins, 0.0);
    for (const auto& frame : spec.frames) {
        for (std::size_t j = 0; j < frame.mnf.size(); ++j) {
            const double f = frame.mnf[j];
            if (f >= fmax) continue;
            acc[static_cast<std::size_t>(f / bin_width)] += frame.mean_amp[j];
        }
    }
    const double inv_frames = 1.0 / static_cast<double>(spec.frames.size());
    const std::size_t group = bins / out_bands;
    std::vector<double> out(out_bands, 0.0);
    for (std::size_t b = 0; b < out_bands; ++b) {
        double sum = 0.0;
        for (std::size_t i = b * group; i < (b + 1) * group; ++i) sum += acc[i];
        out[b] = sum * inv_frames / static_cast<double>(group);
    }
    return out;
}

}  // namespace hive
