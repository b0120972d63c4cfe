#pragma once

// Pitch shifting for augmentation: resample by 2^(-s/12), then stretch the
// result back to the original duration with overlap-add of 75%-overlapped
// Hann grains. Duration is preserved exactly, so downstream segment counts
// do not change.

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "hive/audio.hpp"

namespace hive {

inline AudioClip pitch_shift(const AudioClip& clip, double semitones) {
    if (std::abs(semitones) > 12.0)
        throw std::invalid_argument("pitch_shift: |semitones| must be <= 12");
    const std::size_t n = clip.samples.size();
    AudioClip out;
    out.sample_rate = clip.sample_rate;
    out.source_id = clip.source_id;
    if (n == 0) return out;

    const double freq_scale = std::pow(2.0, semitones / 12.0);
    // Shortening by 1/freq_scale and playing at the original rate raises all
    // frequencies by freq_scale.
    const std::vector<double> shifted = detail::resample_ratio(clip.samples, 1.0 / freq_scale);
    const std::size_t m = shifted.size();

    std::size_t grain = std::min<std::size_t>(2048, m);
    if (grain < 4) {
        out.samples = shifted;
        out.samples.resize(n, 0.0);
        return out;
    }
    grain &= ~std::size_t{3};  // multiple of 4 so the hop divides evenly
    const std::size_t syn_hop = grain / 4;

    std::vector<double> window(grain);
    for (std::size_t i = 0; i < grain; ++i)
        window[i] = 0.5 * (1.0 - std::cos(2.0 * 3.141592653589793 * static_cast<double>(i) /
                                          static_cast<double>(grain)));

    std::vector<double> acc(n + grain, 0.0);
    std::vector<double> wsum(n + grain, 0.0);
    const double stretch = static_cast<double>(m) / static_cast<double>(n);
    for (std::size_t pos = 0; pos < n; pos += syn_hop) {
        // grain centered consistently in input and output time
        const double src_center = (static_cast<double>(pos) + grain / 2.0) * stretch;
        const auto src_begin =
            static_cast<std::ptrdiff_t>(std::llround(src_center - grain / 2.0));
        for (std::size_t i = 0; i < grain; ++i) {
            const std::ptrdiff_t j = src_begin + static_cast<std::ptrdiff_t>(i);
            const double v =
                (j >= 0 && j < static_cast<std::ptrdiff_t>(m)) ? shifted[static_cast<std::size_t>(j)] : 0.0;
            acc[pos + i] += window[i] * v;
            wsum[pos + i] += window[i];
        }
    }

    out.samples.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        out.samples[i] = wsum[i] > 1e-6 ? acc[i] / wsum[i] : 0.0;
    return out;
}

// The uniform [-1, 1] semitone draws used by augment(), exposed so callers
// and tests can inspect them.
inline std::vector<double> augment_offsets(std::size_t versions, uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    std::vector<double> out(versions);
    for (auto& v : out) v = dist(rng);
    return out;
}

// Pitch-shifted copies of a clip, each by an independent uniform draw from
// [-1, +1] semitones. Deterministic per seed.
inline std::vector<AudioClip> augment(const AudioClip& clip, std::size_t versions, uint64_t seed) {
    if (versions == 0) throw std::invalid_argument("augment: versions must be >= 1");
    const auto offsets = augment_offsets(versions, seed);
    std::vector<AudioClip> out;
    out.reserve(versions);
    for (double s : offsets) out.push_back(pitch_shift(clip, s));
    return out;
}

}  // namespace hive
