#pragma once

// Synthetic hive audio. Each hive is a harmonic series over a fundamental
// plus a white-noise floor; the queen state shifts the fundamental and
// reweights the harmonics, which is what the classifiers have to pick up.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "hive/audio.hpp"
#include "hive/manifest.hpp"

namespace hive {

struct HiveProfile {
    std::string hive_id;
    double fundamental_hz = 220.0;
    std::vector<double> harmonic_amps = {1.0, 0.5, 0.25};
    double noise_floor = 0.05;  // white-noise amplitude relative to unit harmonics
    double queen_shift_hz = 40.0;
    std::vector<double> queen_harmonic_gain = {1.0, 1.5, 0.6};
};

// Deterministic per (profile, queen, seed); harmonic phases and the noise
// sequence come from the seed. Output is RMS-normalized to 0.15.
inline AudioClip synth_hive_clip(const HiveProfile& profile, bool queen, double duration_s,
                                 int rate, uint64_t seed) {
    if (rate <= 0) throw std::invalid_argument("synth_hive_clip: rate must be positive");
    if (duration_s <= 0.0) throw std::invalid_argument("synth_hive_clip: duration must be positive");

    const auto n = static_cast<std::size_t>(std::llround(duration_s * rate));
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> phase_dist(0.0, 2.0 * 3.141592653589793);
    std::normal_distribution<double> noise(0.0, 1.0);

    const double f0 = profile.fundamental_hz + (queen ? profile.queen_shift_hz : 0.0);
    std::vector<double> amps = profile.harmonic_amps;
    if (queen) {
        for (std::size_t k = 0; k < amps.size(); ++k) {
            const double gain = k < profile.queen_harmonic_gain.size()
                                    ? profile.queen_harmonic_gain[k]
                                    : (profile.queen_harmonic_gain.empty()
                                           ? 1.0
                                           : profile.queen_harmonic_gain.back());
            amps[k] *= gain;
        }
    }
    std::vector<double> phases(amps.size());
    for (auto& p : phases) p = phase_dist(rng);

    AudioClip clip;
    clip.sample_rate = rate;
    clip.source_id = profile.hive_id + (queen ? ":queen" : ":queenless");
    clip.samples.resize(n, 0.0);
    const double two_pi = 2.0 * 3.141592653589793;
    for (std::size_t k = 0; k < amps.size(); ++k) {
        const double f = f0 * static_cast<double>(k + 1);
        if (f >= rate / 2.0) continue;  // keep the tone bank band-limited
        const double step = two_pi * f / rate;
        for (std::size_t i = 0; i < n; ++i)
            clip.samples[i] += amps[k] * std::sin(step * static_cast<double>(i) + phases[k]);
    }
    if (profile.noise_floor > 0.0) {
        for (std::size_t i = 0; i < n; ++i) clip.samples[i] += profile.noise_floor * noise(rng);
    }

    const double current = clip.rms();
    if (current > 0.0) {
        const double scale = 0.15 / current;
        for (auto& s : clip.samples) s = std::clamp(s * scale, -1.0, 1.0);
    }
    return clip;
}

// Description of a full synthetic dataset: every hive contributes
// `clips_per_state` clips for each queen state.
struct SynthSpec {
    int sample_rate = 16000;
    double duration_s = 600.0;
    std::size_t clips_per_state = 6;
    std::vector<HiveProfile> hives;
};

// Writes WAVs plus a manifest.csv into out_dir and returns the manifest.
// Byte-identical output for a fixed (spec, seed).
inline DatasetManifest generate_dataset(const SynthSpec& spec,
                                        const std::filesystem::path& out_dir, uint64_t seed) {
    if (spec.hives.empty()) throw DataError("synth spec lists no hives");
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw DataError("cannot create output directory: " + out_dir.string());

    DatasetManifest manifest;
    for (std::size_t h = 0; h < spec.hives.size(); ++h) {
        const auto& profile = spec.hives[h];
        for (int queen = 0; queen <= 1; ++queen) {
            for (std::size_t i = 0; i < spec.clips_per_state; ++i) {
                // distinct deterministic stream per (hive, state, index)
                const uint64_t clip_seed =
                    seed ^ (0x9e3779b97f4a7c15ULL * (h * 2 + static_cast<uint64_t>(queen) + 1)) ^
                    (0xbf58476d1ce4e5b9ULL * (i + 1));
                const auto clip = synth_hive_clip(profile, queen != 0, spec.duration_s,
                                                  spec.sample_rate, clip_seed);
                const std::string name =
                    profile.hive_id + "_q" + std::to_string(queen) + "_" + std::to_string(i) + ".wav";
                const auto wav_path = out_dir / name;
                save_wav(clip, wav_path);
                ClipEntry entry;
                entry.path = wav_path.lexically_normal().string();
                entry.hive_id = profile.hive_id;
                entry.queen_present = queen != 0;
                entry.duration_s = spec.duration_s;
                manifest.entries.push_back(std::move(entry));
            }
        }
    }
    save_manifest(manifest, out_dir / "manifest.csv");
    return manifest;
}

}  // namespace hive
