#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "hive/fft.hpp"
#include "hive/pitch.hpp"

namespace {

hive::AudioClip tone(double freq, double seconds, int rate) {
    hive::AudioClip clip;
    clip.sample_rate = rate;
    clip.samples.resize(static_cast<std::size_t>(seconds * rate));
    for (std::size_t i = 0; i < clip.samples.size(); ++i)
        clip.samples[i] =
            0.5 * std::sin(2.0 * 3.141592653589793 * freq * static_cast<double>(i) / rate);
    return clip;
}

double correlation(const std::vector<double>& a, const std::vector<double>& b) {
    double saa = 0, sbb = 0, sab = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        saa += a[i] * a[i];
        sbb += b[i] * b[i];
        sab += a[i] * b[i];
    }
    return sab / std::sqrt(saa * sbb);
}

}  // namespace

TEST_CASE("zero-semitone shift is near-identity", "[pitch]") {
    const auto clip = tone(330.0, 1.0, 22050);
    const auto out = hive::pitch_shift(clip, 0.0);
    REQUIRE(out.samples.size() == clip.samples.size());
    REQUIRE(correlation(out.samples, clip.samples) > 0.999);
}

TEST_CASE("+1 semitone moves 440 Hz to about 466 Hz", "[pitch]") {
    const auto clip = tone(440.0, 2.0, 22050);
    const auto out = hive::pitch_shift(clip, 1.0);
    REQUIRE(out.samples.size() == clip.samples.size());
    REQUIRE(hive::dominant_frequency(out.samples, 22050.0) == Catch::Approx(466.16).margin(2.0));
}

TEST_CASE("-1 semitone moves 440 Hz to about 415 Hz", "[pitch]") {
    const auto clip = tone(440.0, 2.0, 22050);
    const auto out = hive::pitch_shift(clip, -1.0);
    REQUIRE(out.samples.size() == clip.samples.size());
    REQUIRE(hive::dominant_frequency(out.samples, 22050.0) == Catch::Approx(415.30).margin(2.0));
}

TEST_CASE("augment produces the requested number of same-length versions", "[pitch]") {
    const auto clip = tone(250.0, 0.5, 16000);
    const auto versions = hive::augment(clip, 3, 77);
    REQUIRE(versions.size() == 3);
    for (const auto& v : versions) REQUIRE(v.samples.size() == clip.samples.size());
}

TEST_CASE("augment is deterministic per seed", "[pitch]") {
    const auto clip = tone(250.0, 0.5, 16000);
    const auto a = hive::augment(clip, 3, 123);
    const auto b = hive::augment(clip, 3, 123);
    for (std::size_t i = 0; i < a.size(); ++i) REQUIRE(a[i].samples == b[i].samples);
}

TEST_CASE("augment draws stay within one semitone", "[pitch]") {
    for (uint64_t seed = 0; seed < 50; ++seed) {
        for (double s : hive::augment_offsets(3, seed)) {
            REQUIRE(s >= -1.0);
            REQUIRE(s <= 1.0);
        }
    }
}
