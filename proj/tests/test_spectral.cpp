#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <vector>

#include "hive/spectral.hpp"

namespace {

hive::AudioClip tone(double freq, double seconds, int rate, double amp = 1.0) {
    hive::AudioClip clip;
    clip.sample_rate = rate;
    clip.samples.resize(static_cast<std::size_t>(seconds * rate));
    for (std::size_t i = 0; i < clip.samples.size(); ++i)
        clip.samples[i] =
            amp * std::sin(2.0 * 3.141592653589793 * freq * static_cast<double>(i) / rate);
    return clip;
}

}  // namespace

TEST_CASE("60 s at 22.05 kHz with window 2048 hop 512 gives 2581x1025", "[spectral]") {
    hive::AudioClip clip;
    clip.sample_rate = 22050;
    clip.samples.assign(1323000, 0.0);
    const auto spec = hive::stft_magnitude(clip, 2048, 512);
    REQUIRE(spec.frames() == 2581);
    REQUIRE(spec.bands() == 1025);
    for (double v : spec.data.data()) REQUIRE(v == 0.0);
}

TEST_CASE("a 1 kHz tone peaks at bin 93 in every frame", "[spectral]") {
    const auto clip = tone(1000.0, 1.0, 22050);
    const auto spec = hive::stft_magnitude(clip, 2048, 512);
    for (std::size_t f = 0; f < spec.frames(); ++f) {
        const double* row = spec.data.row(f);
        std::size_t argmax = 0;
        for (std::size_t k = 1; k < spec.bands(); ++k)
            if (row[k] > row[argmax]) argmax = k;
        REQUIRE(argmax == 93);
    }
}

TEST_CASE("stft magnitude scales linearly with amplitude", "[spectral]") {
    const auto clip1 = tone(500.0, 0.5, 22050, 0.4);
    auto clip2 = clip1;
    for (auto& s : clip2.samples) s *= 2.0;
    const auto spec1 = hive::stft_magnitude(clip1, 1024, 256);
    const auto spec2 = hive::stft_magnitude(clip2, 1024, 256);
    double sum1 = 0.0, sum2 = 0.0;
    for (double v : spec1.data.data()) sum1 += v;
    for (double v : spec2.data.data()) sum2 += v;
    REQUIRE(sum2 == Catch::Approx(2.0 * sum1).epsilon(1e-9));
}

TEST_CASE("clip shorter than one window is rejected", "[spectral]") {
    hive::AudioClip clip;
    clip.sample_rate = 22050;
    clip.samples.assign(1000, 0.1);
    REQUIRE_THROWS_AS(hive::stft_magnitude(clip, 2048, 512), hive::DataError);
}

TEST_CASE("mel filterbank has contiguous nonnegative filters with rising peaks", "[spectral]") {
    std::vector<double> bin_hz(1025);
    for (std::size_t k = 0; k < bin_hz.size(); ++k) bin_hz[k] = k * 22050.0 / 2048.0;
    const auto fb = hive::mel_filterbank(bin_hz, 120, 0.0, 11025.0);
    REQUIRE(fb.rows() == 120);

    double prev_peak_hz = -1.0;
    for (std::size_t m = 0; m < fb.rows(); ++m) {
        std::size_t first = bin_hz.size(), last = 0, argmax = 0;
        for (std::size_t k = 0; k < fb.cols(); ++k) {
            REQUIRE(fb(m, k) >= 0.0);
            if (fb(m, k) > 0.0) {
                first = std::min(first, k);
                last = std::max(last, k);
            }
            if (fb(m, k) > fb(m, argmax)) argmax = k;
        }
        REQUIRE(first <= last);  // nonempty support
        for (std::size_t k = first; k <= last; ++k) REQUIRE(fb(m, k) > 0.0);  // contiguous
        REQUIRE(bin_hz[argmax] > prev_peak_hz);
        prev_peak_hz = bin_hz[argmax];
    }
}

TEST_CASE("mel spectrogram of the 2581-frame matrix is 2581x120", "[spectral]") {
    hive::AudioClip clip;
    clip.sample_rate = 22050;
    clip.samples.assign(1323000, 0.0);
    auto spec = hive::stft_magnitude(clip, 2048, 512);
    const auto mel = hive::mel_spectrogram(spec, 120);
    REQUIRE(mel.frames() == 2581);
    REQUIRE(mel.bands() == 120);
    for (double v : mel.data.data()) REQUIRE(v == 0.0);

    SECTION("fmax above Nyquist is rejected") {
        REQUIRE_THROWS_AS(hive::mel_spectrogram(spec, 120, 0.0, 12000.0), hive::DataError);
    }
}

TEST_CASE("flat spectrum maps to per-filter weight sums with growing widths", "[spectral]") {
    std::vector<double> bin_hz(1025);
    for (std::size_t k = 0; k < bin_hz.size(); ++k) bin_hz[k] = k * 22050.0 / 2048.0;

    hive::FeatureMatrix flat;
    flat.band_kind = hive::BandKind::LinearHz;
    flat.band_centers = bin_hz;
    flat.data = hive::Matrix(1, bin_hz.size(), 1.0);

    const auto mel = hive::mel_spectrogram(flat, 40);
    const auto fb = hive::mel_filterbank(bin_hz, 40, 0.0, bin_hz.back());
    double prev_sum = 0.0;
    for (std::size_t m = 0; m < 40; ++m) {
        double weight_sum = 0.0;
        for (std::size_t k = 0; k < fb.cols(); ++k) weight_sum += fb(m, k);
        REQUIRE(mel.data(0, m) == Catch::Approx(weight_sum).margin(1e-12));
        // Slaney scale: constant width below 1 kHz, growing above
        REQUIRE(weight_sum >= prev_sum - 1.0);
        prev_sum = weight_sum;
    }
    // the last (widest) filter clearly outweighs the first
    double first = 0.0, last = 0.0;
    for (std::size_t k = 0; k < fb.cols(); ++k) {
        first += fb(0, k);
        last += fb(39, k);
    }
    REQUIRE(last > 4.0 * first);
}

TEST_CASE("log_mel floors silence and maps 1 to 0", "[spectral]") {
    hive::FeatureMatrix mel;
    mel.band_kind = hive::BandKind::Mel;
    mel.data = hive::Matrix(3, 4, 0.0);
    mel.data(1, 2) = 1.0;
    const auto logm = hive::log_mel(mel, 1e-10);
    REQUIRE(logm.data(0, 0) == Catch::Approx(std::log(1e-10)));
    REQUIRE(logm.data(1, 2) == 0.0);
}

TEST_CASE("log preserves monotone ordering within a column", "[spectral]") {
    hive::FeatureMatrix mel;
    mel.band_kind = hive::BandKind::Mel;
    mel.data = hive::Matrix(5, 1);
    for (std::size_t r = 0; r < 5; ++r) mel.data(r, 0) = 0.5 + static_cast<double>(r);
    const auto logm = hive::log_mel(mel);
    for (std::size_t r = 1; r < 5; ++r) REQUIRE(logm.data(r, 0) > logm.data(r - 1, 0));
}

TEST_CASE("DCT of a constant frame puts everything in coefficient 0", "[spectral]") {
    hive::FeatureMatrix logmel;
    logmel.band_kind = hive::BandKind::Mel;
    logmel.data = hive::Matrix(1, 120, 2.5);
    const auto out = hive::mfcc(logmel, 20);
    REQUIRE(out.data(0, 0) == Catch::Approx(2.5 * std::sqrt(120.0)));
    for (std::size_t k = 1; k < 20; ++k) REQUIRE(std::abs(out.data(0, k)) < 1e-12);
}

TEST_CASE("mfcc keeps 20 of 120 bands", "[spectral]") {
    hive::FeatureMatrix logmel;
    logmel.band_kind = hive::BandKind::Mel;
    logmel.data = hive::Matrix(7, 120, 0.25);
    const auto out = hive::mfcc(logmel, 20);
    REQUIRE(out.frames() == 7);
    REQUIRE(out.bands() == 20);
}

TEST_CASE("full-order DCT is orthonormal (inverse reproduces the frame)", "[spectral]") {
    std::mt19937_64 rng(21);
    std::normal_distribution<double> dist(0.0, 1.0);
    hive::FeatureMatrix logmel;
    logmel.band_kind = hive::BandKind::Mel;
    logmel.data = hive::Matrix(1, 120);
    for (auto& v : logmel.data.data()) v = dist(rng);

    const auto coeffs = hive::mfcc(logmel, 120);
    // invert: x_n = sum_k c_k * basis_kn (transpose of the orthonormal basis)
    const double pi = 3.141592653589793;
    for (std::size_t n = 0; n < 120; ++n) {
        double acc = 0.0;
        for (std::size_t k = 0; k < 120; ++k) {
            const double scale = k == 0 ? std::sqrt(1.0 / 120.0) : std::sqrt(2.0 / 120.0);
            acc += coeffs.data(0, k) * scale *
                   std::cos(pi * static_cast<double>(k) * (2.0 * static_cast<double>(n) + 1.0) /
                            240.0);
        }
        REQUIRE(acc == Catch::Approx(logmel.data(0, n)).margin(1e-9));
    }
}

TEST_CASE("amplitude gain only moves MFCC coefficient 0", "[spectral]") {
    // broadband noise keeps every mel band above the log floor, where the
    // gain-becomes-additive-constant argument applies
    hive::AudioClip clip;
    clip.sample_rate = 22050;
    clip.samples.resize(22050 / 2);
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> dist(-0.1, 0.1);
    for (auto& s : clip.samples) s = dist(rng);
    auto scaled = clip;
    for (auto& s : scaled.samples) s *= 3.0;

    const auto pipeline = [](const hive::AudioClip& c) {
        return hive::mfcc(hive::log_mel(hive::mel_spectrogram(
                              hive::stft_magnitude(c, 2048, 512), 120)),
                          20);
    };
    const auto a = pipeline(clip);
    const auto b = pipeline(scaled);
    for (std::size_t f = 0; f < a.frames(); ++f) {
        REQUIRE(std::abs(a.data(f, 0) - b.data(f, 0)) > 0.1);  // gain lands here
        for (std::size_t k = 1; k < 20; ++k)
            REQUIRE(a.data(f, k) == Catch::Approx(b.data(f, k)).margin(1e-6));
    }
}
