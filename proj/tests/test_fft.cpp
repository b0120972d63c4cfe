#include <catch2/catch_amalgamated.hpp>

#include <complex>
#include <random>
#include <vector>

#include "hive/fft.hpp"

namespace {

// Quadratic-time reference DFT.
std::vector<std::complex<double>> naive_dft(const std::vector<std::complex<double>>& x) {
    const std::size_t n = x.size();
    std::vector<std::complex<double>> out(n);
    const double pi = 3.141592653589793;
    for (std::size_t k = 0; k < n; ++k) {
        std::complex<double> acc = 0.0;
        for (std::size_t t = 0; t < n; ++t) {
            const double a = -2.0 * pi * static_cast<double>(k) * static_cast<double>(t) /
                             static_cast<double>(n);
            acc += x[t] * std::complex<double>(std::cos(a), std::sin(a));
        }
        out[k] = acc;
    }
    return out;
}

std::vector<std::complex<double>> random_signal(std::size_t n, uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> dist(0.0, 1.0);
    std::vector<std::complex<double>> x(n);
    for (auto& v : x) v = {dist(rng), dist(rng)};
    return x;
}

}  // namespace

TEST_CASE("fft matches the naive DFT on power-of-two and odd sizes", "[fft]") {
    for (std::size_t n : {2u, 8u, 64u, 12u, 100u, 125u, 1000u}) {
        const auto x = random_signal(n, 1000 + n);
        auto got = x;
        hive::Fft::plan(n).forward(got);
        const auto want = naive_dft(x);
        for (std::size_t k = 0; k < n; ++k) {
            INFO("n=" << n << " k=" << k);
            REQUIRE(std::abs(got[k] - want[k]) < 1e-9);
        }
    }
}

TEST_CASE("inverse(forward(x)) is the identity", "[fft]") {
    for (std::size_t n : {16u, 50u, 32000u}) {
        const auto x = random_signal(n, 7 * n);
        auto buf = x;
        const auto& plan = hive::Fft::plan(n);
        plan.forward(buf);
        plan.inverse(buf);
        double worst = 0.0;
        for (std::size_t i = 0; i < n; ++i) worst = std::max(worst, std::abs(buf[i] - x[i]));
        REQUIRE(worst < 1e-10);
    }
}

TEST_CASE("dominant_frequency finds a pure tone", "[fft]") {
    const std::size_t n = 32000;
    const double fs = 32000.0, f0 = 440.0;
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i)
        x[i] = std::sin(2.0 * 3.141592653589793 * f0 * static_cast<double>(i) / fs);
    REQUIRE(hive::dominant_frequency(x, fs) == Catch::Approx(440.0).margin(1.0));
}
