#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <vector>

#include "hive/zscore.hpp"

TEST_CASE("two-point fit gives mean (1,1) and std (1,1)", "[zscore]") {
    const std::vector<std::vector<double>> samples = {{0.0, 0.0}, {2.0, 2.0}};
    const auto stats = hive::zscore_fit(samples);
    REQUIRE(stats.mean == std::vector<double>{1.0, 1.0});
    REQUIRE(stats.std_dev == std::vector<double>{1.0, 1.0});
}

TEST_CASE("constant band records zero std and divides by one", "[zscore]") {
    const std::vector<std::vector<double>> samples = {{5.0, 1.0}, {5.0, 3.0}};
    const auto stats = hive::zscore_fit(samples);
    REQUIRE(stats.zero_std[0] == 1);
    REQUIRE(stats.zero_std[1] == 0);
    std::vector<double> v = {7.0, 2.0};
    hive::zscore_apply(stats, v);
    REQUIRE(v[0] == 2.0);  // (7-5)/1
    REQUIRE(v[1] == 0.0);
}

TEST_CASE("re-estimating on the normalized fit set gives mean 0 std 1", "[zscore]") {
    std::mt19937_64 rng(17);
    std::normal_distribution<double> dist(3.0, 2.5);
    std::vector<hive::Matrix> samples;
    for (int s = 0; s < 6; ++s) {
        hive::Matrix m(11, 4);
        for (auto& v : m.data()) v = dist(rng);
        samples.push_back(std::move(m));
    }
    const auto stats = hive::zscore_fit(samples, hive::ZScoreMode::FrequencyWise);
    for (auto& m : samples) hive::zscore_apply(stats, m);
    const auto restats = hive::zscore_fit(samples, hive::ZScoreMode::FrequencyWise);
    for (std::size_t c = 0; c < 4; ++c) {
        REQUIRE(std::abs(restats.mean[c]) < 1e-9);
        REQUIRE(restats.std_dev[c] == Catch::Approx(1.0).margin(1e-9));
    }
}

TEST_CASE("apply at the mean gives zeros; unit stats are the identity", "[zscore]") {
    const std::vector<std::vector<double>> samples = {{1.0, -2.0}, {3.0, 4.0}};
    auto stats = hive::zscore_fit(samples);
    std::vector<double> v = stats.mean;
    hive::zscore_apply(stats, v);
    REQUIRE(v == std::vector<double>{0.0, 0.0});

    hive::ZScoreStats unit;
    unit.mode = hive::ZScoreMode::PerFeature;
    unit.mean = {0.0, 0.0};
    unit.std_dev = {1.0, 1.0};
    unit.zero_std = {0, 0};
    std::vector<double> w = {0.25, -8.5};
    auto w2 = w;
    hive::zscore_apply(unit, w2);
    REQUIRE(w2 == w);
}

TEST_CASE("apply then unapply reproduces the input", "[zscore]") {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> dist(-5.0, 5.0);
    std::vector<std::vector<double>> samples(4, std::vector<double>(9));
    for (auto& s : samples)
        for (auto& v : s) v = dist(rng);
    const auto stats = hive::zscore_fit(samples);
    auto v = samples[2];
    hive::zscore_apply(stats, v);
    hive::zscore_unapply(stats, v);
    for (std::size_t i = 0; i < v.size(); ++i)
        REQUIRE(v[i] == Catch::Approx(samples[2][i]).margin(1e-12));
}

TEST_CASE("frequency-wise mode pools every frame of every sample", "[zscore]") {
    hive::Matrix a(2, 1), b(2, 1);
    a(0, 0) = 0.0;
    a(1, 0) = 2.0;
    b(0, 0) = 4.0;
    b(1, 0) = 6.0;
    const auto stats = hive::zscore_fit(std::vector<hive::Matrix>{a, b},
                                        hive::ZScoreMode::FrequencyWise);
    REQUIRE(stats.mean[0] == 3.0);
    REQUIRE(stats.std_dev[0] == Catch::Approx(std::sqrt(5.0)));  // population over {0,2,4,6}
}

TEST_CASE("apply is affine per band (superposition)", "[zscore]") {
    const std::vector<std::vector<double>> samples = {{1.0, 0.0}, {2.0, 10.0}, {6.0, 2.0}};
    const auto stats = hive::zscore_fit(samples);
    std::vector<double> x = {0.5, 3.0}, y = {-1.5, 7.0};
    const double alpha = 0.3;
    std::vector<double> combo(2), x_n = x, y_n = y;
    for (std::size_t i = 0; i < 2; ++i)
        combo[i] = alpha * x[i] + (1.0 - alpha) * y[i];
    hive::zscore_apply(stats, x_n);
    hive::zscore_apply(stats, y_n);
    hive::zscore_apply(stats, combo);
    for (std::size_t i = 0; i < 2; ++i)
        REQUIRE(combo[i] == Catch::Approx(alpha * x_n[i] + (1.0 - alpha) * y_n[i]).margin(1e-12));
}

TEST_CASE("empty or inconsistent inputs are rejected", "[zscore]") {
    REQUIRE_THROWS_AS(hive::zscore_fit(std::vector<std::vector<double>>{}),
                      std::invalid_argument);
    std::vector<hive::Matrix> bad = {hive::Matrix(2, 3), hive::Matrix(2, 4)};
    REQUIRE_THROWS_AS(hive::zscore_fit(bad, hive::ZScoreMode::FrequencyWise),
                      std::invalid_argument);
    const auto stats = hive::zscore_fit(std::vector<std::vector<double>>{{1.0, 2.0}, {0.0, 1.0}});
    std::vector<double> wrong = {1.0, 2.0, 3.0};
    REQUIRE_THROWS_AS(hive::zscore_apply(stats, wrong), std::invalid_argument);
}
