#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <random>
#include <vector>

#include "hive/eval.hpp"
#include "hive/svm.hpp"

namespace {

// Exhaustive search of the dual over an alpha grid with the equality
// constraint solved for the last coordinate.
double brute_force_dual(const std::vector<std::vector<double>>& x, const std::vector<int>& y,
                        double c, double gamma, double step) {
    double best = -1e300;
    const auto steps = static_cast<std::size_t>(std::llround(c / step));
    for (std::size_t i1 = 0; i1 <= steps; ++i1)
        for (std::size_t i2 = 0; i2 <= steps; ++i2)
            for (std::size_t i3 = 0; i3 <= steps; ++i3) {
                std::vector<double> alphas = {static_cast<double>(i1) * step,
                                              static_cast<double>(i2) * step,
                                              static_cast<double>(i3) * step, 0.0};
                // solve sum(alpha_i y_i) = 0 for alpha_4
                double partial = 0.0;
                for (std::size_t k = 0; k < 3; ++k) partial += alphas[k] * y[k];
                const double a4 = -partial * y[3];
                if (a4 < -1e-12 || a4 > c + 1e-12) continue;
                alphas[3] = std::clamp(a4, 0.0, c);
                best = std::max(best, hive::svm_dual_objective(x, y, alphas, gamma));
            }
    return best;
}

std::pair<std::vector<std::vector<double>>, std::vector<int>> gaussian_blobs(
    std::size_t per_class, double separation, uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, 1.0);
    std::vector<std::vector<double>> x;
    std::vector<int> y;
    for (std::size_t i = 0; i < per_class; ++i) {
        x.push_back({separation + noise(rng), noise(rng)});
        y.push_back(1);
        x.push_back({-separation + noise(rng), noise(rng)});
        y.push_back(-1);
    }
    return {x, y};
}

}  // namespace

TEST_CASE("rbf kernel closed forms", "[svm]") {
    const std::vector<double> x = {0.0, 0.0}, y = {1.0, 0.0};
    REQUIRE(hive::rbf_kernel(x, x, 2.7) == 1.0);
    REQUIRE(hive::rbf_kernel(x, y, 1.0) == Catch::Approx(0.3678794412).epsilon(1e-9));
    REQUIRE(hive::rbf_kernel(x, y, 1.0) == hive::rbf_kernel(y, x, 1.0));
    const std::vector<double> z = {1.0, 2.0, 3.0};
    REQUIRE_THROWS_AS(hive::rbf_kernel(x, z, 1.0), std::invalid_argument);
}

TEST_CASE("rbf kernel stays in (0, 1]", "[svm]") {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> dist(0.0, 4.0);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> a(5), b(5);
        for (std::size_t i = 0; i < 5; ++i) {
            a[i] = dist(rng);
            b[i] = dist(rng);
        }
        const double k = hive::rbf_kernel(a, b, 0.37);
        REQUIRE(k > 0.0);
        REQUIRE(k <= 1.0);
    }
}

TEST_CASE("default gamma is one over the feature count", "[svm]") {
    REQUIRE(hive::default_gamma(40) == 0.025);
    REQUIRE(hive::default_gamma(20) == 0.05);
    REQUIRE(hive::default_gamma(1) == 1.0);
}

TEST_CASE("two symmetric points put the boundary at the origin", "[svm]") {
    const std::vector<std::vector<double>> x = {{-1.0}, {1.0}};
    const std::vector<int> y = {-1, 1};
    const auto model = hive::svm_train(x, y, {}, 1);
    REQUIRE(model.support_vectors.size() == 2);
    REQUIRE(std::abs(hive::decision_score(model, {0.0})) < 0.1);
    REQUIRE(hive::decision_score(model, {1.0}) > 0.0);
    REQUIRE(hive::decision_score(model, {-1.0}) < 0.0);
}

TEST_CASE("four-point dual objective matches the brute-force grid", "[svm]") {
    const std::vector<std::vector<double>> x = {{0.0, 0.0}, {1.0, 0.5}, {2.0, 2.0}, {3.0, 2.5}};
    const std::vector<int> y = {-1, -1, 1, 1};
    hive::SvmConfig cfg;
    cfg.gamma = 0.5;
    const auto result = hive::svm_train_full(x, y, cfg, 9);
    const double smo_obj = hive::svm_dual_objective(x, y, result.alphas, cfg.gamma);
    const double grid_obj = brute_force_dual(x, y, cfg.c, cfg.gamma, 0.01);
    REQUIRE(smo_obj == Catch::Approx(grid_obj).margin(1e-2));
    REQUIRE(smo_obj + 1e-9 >= grid_obj - 1e-2);
}

TEST_CASE("separable blobs reach training AUC 1", "[svm]") {
    const auto [x, y] = gaussian_blobs(20, 6.0, 17);
    const auto model = hive::svm_train(x, y, {}, 17);
    std::vector<double> scores;
    std::vector<int> labels01;
    for (std::size_t i = 0; i < x.size(); ++i) {
        scores.push_back(hive::decision_score(model, x[i]));
        labels01.push_back(y[i] == 1 ? 1 : 0);
    }
    REQUIRE(hive::auc(scores, labels01) == 1.0);
}

TEST_CASE("trained models satisfy the dual constraints and KKT margins", "[svm]") {
    const auto [x, y] = gaussian_blobs(25, 3.0, 23);
    hive::SvmConfig cfg;
    const auto result = hive::svm_train_full(x, y, cfg, 23);

    double alpha_dot_y = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        REQUIRE(result.alphas[i] >= 0.0);
        REQUIRE(result.alphas[i] <= cfg.c);
        alpha_dot_y += result.alphas[i] * y[i];
    }
    REQUIRE(std::abs(alpha_dot_y) < 1e-6);

    // points below the C bound must sit on or outside the margin
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (result.alphas[i] < cfg.c - 1e-9) {
            const double margin = y[i] * hive::decision_score(result.model, x[i]);
            REQUIRE(margin >= 1.0 - 1e-3);
        }
    }
}

TEST_CASE("empty support set scores the bias", "[svm]") {
    hive::SvmModel model;
    model.bias = 0.75;
    model.gamma = 1.0;
    REQUIRE(hive::decision_score(model, {1.0, 2.0}) == 0.75);
}

TEST_CASE("single-class input is rejected", "[svm]") {
    const std::vector<std::vector<double>> x = {{0.0}, {1.0}};
    REQUIRE_THROWS_AS(hive::svm_train(x, {1, 1}), std::invalid_argument);
}

TEST_CASE("score rises monotonically toward the positive cluster", "[svm]") {
    const auto [x, y] = gaussian_blobs(20, 6.0, 31);
    const auto model = hive::svm_train(x, y, {}, 31);
    double prev = -1e9;
    for (int step = -10; step <= 10; ++step) {
        const double t = static_cast<double>(step) * 0.6;
        const double score = hive::decision_score(model, {t, 0.0});
        REQUIRE(score >= prev - 1e-9);
        prev = score;
    }
}

TEST_CASE("training-set permutation leaves the test AUC unchanged", "[svm]") {
    const auto [x, y] = gaussian_blobs(20, 4.0, 41);
    auto xp = x;
    auto yp = y;
    std::mt19937_64 rng(99);
    std::vector<std::size_t> perm(x.size());
    for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
    std::shuffle(perm.begin(), perm.end(), rng);
    for (std::size_t i = 0; i < perm.size(); ++i) {
        xp[i] = x[perm[i]];
        yp[i] = y[perm[i]];
    }

    const auto [tx, ty] = gaussian_blobs(15, 4.0, 1234);
    std::vector<int> ty01;
    for (int v : ty) ty01.push_back(v == 1 ? 1 : 0);

    const auto score_all = [&](const hive::SvmModel& model) {
        std::vector<double> scores;
        for (const auto& v : tx) scores.push_back(hive::decision_score(model, v));
        return hive::auc(scores, ty01);
    };
    const double auc_a = score_all(hive::svm_train(x, y, {}, 7));
    const double auc_b = score_all(hive::svm_train(xp, yp, {}, 7));
    REQUIRE(auc_a == auc_b);
}

TEST_CASE("svm model round-trips through the HSVM file", "[svm]") {
    const auto [x, y] = gaussian_blobs(10, 3.0, 55);
    const auto model = hive::svm_train(x, y, {}, 55);
    const auto path = std::filesystem::temp_directory_path() / "hive_svm_test.hsvm";
    hive::save_svm(model, path);
    const auto loaded = hive::load_svm(path);
    REQUIRE(loaded.support_vectors == model.support_vectors);
    REQUIRE(loaded.alpha_y == model.alpha_y);
    REQUIRE(loaded.bias == model.bias);
    REQUIRE(loaded.gamma == model.gamma);
}
