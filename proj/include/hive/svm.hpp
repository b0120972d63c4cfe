#pragma once

// Soft-margin binary SVM with an RBF kernel, trained by simplified
// sequential minimal optimization: iterate over candidates violating the
// KKT conditions, pair each with a random second index, and solve the
// two-variable subproblem analytically. Training ends after max_passes
// consecutive full passes without an alpha update.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "hive/errors.hpp"

namespace hive {

struct SvmConfig {
    double c = 1.0;
    double gamma = -1.0;  // <= 0 means 1/dimension
    double tol = 1e-3;
    std::size_t max_passes = 10;
};

// exp(-gamma * ||x - y||^2)
inline double rbf_kernel(const std::vector<double>& x, const std::vector<double>& y,
                         double gamma) {
    if (x.size() != y.size()) throw std::invalid_argument("rbf_kernel: dimension mismatch");
    double d2 = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = x[i] - y[i];
        d2 += d * d;
    }
    return std::exp(-gamma * d2);
}

inline double default_gamma(std::size_t dim) {
    if (dim == 0) throw std::invalid_argument("default_gamma: dimension must be >= 1");
    return 1.0 / static_cast<double>(dim);
}

// Trained classifier: support vectors with their signed multipliers
// alpha_i * y_i, plus bias and the kernel width.
struct SvmModel {
    std::vector<std::vector<double>> support_vectors;
    std::vector<double> alpha_y;
    double bias = 0.0;
    double gamma = 0.0;

    std::size_t dimension() const {
        return support_vectors.empty() ? 0 : support_vectors.front().size();
    }
};

inline double decision_score(const SvmModel& model, const std::vector<double>& x) {
    if (!model.support_vectors.empty() && x.size() != model.dimension())
        throw std::invalid_argument("decision_score: dimension mismatch");
    double score = model.bias;
    for (std::size_t i = 0; i < model.support_vectors.size(); ++i)
        score += model.alpha_y[i] * rbf_kernel(model.support_vectors[i], x, model.gamma);
    return score;
}

// Dual objective W(alpha) = sum(alpha) - 1/2 sum_ij alpha_i alpha_j y_i y_j K_ij.
inline double svm_dual_objective(const std::vector<std::vector<double>>& x,
                                 const std::vector<int>& y, const std::vector<double>& alphas,
                                 double gamma) {
    double obj = 0.0;
    for (double a : alphas) obj += a;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (alphas[i] == 0.0) continue;
        for (std::size_t j = 0; j < x.size(); ++j) {
            if (alphas[j] == 0.0) continue;
            obj -= 0.5 * alphas[i] * alphas[j] * y[i] * y[j] * rbf_kernel(x[i], x[j], gamma);
        }
    }
    return obj;
}

struct SvmTrainResult {
    SvmModel model;
    std::vector<double> alphas;  // full alpha vector, aligned with the input
};

namespace detail {

// Gram matrix rows, cached in full below this many samples.
inline constexpr std::size_t kSvmCacheLimit = 4096;

class KernelTable {
public:
    KernelTable(const std::vector<std::vector<double>>& x, double gamma)
        : x_(x), gamma_(gamma), n_(x.size()), cached_(n_ <= kSvmCacheLimit) {
        if (cached_) {
            gram_.resize(n_ * n_);
            for (std::size_t i = 0; i < n_; ++i)
                for (std::size_t j = i; j < n_; ++j) {
                    const double k = rbf_kernel(x_[i], x_[j], gamma_);
                    gram_[i * n_ + j] = k;
                    gram_[j * n_ + i] = k;
                }
        }
    }

    double operator()(std::size_t i, std::size_t j) const {
        return cached_ ? gram_[i * n_ + j] : rbf_kernel(x_[i], x_[j], gamma_);
    }

private:
    const std::vector<std::vector<double>>& x_;
    double gamma_;
    std::size_t n_;
    bool cached_;
    std::vector<double> gram_;
};

}  // namespace detail

inline SvmTrainResult svm_train_full(const std::vector<std::vector<double>>& x,
                                     const std::vector<int>& y, SvmConfig cfg = {},
                                     uint64_t seed = 0) {
    const std::size_t n = x.size();
    if (n == 0 || y.size() != n) throw std::invalid_argument("svm_train: bad input sizes");
    const std::size_t dim = x.front().size();
    bool have_pos = false, have_neg = false;
    for (std::size_t i = 0; i < n; ++i) {
        if (x[i].size() != dim) throw std::invalid_argument("svm_train: inconsistent dimensions");
        if (y[i] == 1)
            have_pos = true;
        else if (y[i] == -1)
            have_neg = true;
        else
            throw std::invalid_argument("svm_train: labels must be -1 or +1");
    }
    if (!have_pos || !have_neg)
        throw std::invalid_argument("svm_train: need at least one sample of each class");
    if (cfg.c <= 0.0) throw std::invalid_argument("svm_train: C must be positive");
    const double gamma = cfg.gamma > 0.0 ? cfg.gamma : default_gamma(dim);
    const double c = cfg.c;

    const detail::KernelTable kernel(x, gamma);
    std::vector<double> alpha(n, 0.0);
    double bias = 0.0;
    std::mt19937_64 rng(seed);

    const auto decision = [&](std::size_t k) {
        double f = bias;
        for (std::size_t i = 0; i < n; ++i)
            if (alpha[i] > 0.0) f += alpha[i] * y[i] * kernel(i, k);
        return f;
    };

    std::size_t quiet_passes = 0;
    // safety valve; SMO converges long before this on desk-scale data
    const std::size_t hard_cap = 1000;
    for (std::size_t pass = 0; pass < hard_cap && quiet_passes < cfg.max_passes; ++pass) {
        std::size_t changed = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const double ei = decision(i) - y[i];
            const bool violates = (y[i] * ei < -cfg.tol && alpha[i] < c) ||
                                  (y[i] * ei > cfg.tol && alpha[i] > 0.0);
            if (!violates) continue;

            std::size_t j = std::uniform_int_distribution<std::size_t>(0, n - 2)(rng);
            if (j >= i) ++j;
            const double ej = decision(j) - y[j];

            const double ai_old = alpha[i], aj_old = alpha[j];
            double lo, hi;
            if (y[i] != y[j]) {
                lo = std::max(0.0, aj_old - ai_old);
                hi = std::min(c, c + aj_old - ai_old);
            } else {
                lo = std::max(0.0, ai_old + aj_old - c);
                hi = std::min(c, ai_old + aj_old);
            }
            if (lo >= hi) continue;

            const double eta = 2.0 * kernel(i, j) - kernel(i, i) - kernel(j, j);
            if (eta >= 0.0) continue;

            double aj = aj_old - y[j] * (ei - ej) / eta;
            aj = std::min(hi, std::max(lo, aj));
            if (std::abs(aj - aj_old) < 1e-5) continue;
            const double ai = ai_old + y[i] * y[j] * (aj_old - aj);

            const double b1 = bias - ei - y[i] * (ai - ai_old) * kernel(i, i) -
                              y[j] * (aj - aj_old) * kernel(i, j);
            const double b2 = bias - ej - y[i] * (ai - ai_old) * kernel(i, j) -
                              y[j] * (aj - aj_old) * kernel(j, j);
            if (ai > 0.0 && ai < c)
                bias = b1;
            else if (aj > 0.0 && aj < c)
                bias = b2;
            else
                bias = 0.5 * (b1 + b2);

            alpha[i] = ai;
            alpha[j] = aj;
            ++changed;
        }
        quiet_passes = changed == 0 ? quiet_passes + 1 : 0;
    }

    // dual feasibility is an invariant of the pairwise updates; verify it
    double alpha_dot_y = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (alpha[i] < -1e-12 || alpha[i] > c + 1e-12)
            throw NumericError("svm_train: alpha left the box constraint");
        alpha_dot_y += alpha[i] * y[i];
    }
    if (std::abs(alpha_dot_y) > 1e-6)
        throw NumericError("svm_train: sum(alpha_i y_i) drifted to " +
                           std::to_string(alpha_dot_y));

    SvmTrainResult result;
    result.alphas = alpha;
    result.model.bias = bias;
    result.model.gamma = gamma;
    for (std::size_t i = 0; i < n; ++i) {
        if (alpha[i] > 0.0) {
            result.model.support_vectors.push_back(x[i]);
            result.model.alpha_y.push_back(alpha[i] * y[i]);
        }
    }
    return result;
}

inline SvmModel svm_train(const std::vector<std::vector<double>>& x, const std::vector<int>& y,
                          SvmConfig cfg = {}, uint64_t seed = 0) {
    return svm_train_full(x, y, cfg, seed).model;
}

// Versioned little-endian binary model file, magic "HSVM".
inline void save_svm(const SvmModel& model, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write SVM model: " + path.string());
    const char magic[4] = {'H', 'S', 'V', 'M'};
    out.write(magic, 4);
    const uint32_t version = 1;
    const auto count = static_cast<uint32_t>(model.support_vectors.size());
    const auto dim = static_cast<uint32_t>(model.dimension());
    out.write(reinterpret_cast<const char*>(&version), 4);
    out.write(reinterpret_cast<const char*>(&count), 4);
    out.write(reinterpret_cast<const char*>(&dim), 4);
    out.write(reinterpret_cast<const char*>(&model.gamma), 8);
    out.write(reinterpret_cast<const char*>(&model.bias), 8);
    for (std::size_t i = 0; i < model.support_vectors.size(); ++i) {
        out.write(reinterpret_cast<const char*>(&model.alpha_y[i]), 8);
        out.write(reinterpret_cast<const char*>(model.support_vectors[i].data()),
                  static_cast<std::streamsize>(8 * dim));
    }
    if (!out) throw DataError("short write on SVM model: " + path.string());
}

inline SvmModel load_svm(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open SVM model: " + path.string());
    char magic[4];
    uint32_t version = 0, count = 0, dim = 0;
    in.read(magic, 4);
    in.read(reinterpret_cast<char*>(&version), 4);
    in.read(reinterpret_cast<char*>(&count), 4);
    in.read(reinterpret_cast<char*>(&dim), 4);
    if (!in || std::string(magic, 4) != "HSVM")
        throw DataError("not an SVM model file: " + path.string());
    if (version != 1)
        throw DataError("unsupported SVM model version " + std::to_string(version));
    SvmModel model;
    in.read(reinterpret_cast<char*>(&model.gamma), 8);
    in.read(reinterpret_cast<char*>(&model.bias), 8);
    model.alpha_y.resize(count);
    model.support_vectors.assign(count, std::vector<double>(dim));
    for (uint32_t i = 0; i < count; ++i) {
        in.read(reinterpret_cast<char*>(&model.alpha_y[i]), 8);
        in.read(reinterpret_cast<char*>(model.support_vectors[i].data()),
                static_cast<std::streamsize>(8 * dim));
    }
    if (!in) throw DataError("truncated SVM model file: " + path.string());
    return model;
}

}  // namespace hive
