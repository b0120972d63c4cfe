#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "hive/errors.hpp"
#include "hive/matrix.hpp"

namespace hive {

enum class ZScoreMode : uint8_t {
    PerFeature,      // every matrix coordinate is its own feature
    FrequencyWise,   // pool all time frames of all samples per band (column)
};

// Per-band normalization statistics. Population std; bands whose std is zero
// are recorded and divided by 1 at apply time.
struct ZScoreStats {
    ZScoreMode mode = ZScoreMode::FrequencyWise;
    std::vector<double> mean;
    std::vector<double> std_dev;
    std::vector<uint8_t> zero_std;

    double divisor(std::size_t i) const { return zero_std[i] ? 1.0 : std_dev[i]; }
};

namespace detail {

inline ZScoreStats finalize_stats(ZScoreMode mode, std::vector<double> sum,
                                  std::vector<double> sum_sq, double count) {
    ZScoreStats stats;
    stats.mode = mode;
    const std::size_t d = sum.size();
    stats.mean.resize(d);
    stats.std_dev.resize(d);
    stats.zero_std.resize(d);
    for (std::size_t i = 0; i < d; ++i) {
        stats.mean[i] = sum[i] / count;
        const double var = std::max(0.0, sum_sq[i] / count - stats.mean[i] * stats.mean[i]);
        stats.std_dev[i] = std::sqrt(var);
        stats.zero_std[i] = stats.std_dev[i] == 0.0 ? 1 : 0;
    }
    return stats;
}

}  // namespace detail

// Fits normalization statistics on a training set of equally shaped matrices.
// FrequencyWise pools every row of every sample per column; PerFeature
// treats each coordinate independently (stats length = rows * cols).
inline ZScoreStats zscore_fit(const std::vector<Matrix>& samples, ZScoreMode mode) {
    if (samples.empty()) throw std::invalid_argument("zscore_fit: empty sample list");
    const std::size_t rows = samples.front().rows();
    const std::size_t cols = samples.front().cols();
    for (const auto& m : samples)
        if (m.rows() != rows || m.cols() != cols)
            throw std::invalid_argument("zscore_fit: inconsistent sample shapes");

    if (mode == ZScoreMode::FrequencyWise) {
        std::vector<double> sum(cols, 0.0), sum_sq(cols, 0.0);
        for (const auto& m : samples)
            for (std::size_t r = 0; r < rows; ++r) {
                const double* row = m.row(r);
                for (std::size_t c = 0; c < cols; ++c) {
                    sum[c] += row[c];
                    sum_sq[c] += row[c] * row[c];
                }
            }
        return detail::finalize_stats(mode, std::move(sum), std::move(sum_sq),
                                      static_cast<double>(samples.size() * rows));
    }

    const std::size_t d = rows * cols;
    std::vector<double> sum(d, 0.0), sum_sq(d, 0.0);
    for (const auto& m : samples) {
        const auto& v = m.data();
        for (std::size_t i = 0; i < d; ++i) {
            sum[i] += v[i];
            sum_sq[i] += v[i] * v[i];
        }
    }
    return detail::finalize_stats(mode, std::move(sum), std::move(sum_sq),
                                  static_cast<double>(samples.size()));
}

// Vector samples are 1 x d matrices; the two modes coincide there.
inline ZScoreStats zscore_fit(const std::vector<std::vector<double>>& samples,
                              ZScoreMode mode = ZScoreMode::PerFeature) {
    std::vector<Matrix> mats;
    mats.reserve(samples.size());
    for (const auto& v : samples) {
        Matrix m(1, v.size());
        m.data() = v;
        mats.push_back(std::move(m));
    }
    return zscore_fit(mats, mode);
}

inline void zscore_apply(const ZScoreStats& stats, Matrix& m) {
    if (stats.mode == ZScoreMode::FrequencyWise) {
        if (m.cols() != stats.mean.size())
            throw std::invalid_argument("zscore_apply: band count mismatch");
        for (std::size_t r = 0; r < m.rows(); ++r) {
            double* row = m.row(r);
            for (std::size_t c = 0; c < m.cols(); ++c)
                row[c] = (row[c] - stats.mean[c]) / stats.divisor(c);
        }
        return;
    }
    if (m.rows() * m.cols() != stats.mean.size())
        throw std::invalid_argument("zscore_apply: shape mismatch");
    auto& v = m.data();
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = (v[i] - stats.mean[i]) / stats.divisor(i);
}

inline void zscore_apply(const ZScoreStats& stats, std::vector<double>& v) {
    Matrix m(1, v.size());
    m.data() = std::move(v);
    zscore_apply(stats, m);
    v = std::move(m.data());
}

// Inverse transform; exact up to rounding for bands with nonzero std.
inline void zscore_unapply(const ZScoreStats& stats, Matrix& m) {
    if (stats.mode == ZScoreMode::FrequencyWise) {
        if (m.cols() != stats.mean.size())
            throw std::invalid_argument("zscore_unapply: band count mismatch");
        for (std::size_t r = 0; r < m.rows(); ++r) {
            double* row = m.row(r);
            for (std::size_t c = 0; c < m.cols(); ++c)
                row[c] = row[c] * stats.divisor(c) + stats.mean[c];
        }
        return;
    }
    if (m.rows() * m.cols() != stats.mean.size())
        throw std::invalid_argument("zscore_unapply: shape mismatch");
    auto& v = m.data();
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = v[i] * stats.divisor(i) + stats.mean[i];
}

inline void zscore_unapply(const ZScoreStats& stats, std::vector<double>& v) {
    Matrix m(1, v.size());
    m.data() = std::move(v);
    zscore_unapply(stats, m);
    v = std::move(m.data());
}

}  // namespace hive
