#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "hive/matrix.hpp"
#include "hive/spectral.hpp"

namespace hive {

// Where a classifier input vector came from; its length is fixed by the
// provenance (20, 20, 40, 20, 20).
enum class Provenance : uint8_t {
    Mfcc20,
    Hht20,
    Mfcc20Hht20,
    Mel20,
    LogMel20,
};

inline std::size_t provenance_length(Provenance p) {
    return p == Provenance::Mfcc20Hht20 ? 40 : 20;
}

struct FeatureVector {
    std::vector<double> values;
    Provenance provenance = Provenance::Mfcc20;
};

inline FeatureVector make_feature_vector(std::vector<double> values, Provenance p) {
    if (values.size() != provenance_length(p))
        throw std::invalid_argument("feature vector length " + std::to_string(values.size()) +
                                    " does not match its provenance");
    return FeatureVector{std::move(values), p};
}

// Arithmetic mean over the time axis; one value per band.
inline std::vector<double> time_average(const FeatureMatrix& m) {
    if (m.frames() == 0) throw std::invalid_argument("time_average: empty matrix");
    std::vector<double> out(m.bands(), 0.0);
    for (std::size_t r = 0; r < m.frames(); ++r) {
        const double* row = m.data.row(r);
        for (std::size_t c = 0; c < m.bands(); ++c) out[c] += row[c];
    }
    for (auto& v : out) v /= static_cast<double>(m.frames());
    return out;
}

// Mean of each consecutive group of len/out entries; len must divide evenly.
inline std::vector<double> downsample_bands(const std::vector<double>& v, std::size_t out) {
    if (out == 0 || v.size() % out != 0)
        throw std::invalid_argument("downsample_bands: length " + std::to_string(v.size()) +
                                    " not divisible by " + std::to_string(out));
    const std::size_t group = v.size() / out;
    std::vector<double> result(out, 0.0);
    for (std::size_t b = 0; b < out; ++b) {
        double sum = 0.0;
        for (std::size_t i = b * group; i < (b + 1) * group; ++i) sum += v[i];
        result[b] = sum / static_cast<double>(group);
    }
    return result;
}

// MFCC-first concatenation into the 40-dimensional combined vector.
inline FeatureVector concat(const FeatureVector& a, const FeatureVector& b) {
    if (a.provenance != Provenance::Mfcc20 || b.provenance != Provenance::Hht20)
        throw std::invalid_argument("concat: only mfcc20 + hht20 is a defined combination");
    std::vector<double> values;
    values.reserve(a.values.size() + b.values.size());
    values.insert(values.end(), a.values.begin(), a.values.end());
    values.insert(values.end(), b.values.begin(), b.values.end());
    return make_feature_vector(std::move(values), Provenance::Mfcc20Hht20);
}

// Long-term representation: n_slices contiguous time groups, each averaged
// over time and stacked as a row.
struct SliceStack {
    Matrix data;  // n_slices x bands
    std::size_t n_slices = 0;
};

// Group size is floor(rows/n_slices); leftover frames are appended to the
// final slice so no data is dropped.
inline SliceStack slice_stack(const FeatureMatrix& m, std::size_t n_slices = 30) {
    if (n_slices == 0) throw std::invalid_argument("slice_stack: n_slices must be >= 1");
    if (m.frames() < n_slices)
        throw DataError("slice_stack: " + std::to_string(m.frames()) + " frames is fewer than " +
                        std::to_string(n_slices) + " slices");
    const std::size_t group = m.frames() / n_slices;
    SliceStack out;
    out.n_slices = n_slices;
    out.data = Matrix(n_slices, m.bands());
    for (std::size_t s = 0; s < n_slices; ++s) {
        const std::size_t begin = s * group;
        const std::size_t end = (s + 1 == n_slices) ? m.frames() : begin + group;
        double* dst = out.data.row(s);
        for (std::size_t r = begin; r < end; ++r) {
            const double* row = m.data.row(r);
            for (std::size_t c = 0; c < m.bands(); ++c) dst[c] += row[c];
        }
        for (std::size_t c = 0; c < m.bands(); ++c)
            dst[c] /= static_cast<double>(end - begin);
    }
    return out;
}

}  // namespace hive
