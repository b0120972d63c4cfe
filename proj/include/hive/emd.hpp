#pragma once

// Empirical Mode Decomposition. A signal frame is sifted into intrinsic mode
// functions: upper/lower envelopes are natural cubic splines through the
// local maxima/minima (with the two outermost extrema mirrored about each
// edge), their mean is subtracted until a Cauchy-style SD criterion is met,
// and the extracted mode is removed from the running residue. The sum of all
// modes plus the final residue reproduces the input.

#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <vector>

namespace hive {

struct EmdConfig {
    double sd_threshold = 0.2;      // sifting stop: sum(m^2)/sum(h^2)
    std::size_t max_sift_iters = 10;
    std::size_t max_imfs = 10;
    double amp_eps = 1e-6;          // residue stop, relative to max|frame|
};

// Ordered intrinsic mode functions plus residue for one frame.
struct ImfSet {
    std::vector<std::vector<double>> imfs;
    std::vector<double> residue;
    std::size_t source_frame = 0;
};

namespace detail {

struct ExtremaIdx {
    std::vector<std::size_t> maxima;
    std::vector<std::size_t> minima;
};

// Plateau-aware local extrema: a flat top/bottom reports its midpoint.
// Endpoints are never extrema.
inline ExtremaIdx find_extrema(const std::vector<double>& x) {
    ExtremaIdx out;
    int prev = 0;
    std::size_t plateau_begin = 0;
    for (std::size_t i = 1; i < x.size(); ++i) {
        const double diff = x[i] - x[i - 1];
        const int d = (diff > 0.0) - (diff < 0.0);
        if (d == 0) continue;
        if (prev > 0 && d < 0) out.maxima.push_back((plateau_begin + i - 1) / 2);
        if (prev < 0 && d > 0) out.minima.push_back((plateau_begin + i - 1) / 2);
        prev = d;
        plateau_begin = i;
    }
    return out;
}

inline std::size_t count_zero_crossings(const std::vector<double>& x) {
    std::size_t count = 0;
    double prev = 0.0;
    bool have_prev = false;
    for (double v : x) {
        if (v == 0.0) continue;  // exact zeros sit on the crossing
        if (have_prev && ((prev > 0.0) != (v > 0.0))) ++count;
        prev = v;
        have_prev = true;
    }
    return count;
}

// Natural cubic spline through strictly increasing knots, evaluated at the
// integer grid 0..n-1. Query points outside the knot span use the boundary
// cubic (callers mirror extrema so this does not happen in practice).
inline void natural_spline_eval(const std::vector<double>& xs, const std::vector<double>& ys,
                                std::size_t n, std::vector<double>& out) {
    const std::size_t m = xs.size();
    out.resize(n);
    if (m == 1) {
        for (std::size_t i = 0; i < n; ++i) out[i] = ys[0];
        return;
    }
    if (m == 2) {
        const double slope = (ys[1] - ys[0]) / (xs[1] - xs[0]);
        for (std::size_t i = 0; i < n; ++i)
            out[i] = ys[0] + slope * (static_cast<double>(i) - xs[0]);
        return;
    }

    // Second derivatives via the tridiagonal (Thomas) solve; natural ends.
    std::vector<double> h(m - 1);
    for (std::size_t i = 0; i + 1 < m; ++i) h[i] = xs[i + 1] - xs[i];
    std::vector<double> diag(m, 0.0), rhs(m, 0.0), d2(m, 0.0);
    for (std::size_t i = 1; i + 1 < m; ++i) {
        diag[i] = 2.0 * (h[i - 1] + h[i]);
        rhs[i] = 6.0 * ((ys[i + 1] - ys[i]) / h[i] - (ys[i] - ys[i - 1]) / h[i - 1]);
    }
    std::vector<double> c_prime(m, 0.0);
    for (std::size_t i = 1; i + 1 < m; ++i) {
        const double lower = i > 1 ? h[i - 1] : 0.0;
        const double denom = diag[i] - lower * c_prime[i - 1];
        c_prime[i] = h[i] / denom;
        rhs[i] = (rhs[i] - lower * rhs[i - 1]) / denom;
    }
    for (std::size_t i = m - 2; i >= 1; --i) {
        d2[i] = rhs[i] - c_prime[i] * d2[i + 1];
        if (i == 1) break;
    }

    std::size_t seg = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double q = static_cast<double>(i);
        while (seg + 2 < m && xs[seg + 1] < q) ++seg;
        const double dx = h[seg];
        const double a = (xs[seg + 1] - q) / dx;
        const double b = (q - xs[seg]) / dx;
        out[i] = a * ys[seg] + b * ys[seg + 1] +
                 ((a * a * a - a) * d2[seg] + (b * b * b - b) * d2[seg + 1]) * dx * dx / 6.0;
    }
}

// Knot list for one envelope: extrema plus the two outermost extrema
// mirrored about each signal edge.
inline void mirrored_knots(const std::vector<std::size_t>& idx, const std::vector<double>& x,
                           std::size_t n, std::vector<double>& xs, std::vector<double>& ys) {
    xs.clear();
    ys.clear();
    const double right = static_cast<double>(n - 1);
    xs.push_back(-static_cast<double>(idx[1]));
    ys.push_back(x[idx[1]]);
    xs.push_back(-static_cast<double>(idx[0]));
    ys.push_back(x[idx[0]]);
    for (std::size_t i : idx) {
        xs.push_back(static_cast<double>(i));
        ys.push_back(x[i]);
    }
    const std::size_t m = idx.size();
    xs.push_back(2.0 * right - static_cast<double>(idx[m - 1]));
    ys.push_back(x[idx[m - 1]]);
    xs.push_back(2.0 * right - static_cast<double>(idx[m - 2]));
    ys.push_back(x[idx[m - 2]]);
}

}  // namespace detail

// Mean of the upper and lower spline envelopes, or nullopt when the signal
// has fewer than two maxima or two minima (the caller treats it as residue).
inline std::optional<std::vector<double>> envelope_mean(const std::vector<double>& x) {
    if (x.size() < 4) return std::nullopt;
    const auto extrema = detail::find_extrema(x);
    if (extrema.maxima.size() < 2 || extrema.minima.size() < 2) return std::nullopt;

    std::vector<double> xs, ys, upper, lower;
    detail::mirrored_knots(extrema.maxima, x, x.size(), xs, ys);
    detail::natural_spline_eval(xs, ys, x.size(), upper);
    detail::mirrored_knots(extrema.minima, x, x.size(), xs, ys);
    detail::natural_spline_eval(xs, ys, x.size(), lower);

    std::vector<double> mean(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) mean[i] = 0.5 * (upper[i] + lower[i]);
    return mean;
}

// One round of sifting: h <- h - envelope_mean(h) until
// sum((h_prev - h)^2)/sum(h_prev^2) < sd_threshold or max_iters envelope
// subtractions. Returns nullopt when the input itself lacks the extrema to
// form envelopes.
inline std::optional<std::vector<double>> sift(const std::vector<double>& x,
                                               double sd_threshold = 0.2,
                                               std::size_t max_iters = 10) {
    std::vector<double> h = x;
    for (std::size_t iter = 0; iter < max_iters; ++iter) {
        const auto mean = envelope_mean(h);
        if (!mean) {
            if (iter == 0) return std::nullopt;
            break;
        }
        double num = 0.0, den = 0.0;
        for (std::size_t i = 0; i < h.size(); ++i) {
            num += (*mean)[i] * (*mean)[i];
            den += h[i] * h[i];
        }
        for (std::size_t i = 0; i < h.size(); ++i) h[i] -= (*mean)[i];
        if (den == 0.0 || num / den < sd_threshold) break;
    }
    return h;
}

// Full decomposition of one frame. Stops when the residue has too few
// extrema (monotone), its amplitude drops below amp_eps * max|frame|, or
// max_imfs modes have been extracted.
inline ImfSet decompose(const std::vector<double>& frame, const EmdConfig& cfg = {}) {
    ImfSet out;
    out.residue = frame;
    if (frame.empty()) return out;

    double frame_amp = 0.0;
    for (double v : frame) frame_amp = std::max(frame_amp, std::abs(v));

    while (out.imfs.size() < cfg.max_imfs) {
        double residue_amp = 0.0;
        for (double v : out.residue) residue_amp = std::max(residue_amp, std::abs(v));
        if (frame_amp > 0.0 && residue_amp < cfg.amp_eps * frame_amp) break;

        auto imf = sift(out.residue, cfg.sd_threshold, cfg.max_sift_iters);
        if (!imf) break;
        for (std::size_t i = 0; i < out.residue.size(); ++i) out.residue[i] -= (*imf)[i];
        out.imfs.push_back(std::move(*imf));
    }
    return out;
}

// IMF property check (used post hoc by tests): extrema count and
// zero-crossing count differ by at most one.
inline bool satisfies_imf_property(const std::vector<double>& x) {
    const auto extrema = detail::find_extrema(x);
    const std::size_t n_ext = extrema.maxima.size() + extrema.minima.size();
    const std::size_t n_zc = detail::count_zero_crossings(x);
    return (n_ext > n_zc ? n_ext - n_zc : n_zc - n_ext) <= 1;
}

}  // namespace hive
