#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "hive/errors.hpp"

namespace hive {

// Mono audio buffer, the unit of ingestion. Samples are nominally in [-1, 1].
struct AudioClip {
    std::vector<double> samples;
    int sample_rate = 0;  // Hz, > 0
    std::string source_id;

    double duration_s() const {
        return sample_rate > 0 ? static_cast<double>(samples.size()) / sample_rate : 0.0;
    }

    double rms() const {
        if (samples.empty()) return 0.0;
        double acc = 0.0;
        for (double s : samples) acc += s * s;
        return std::sqrt(acc / static_cast<double>(samples.size()));
    }
};

namespace detail {

inline uint32_t read_u32le(const unsigned char* p) {
    return static_cast<uint32_t>(p[0]) | (static_cast<uint32_t>(p[1]) << 8) |
           (static_cast<uint32_t>(p[2]) << 16) | (static_cast<uint32_t>(p[3]) << 24);
}

inline uint16_t read_u16le(const unsigned char* p) {
    return static_cast<uint16_t>(p[0] | (p[1] << 8));
}

inline void write_u32le(std::vector<unsigned char>& out, uint32_t v) {
    out.push_back(static_cast<unsigned char>(v & 0xff));
    out.push_back(static_cast<unsigned char>((v >> 8) & 0xff));
    out.push_back(static_cast<unsigned char>((v >> 16) & 0xff));
    out.push_back(static_cast<unsigned char>((v >> 24) & 0xff));
}

inline void write_u16le(std::vector<unsigned char>& out, uint16_t v) {
    out.push_back(static_cast<unsigned char>(v & 0xff));
    out.push_back(static_cast<unsigned char>((v >> 8) & 0xff));
}

// Modified Bessel function of the first kind, order zero (power series).
inline double bessel_i0(double x) {
    const double q = x * x / 4.0;
    double term = 1.0;
    double sum = 1.0;
    for (int k = 1; k < 64; ++k) {
        term *= q / (static_cast<double>(k) * k);
        sum += term;
        if (term < sum * 1e-16) break;
    }
    return sum;
}

inline double sinc(double x) {
    if (std::abs(x) < 1e-12) return 1.0;
    const double px = 3.141592653589793238462643 * x;
    return std::sin(px) / px;
}

// Band-limited rational-factor resampling of a raw sample buffer.
// Kaiser-windowed sinc, beta 8, 64 taps at the cutoff-scaled rate; the
// kernel is sampled into a dense table once per call and the convolution
// runs against linear interpolation of that table.
inline std::vector<double> resample_ratio(const std::vector<double>& x, double ratio) {
    if (ratio <= 0.0) throw std::invalid_argument("resample: ratio must be positive");
    if (ratio == 1.0 || x.empty()) return x;

    const std::size_t out_len =
        static_cast<std::size_t>(std::llround(static_cast<double>(x.size()) * ratio));
    std::vector<double> out(out_len, 0.0);
    if (out_len == 0) return out;

    const double cutoff = std::min(1.0, ratio);  // relative to input Nyquist
    const double half_width = 32.0 / cutoff;     // input samples per kernel side
    const double beta = 8.0;
    const double i0_beta = bessel_i0(beta);

    const std::size_t table_len = 16384;
    std::vector<double> kernel(table_len);
    for (std::size_t i = 0; i < table_len; ++i) {
        const double u = half_width * static_cast<double>(i) / static_cast<double>(table_len - 1);
        const double frac = u / half_width;
        const double window = bessel_i0(beta * std::sqrt(std::max(0.0, 1.0 - frac * frac))) / i0_beta;
        kernel[i] = cutoff * sinc(cutoff * u) * window;
    }
    const double table_scale = static_cast<double>(table_len - 1) / half_width;

    const auto n = static_cast<std::ptrdiff_t>(x.size());
    for (std::size_t i = 0; i < out_len; ++i) {
        const double center = static_cast<double>(i) / ratio;
        const auto k_begin = static_cast<std::ptrdiff_t>(std::ceil(center - half_width));
        const auto k_end = static_cast<std::ptrdiff_t>(std::floor(center + half_width));
        double acc = 0.0;
        for (std::ptrdiff_t k = std::max<std::ptrdiff_t>(0, k_begin);
             k <= std::min(n - 1, k_end); ++k) {
            const double u = std::abs(center - static_cast<double>(k)) * table_scale;
            const auto idx = static_cast<std::size_t>(u);
            if (idx + 1 >= table_len) continue;
            const double frac = u - static_cast<double>(idx);
            const double h = kernel[idx] + frac * (kernel[idx + 1] - kernel[idx]);
            acc += x[static_cast<std::size_t>(k)] * h;
        }
        out[i] = acc;
    }
    return out;
}

}  // namespace detail

// Reads a RIFF/WAV file: PCM16 or IEEE float32, little-endian, any channel
// count. Multichannel input is averaged to mono; samples are scaled to [-1, 1].
inline AudioClip load_wav(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open WAV file: " + path.string());
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                     std::istreambuf_iterator<char>());
    if (bytes.size() < 44 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
        std::memcmp(bytes.data() + 8, "WAVE", 4) != 0)
        throw DataError("not a RIFF/WAVE file: " + path.string());

    uint16_t format = 0, channels = 0, bits = 0;
    uint32_t rate = 0;
    const unsigned char* data = nullptr;
    std::size_t data_len = 0;
    bool have_fmt = false;

    std::size_t pos = 12;
    while (pos + 8 <= bytes.size()) {
        const char* id = reinterpret_cast<const char*>(bytes.data() + pos);
        const uint32_t chunk_len = detail::read_u32le(bytes.data() + pos + 4);
        const std::size_t body = pos + 8;
        if (body + chunk_len > bytes.size())
            throw DataError("truncated WAV chunk in " + path.string());
        if (std::memcmp(id, "fmt ", 4) == 0 && chunk_len >= 16) {
            format = detail::read_u16le(bytes.data() + body);
            channels = detail::read_u16le(bytes.data() + body + 2);
            rate = detail::read_u32le(bytes.data() + body + 4);
            bits = detail::read_u16le(bytes.data() + body + 14);
            have_fmt = true;
        } else if (std::memcmp(id, "data", 4) == 0) {
            data = bytes.data() + body;
            data_len = chunk_len;
        }
        pos = body + chunk_len + (chunk_len & 1);  // chunks are word-aligned
    }

    if (!have_fmt || data == nullptr)
        throw DataError("WAV file missing fmt/data chunk: " + path.string());
    if (channels == 0 || rate == 0)
        throw DataError("WAV file with invalid fmt chunk: " + path.string());

    const bool pcm16 = (format == 1 && bits == 16);
    const bool float32 = (format == 3 && bits == 32);
    if (!pcm16 && !float32)
        throw DataError("unsupported WAV encoding (need PCM16 or float32): " + path.string());

    const std::size_t bytes_per_sample = pcm16 ? 2 : 4;
    const std::size_t frame_size = bytes_per_sample * channels;
    const std::size_t frames = data_len / frame_size;

    AudioClip clip;
    clip.sample_rate = static_cast<int>(rate);
    clip.source_id = path.string();
    clip.samples.resize(frames);
    for (std::size_t f = 0; f < frames; ++f) {
        double acc = 0.0;
        for (std::size_t c = 0; c < channels; ++c) {
            const unsigned char* p = data + f * frame_size + c * bytes_per_sample;
            if (pcm16) {
                int16_t v;
                std::memcpy(&v, p, 2);
                acc += static_cast<double>(v) / 32768.0;
            } else {
                float v;
                std::memcpy(&v, p, 4);
                acc += static_cast<double>(v);
            }
        }
        clip.samples[f] = acc / channels;
    }
    return clip;
}

// Writes a mono PCM16 WAV file.
inline void save_wav(const AudioClip& clip, const std::filesystem::path& path) {
    if (clip.sample_rate <= 0) throw std::invalid_argument("save_wav: sample_rate must be positive");
    std::vector<unsigned char> out;
    out.reserve(44 + clip.samples.size() * 2);
    const auto data_bytes = static_cast<uint32_t>(clip.samples.size() * 2);
    out.insert(out.end(), {'R', 'I', 'F', 'F'});
    detail::write_u32le(out, 36 + data_bytes);
    out.insert(out.end(), {'W', 'A', 'V', 'E'});
    out.insert(out.end(), {'f', 'm', 't', ' '});
    detail::write_u32le(out, 16);
    detail::write_u16le(out, 1);  // PCM
    detail::write_u16le(out, 1);  // mono
    detail::write_u32le(out, static_cast<uint32_t>(clip.sample_rate));
    detail::write_u32le(out, static_cast<uint32_t>(clip.sample_rate) * 2);
    detail::write_u16le(out, 2);
    detail::write_u16le(out, 16);
    out.insert(out.end(), {'d', 'a', 't', 'a'});
    detail::write_u32le(out, data_bytes);
    for (double s : clip.samples) {
        const double clamped = std::clamp(s, -1.0, 1.0);
        auto v = static_cast<long>(std::lrint(clamped * 32768.0));
        v = std::clamp<long>(v, -32768, 32767);
        detail::write_u16le(out, static_cast<uint16_t>(static_cast<int16_t>(v)));
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw DataError("cannot write WAV file: " + path.string());
    f.write(reinterpret_cast<const char*>(out.data()), static_cast<std::streamsize>(out.size()));
    if (!f) throw DataError("short write on WAV file: " + path.string());
}

// Band-limited resampling; identity (bitwise) when the rates already match.
// Output length is round(len * target/source).
inline AudioClip resample(const AudioClip& clip, int target_rate) {
    if (target_rate <= 0) throw std::invalid_argument("resample: target rate must be positive");
    if (clip.sample_rate <= 0) throw std::invalid_argument("resample: clip has no sample rate");
    if (target_rate == clip.sample_rate) return clip;
    AudioClip out;
    out.sample_rate = target_rate;
    out.source_id = clip.source_id;
    out.samples = detail::resample_ratio(
        clip.samples, static_cast<double>(target_rate) / clip.sample_rate);
    return out;
}

// Splits into consecutive non-overlapping segments of `seconds`; a trailing
// remainder shorter than one segment is dropped. A clip shorter than one
// segment yields an empty list.
inline std::vector<AudioClip> segment(const AudioClip& clip, double seconds) {
    if (seconds <= 0.0) throw std::invalid_argument("segment: seconds must be positive");
    const auto seg_len = static_cast<std::size_t>(std::llround(seconds * clip.sample_rate));
    std::vector<AudioClip> out;
    if (seg_len == 0 || clip.samples.size() < seg_len) return out;
    const std::size_t count = clip.samples.size() / seg_len;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        AudioClip seg;
        seg.sample_rate = clip.sample_rate;
        seg.source_id = clip.source_id + "#" + std::to_string(i);
        seg.samples.assign(clip.samples.begin() + static_cast<std::ptrdiff_t>(i * seg_len),
                           clip.samples.begin() + static_cast<std::ptrdiff_t>((i + 1) * seg_len));
        out.push_back(std::move(seg));
    }
    return out;
}

}  // namespace hive
