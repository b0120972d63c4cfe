#pragma once

// Feature cache file format (HIVF): magic 'HIVF', u32 version, u32 rows,
// u32 cols, u8 band_kind, f64 frame_hop_s, then row-major little-endian f32
// data. Cache entries are invalidated by name: the filename embeds a hash of
// the source file's absolute path, size, and modification time plus the
// feature kind's version tag, so stale entries simply stop being found.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "hive/errors.hpp"
#include "hive/spectral.hpp"

namespace hive {

inline constexpr uint32_t kFeatureFileVersion = 1;

inline void save_feature(const FeatureMatrix& m, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write feature file: " + path.string());
    const char magic[4] = {'H', 'I', 'V', 'F'};
    out.write(magic, 4);
    const uint32_t version = kFeatureFileVersion;
    const auto rows = static_cast<uint32_t>(m.data.rows());
    const auto cols = static_cast<uint32_t>(m.data.cols());
    const auto kind = static_cast<uint8_t>(m.band_kind);
    out.write(reinterpret_cast<const char*>(&version), 4);
    out.write(reinterpret_cast<const char*>(&rows), 4);
    out.write(reinterpret_cast<const char*>(&cols), 4);
    out.write(reinterpret_cast<const char*>(&kind), 1);
    out.write(reinterpret_cast<const char*>(&m.frame_hop_s), 8);
    for (double v : m.data.data()) {
        const auto f = static_cast<float>(v);
        out.write(reinterpret_cast<const char*>(&f), 4);
    }
    if (!out) throw DataError("short write on feature file: " + path.string());
}

inline FeatureMatrix load_feature(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open feature file: " + path.string());
    char magic[4];
    uint32_t version = 0, rows = 0, cols = 0;
    uint8_t kind = 0;
    in.read(magic, 4);
    in.read(reinterpret_cast<char*>(&version), 4);
    in.read(reinterpret_cast<char*>(&rows), 4);
    in.read(reinterpret_cast<char*>(&cols), 4);
    in.read(reinterpret_cast<char*>(&kind), 1);
    FeatureMatrix m;
    in.read(reinterpret_cast<char*>(&m.frame_hop_s), 8);
    if (!in || std::string(magic, 4) != "HIVF")
        throw DataError("not a feature file: " + path.string());
    if (version != kFeatureFileVersion)
        throw DataError("unsupported feature file version " + std::to_string(version));
    if (kind > static_cast<uint8_t>(BandKind::HhtBand))
        throw DataError("bad band kind in feature file: " + path.string());
    m.band_kind = static_cast<BandKind>(kind);
    m.data = Matrix(rows, cols);
    for (auto& v : m.data.data()) {
        float f = 0.0f;
        in.read(reinterpret_cast<char*>(&f), 4);
        v = static_cast<double>(f);
    }
    if (!in) throw DataError("truncated feature file: " + path.string());
    return m;
}

namespace detail {

inline uint64_t fnv1a(const std::string& s, uint64_t h = 0xcbf29ce484222325ULL) {
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace detail

// Cache entry name for (audio file, feature kind). Changing the file's size
// or mtime, or bumping kind_version, changes the name.
inline std::string cache_file_name(const std::filesystem::path& audio_path,
                                   const std::string& kind, uint32_t kind_version) {
    std::error_code ec;
    const auto abs = std::filesystem::absolute(audio_path, ec);
    const auto size = std::filesystem::file_size(audio_path, ec);
    const auto mtime = std::filesystem::last_write_time(audio_path, ec);
    const auto mtime_ticks = static_cast<uint64_t>(mtime.time_since_epoch().count());

    uint64_t h = detail::fnv1a(abs.string());
    h = detail::fnv1a(std::to_string(size) + "|" + std::to_string(mtime_ticks) + "|" + kind +
                          "|" + std::to_string(kind_version),
                      h);
    char hex[17];
    std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(h));
    return audio_path.stem().string() + "-" + hex + "." + kind + ".hivf";
}

}  // namespace hive
