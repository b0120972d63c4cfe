#pragma once

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <unordered_set>
#include <vector>

#include "hive/errors.hpp"

namespace hive {

// One dataset row: an audio file plus the hive it came from and the queen
// label. duration_s is optional metadata (< 0 when absent).
struct ClipEntry {
    std::string path;
    std::string hive_id;
    bool queen_present = false;
    double duration_s = -1.0;

    bool operator==(const ClipEntry&) const = default;
};

struct DatasetManifest {
    std::vector<ClipEntry> entries;

    std::set<std::string> hive_ids() const {
        std::set<std::string> ids;
        for (const auto& e : entries) ids.insert(e.hive_id);
        return ids;
    }

    bool operator==(const DatasetManifest&) const = default;
};

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
}

}  // namespace detail

// Loads a UTF-8 CSV manifest with header `path,hive_id,queen_present` and an
// optional fourth `duration_s` column. Relative audio paths are resolved
// against the manifest's directory; every referenced file must exist.
inline DatasetManifest load_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open manifest: " + path.string());

    std::string line;
    if (!std::getline(in, line)) throw DataError("empty manifest (no header): " + path.string());
    if (!line.empty() && line.back() == '\r') line.pop_back();

    const bool with_duration = (line == "path,hive_id,queen_present,duration_s");
    if (!with_duration && line != "path,hive_id,queen_present")
        throw DataError("manifest header must be 'path,hive_id,queen_present[,duration_s]', got '" +
                        line + "' in " + path.string());

    const auto base_dir = path.has_parent_path() ? path.parent_path() : std::filesystem::path(".");
    DatasetManifest manifest;
    std::unordered_set<std::string> seen;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto fields = detail::split_csv_line(line);
        const std::size_t expected = with_duration ? 4 : 3;
        if (fields.size() != expected)
            throw DataError("manifest row " + std::to_string(row) + ": expected " +
                            std::to_string(expected) + " columns, got " +
                            std::to_string(fields.size()));

        ClipEntry entry;
        std::filesystem::path audio_path(fields[0]);
        if (audio_path.is_relative()) audio_path = base_dir / audio_path;
        entry.path = audio_path.lexically_normal().string();
        entry.hive_id = fields[1];
        if (entry.hive_id.empty())
            throw DataError("manifest row " + std::to_string(row) + ": empty hive_id");
        if (fields[2] == "0")
            entry.queen_present = false;
        else if (fields[2] == "1")
            entry.queen_present = true;
        else
            throw DataError("manifest row " + std::to_string(row) +
                            ": queen_present must be 0 or 1, got '" + fields[2] + "'");
        if (with_duration) {
            try {
                entry.duration_s = std::stod(fields[3]);
            } catch (const std::exception&) {
                throw DataError("manifest row " + std::to_string(row) + ": bad duration_s '" +
                                fields[3] + "'");
            }
        }
        if (!seen.insert(entry.path).second)
            throw DataError("manifest row " + std::to_string(row) + ": duplicate path '" +
                            entry.path + "'");
        if (!std::filesystem::exists(entry.path))
            throw DataError("manifest row " + std::to_string(row) + ": missing audio file '" +
                            entry.path + "'");
        manifest.entries.push_back(std::move(entry));
    }
    return manifest;
}

inline void save_manifest(const DatasetManifest& manifest, const std::filesystem::path& path) {
    const bool with_duration =
        !manifest.entries.empty() && manifest.entries.front().duration_s >= 0.0;
    std::ofstream out(path);
    if (!out) throw DataError("cannot write manifest: " + path.string());
    out.precision(17);
    out << (with_duration ? "path,hive_id,queen_present,duration_s\n"
                          : "path,hive_id,queen_present\n");
    for (const auto& e : manifest.entries) {
        out << e.path << ',' << e.hive_id << ',' << (e.queen_present ? 1 : 0);
        if (with_duration) out << ',' << e.duration_s;
        out << '\n';
    }
    if (!out) throw DataError("short write on manifest: " + path.string());
}

}  // namespace hive
