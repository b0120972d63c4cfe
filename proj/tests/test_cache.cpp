#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <random>
#include <thread>

#include "hive/cache.hpp"
#include "hive/hht.hpp"

namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
    const auto dir = fs::temp_directory_path() / "hive_cache_tests" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

}  // namespace

TEST_CASE("feature files round-trip through HIVF", "[cache]") {
    const auto dir = fresh_dir("roundtrip");
    hive::FeatureMatrix m;
    m.band_kind = hive::BandKind::Mfcc;
    m.frame_hop_s = 512.0 / 22050.0;
    m.data = hive::Matrix(7, 20);
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<float> dist(-4.0f, 4.0f);
    for (auto& v : m.data.data()) v = static_cast<double>(dist(rng));  // f32-representable

    const auto path = dir / "m.hivf";
    hive::save_feature(m, path);
    const auto loaded = hive::load_feature(path);
    REQUIRE(loaded.band_kind == hive::BandKind::Mfcc);
    REQUIRE(loaded.frame_hop_s == m.frame_hop_s);
    REQUIRE(loaded.data == m.data);
}

TEST_CASE("the HIVF header layout is stable", "[cache]") {
    const auto dir = fresh_dir("layout");
    hive::FeatureMatrix m;
    m.band_kind = hive::BandKind::HhtBand;
    m.frame_hop_s = 1.0;
    m.data = hive::Matrix(1, 20, 0.5);
    const auto path = dir / "h.hivf";
    hive::save_feature(m, path);

    std::ifstream in(path, std::ios::binary);
    std::vector<char> bytes((std::istreambuf_iterator<char>(in)),
                            std::istreambuf_iterator<char>());
    REQUIRE(bytes.size() == 4 + 4 + 4 + 4 + 1 + 8 + 20 * 4);
    REQUIRE(std::string(bytes.data(), 4) == "HIVF");
    REQUIRE(static_cast<unsigned char>(bytes[4]) == 1);   // version LE
    REQUIRE(static_cast<unsigned char>(bytes[8]) == 1);   // rows LE
    REQUIRE(static_cast<unsigned char>(bytes[12]) == 20); // cols LE
    REQUIRE(static_cast<unsigned char>(bytes[16]) == 3);  // band kind hht-band
}

TEST_CASE("an HHT band vector serializes as a 1x20 hht-band matrix", "[cache]") {
    const auto dir = fresh_dir("hht");
    hive::HhtSpectrogram spec;
    spec.f_s = 32000.0;
    hive::HhtFrameFeature frame;
    frame.mnf = {120.0, 950.0};
    frame.mean_amp = {1.0, 0.25};
    spec.frames.push_back(frame);

    hive::FeatureMatrix m;
    m.band_kind = hive::BandKind::HhtBand;
    m.frame_hop_s = 1.0;
    const auto v = hive::hht_band_vector(spec);
    m.data = hive::Matrix(1, v.size());
    m.data.data() = v;

    const auto path = dir / "band.hivf";
    hive::save_feature(m, path);
    const auto loaded = hive::load_feature(path);
    REQUIRE(loaded.data.rows() == 1);
    REQUIRE(loaded.data.cols() == 20);
    REQUIRE(loaded.band_kind == hive::BandKind::HhtBand);
}

TEST_CASE("corrupt feature files are rejected", "[cache]") {
    const auto dir = fresh_dir("corrupt");
    const auto path = dir / "bad.hivf";
    std::ofstream(path, std::ios::binary) << "not a feature file at all";
    REQUIRE_THROWS_AS(hive::load_feature(path), hive::DataError);
    REQUIRE_THROWS_AS(hive::load_feature(dir / "missing.hivf"), hive::DataError);
}

TEST_CASE("cache names change with content, mtime, kind, and version", "[cache]") {
    const auto dir = fresh_dir("names");
    const auto wav = dir / "clip.wav";
    std::ofstream(wav, std::ios::binary) << "0123456789";

    const auto name1 = hive::cache_file_name(wav, "mfcc20", 1);
    REQUIRE(name1 == hive::cache_file_name(wav, "mfcc20", 1));
    REQUIRE(name1 != hive::cache_file_name(wav, "hht20", 1));
    REQUIRE(name1 != hive::cache_file_name(wav, "mfcc20", 2));

    std::this_thread::sleep_for(std::chrono::milliseconds(20));
    std::ofstream(wav, std::ios::binary) << "0123456789x";  // size and mtime change
    REQUIRE(name1 != hive::cache_file_name(wav, "mfcc20", 1));
}
