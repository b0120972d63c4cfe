#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>

#include "hive/manifest.hpp"

namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
    const auto dir = fs::temp_directory_path() / "hive_manifest_tests" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

void touch(const fs::path& p) { std::ofstream(p) << "x"; }

}  // namespace

TEST_CASE("a 2x2x144 layout loads as 576 entries", "[manifest]") {
    const auto dir = fresh_dir("full");
    std::ofstream csv(dir / "manifest.csv");
    csv << "path,hive_id,queen_present\n";
    for (int hive = 0; hive < 2; ++hive)
        for (int day = 0; day < 2; ++day)
            for (int i = 0; i < 144; ++i) {
                const std::string name = "h" + std::to_string(hive) + "_d" + std::to_string(day) +
                                         "_" + std::to_string(i) + ".wav";
                touch(dir / name);
                csv << name << ",hive" << hive << "," << day << "\n";
            }
    csv.close();

    const auto manifest = hive::load_manifest(dir / "manifest.csv");
    REQUIRE(manifest.entries.size() == 576);
    REQUIRE(manifest.hive_ids().size() == 2);
}

TEST_CASE("header-only manifest loads as empty", "[manifest]") {
    const auto dir = fresh_dir("empty");
    std::ofstream(dir / "m.csv") << "path,hive_id,queen_present\n";
    REQUIRE(hive::load_manifest(dir / "m.csv").entries.empty());
}

TEST_CASE("invalid rows are rejected with the row number", "[manifest]") {
    const auto dir = fresh_dir("bad");
    touch(dir / "a.wav");

    SECTION("queen_present out of range") {
        std::ofstream(dir / "m.csv") << "path,hive_id,queen_present\na.wav,h1,2\n";
        REQUIRE_THROWS_WITH(hive::load_manifest(dir / "m.csv"),
                            Catch::Matchers::ContainsSubstring("row 2"));
    }
    SECTION("duplicate path") {
        std::ofstream(dir / "m.csv")
            << "path,hive_id,queen_present\na.wav,h1,0\na.wav,h2,1\n";
        REQUIRE_THROWS_WITH(hive::load_manifest(dir / "m.csv"),
                            Catch::Matchers::ContainsSubstring("duplicate"));
    }
    SECTION("missing audio file") {
        std::ofstream(dir / "m.csv") << "path,hive_id,queen_present\nmissing.wav,h1,0\n";
        REQUIRE_THROWS_WITH(hive::load_manifest(dir / "m.csv"),
                            Catch::Matchers::ContainsSubstring("missing.wav"));
    }
    SECTION("wrong header") {
        std::ofstream(dir / "m.csv") << "file,hive,queen\na.wav,h1,0\n";
        REQUIRE_THROWS_AS(hive::load_manifest(dir / "m.csv"), hive::DataError);
    }
    SECTION("empty hive id") {
        std::ofstream(dir / "m.csv") << "path,hive_id,queen_present\na.wav,,0\n";
        REQUIRE_THROWS_WITH(hive::load_manifest(dir / "m.csv"),
                            Catch::Matchers::ContainsSubstring("hive_id"));
    }
}

TEST_CASE("save then load is the identity", "[manifest]") {
    const auto dir = fresh_dir("roundtrip");
    touch(dir / "x.wav");
    touch(dir / "y.wav");
    hive::DatasetManifest manifest;
    manifest.entries.push_back(
        {(dir / "x.wav").string(), "hiveA", true, 600.0});
    manifest.entries.push_back(
        {(dir / "y.wav").string(), "hiveB", false, 612.25});
    hive::save_manifest(manifest, dir / "m.csv");
    REQUIRE(hive::load_manifest(dir / "m.csv") == manifest);
}

TEST_CASE("duration column is optional", "[manifest]") {
    const auto dir = fresh_dir("duration");
    touch(dir / "a.wav");
    std::ofstream(dir / "m.csv")
        << "path,hive_id,queen_present,duration_s\na.wav,h1,1,600\n";
    const auto manifest = hive::load_manifest(dir / "m.csv");
    REQUIRE(manifest.entries.at(0).duration_s == 600.0);
    REQUIRE(manifest.entries.at(0).queen_present);
}
