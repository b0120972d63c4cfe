// Command-line front end: synthetic dataset generation, feature cache
// population, experiment runs, and cache-file inspection.
//
// Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical failure.

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <mutex>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "hive/hive.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitNumeric = 3;

struct ExtractOptions {
    std::string manifest;
    std::string cache_dir;
    std::vector<std::string> kinds = {"mfcc20", "hht20"};
    std::size_t workers = 1;
};

int cmd_extract(const ExtractOptions& opt) {
    const auto manifest = hive::load_manifest(opt.manifest);
    fs::create_directories(opt.cache_dir);

    struct Job {
        const hive::ClipEntry* entry;
        std::string kind;
    };
    std::vector<Job> jobs;
    for (const auto& entry : manifest.entries)
        for (const auto& kind : opt.kinds) jobs.push_back({&entry, kind});

    std::atomic<std::size_t> written{0}, skipped{0};
    std::mutex failures_mutex;
    std::vector<std::string> failures;
    const hive::PipelineParams params;

    hive::parallel_for(jobs.size(), opt.workers, [&](std::size_t i) {
        const auto& job = jobs[i];
        const auto name =
            hive::cache_file_name(job.entry->path, job.kind, hive::kFeatureKindVersion);
        const auto target = fs::path(opt.cache_dir) / name;
        if (fs::exists(target)) {
            ++skipped;
            return;
        }
        try {
            const auto feat =
                hive::extract_feature(hive::load_wav(job.entry->path), job.kind, params);
            hive::save_feature(feat, target);
            ++written;
        } catch (const std::exception& e) {
            std::lock_guard<std::mutex> lock(failures_mutex);
            failures.push_back(job.entry->path + " [" + job.kind + "]: " + e.what());
        }
    });

    std::cout << "extracted " << written << " feature file(s), skipped " << skipped
              << " up-to-date, cache dir " << opt.cache_dir << "\n";
    if (!failures.empty()) {
        std::cerr << failures.size() << " file(s) failed:\n";
        for (const auto& f : failures) std::cerr << "  " << f << "\n";
        return kExitData;
    }
    return kExitOk;
}

struct RunOptions {
    std::string manifest;
    std::vector<std::string> experiments;
    bool all = false;
    std::string scheme;
    std::string out_dir = "results";
    std::string cache_dir;
    uint64_t seed = 42;
    std::size_t workers = 1;
    double test_frac = 0.05;
};

int cmd_run(const RunOptions& opt) {
    std::vector<hive::ExperimentId> ids;
    if (opt.all) {
        for (const auto& [id, name] : hive::experiment_names()) ids.push_back(id);
    } else {
        for (const auto& name : opt.experiments) {
            const auto id = hive::parse_experiment(name);
            if (!id) {
                std::cerr << "unknown experiment '" << name << "'; valid names:\n";
                for (const auto& [eid, ename] : hive::experiment_names())
                    std::cerr << "  " << ename << "\n";
                return kExitUsage;
            }
            ids.push_back(*id);
        }
    }
    if (ids.empty()) {
        std::cerr << "no experiments selected; pass --experiment or --all\n";
        return kExitUsage;
    }

    const auto manifest = hive::load_manifest(opt.manifest);
    for (const auto id : ids) {
        hive::ExperimentConfig cfg;
        cfg.id = id;
        cfg.scheme = opt.scheme == "random" ? hive::SplitScheme::Random
                                            : hive::SplitScheme::HiveIndependent;
        cfg.seed = opt.seed;
        cfg.workers = opt.workers;
        cfg.cache_dir = opt.cache_dir;
        cfg.test_frac = opt.test_frac;
        const auto result = hive::run_experiment(cfg, manifest);
        const auto json_path = hive::write_result_files(result, opt.out_dir);
        std::cout << hive::experiment_name(id) << " [" << hive::split_scheme_name(cfg.scheme)
                  << "]";
        for (const auto& fold : result.folds) {
            std::cout << " fold" << fold.fold << "=" << fold.test_auc;
            if (fold.train_auc) std::cout << " (train " << *fold.train_auc << ")";
        }
        std::cout << " mean=" << result.mean_test_auc << " -> " << json_path.string() << "\n";
    }
    return kExitOk;
}

struct SynthOptions {
    std::string spec_path;
    std::string out_dir;
    uint64_t seed = 42;
};

hive::SynthSpec parse_synth_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw hive::DataError("cannot open synth spec: " + path);
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw hive::DataError("bad synth spec JSON: " + std::string(e.what()));
    }
    hive::SynthSpec spec;
    spec.sample_rate = doc.value("sample_rate", spec.sample_rate);
    spec.duration_s = doc.value("duration_s", spec.duration_s);
    spec.clips_per_state = doc.value("clips_per_state", spec.clips_per_state);
    if (!doc.contains("hives") || !doc["hives"].is_array() || doc["hives"].empty())
        throw hive::DataError("synth spec must list at least one hive");
    for (const auto& h : doc["hives"]) {
        hive::HiveProfile profile;
        if (!h.contains("hive_id")) throw hive::DataError("synth spec hive without hive_id");
        profile.hive_id = h["hive_id"].get<std::string>();
        profile.fundamental_hz = h.value("fundamental_hz", profile.fundamental_hz);
        profile.noise_floor = h.value("noise_floor", profile.noise_floor);
        profile.queen_shift_hz = h.value("queen_shift_hz", profile.queen_shift_hz);
        if (h.contains("harmonic_amps"))
            profile.harmonic_amps = h["harmonic_amps"].get<std::vector<double>>();
        if (h.contains("queen_harmonic_gain"))
            profile.queen_harmonic_gain = h["queen_harmonic_gain"].get<std::vector<double>>();
        spec.hives.push_back(std::move(profile));
    }
    return spec;
}

int cmd_synth(const SynthOptions& opt) {
    const auto spec = parse_synth_spec(opt.spec_path);
    const auto manifest = hive::generate_dataset(spec, opt.out_dir, opt.seed);
    std::cout << "wrote " << manifest.entries.size() << " clip(s) and manifest.csv to "
              << opt.out_dir << "\n";
    return kExitOk;
}

int cmd_inspect(const std::string& path) {
    const auto feat = hive::load_feature(path);
    std::printf("# HIVF band_kind=%s rows=%zu cols=%zu frame_hop_s=%g\n",
                hive::band_kind_name(feat.band_kind), feat.data.rows(), feat.data.cols(),
                feat.frame_hop_s);
    for (std::size_t r = 0; r < feat.data.rows(); ++r) {
        for (std::size_t c = 0; c < feat.data.cols(); ++c) {
            if (c) std::printf(",");
            std::printf("%.9g", feat.data(r, c));
        }
        std::printf("\n");
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Beehive-state recognition pipeline"};
    app.require_subcommand(1);
    app.set_config("--config");  // optional TOML config, flags override

    ExtractOptions extract_opt;
    auto* extract = app.add_subcommand("extract", "Populate the feature cache from a manifest");
    extract->add_option("--manifest", extract_opt.manifest, "Dataset manifest CSV")->required();
    extract->add_option("--cache-dir", extract_opt.cache_dir, "Feature cache directory")
        ->envname("HIVE_CACHE_DIR")
        ->required();
    extract->add_option("--kinds", extract_opt.kinds,
                        "Feature kinds to extract (default: mfcc20 hht20)");
    extract->add_option("--workers", extract_opt.workers, "Worker threads");

    RunOptions run_opt;
    auto* run = app.add_subcommand("run", "Run experiments and write result files");
    run->add_option("--manifest", run_opt.manifest, "Dataset manifest CSV")->required();
    run->add_option("--experiment", run_opt.experiments, "Experiment name (repeatable)");
    run->add_flag("--all", run_opt.all, "Run all eight experiments");
    run->add_option("--scheme", run_opt.scheme, "Split scheme")
        ->check(CLI::IsMember({"random", "hive-independent"}))
        ->required();
    run->add_option("--out-dir", run_opt.out_dir, "Results directory (default: results)");
    run->add_option("--cache-dir", run_opt.cache_dir, "Feature cache directory")
        ->envname("HIVE_CACHE_DIR");
    run->add_option("--seed", run_opt.seed, "Base seed (fold 2 uses seed+1)");
    run->add_option("--workers", run_opt.workers, "Worker threads for feature extraction");
    run->add_option("--test-frac", run_opt.test_frac,
                    "Random-scheme test fraction (default 0.05)");

    SynthOptions synth_opt;
    auto* synth = app.add_subcommand("synth", "Generate a synthetic dataset");
    synth->add_option("--spec", synth_opt.spec_path, "Synth spec JSON")->required();
    synth->add_option("--out-dir", synth_opt.out_dir, "Output directory")->required();
    synth->add_option("--seed", synth_opt.seed, "Seed");

    std::string inspect_path;
    auto* inspect = app.add_subcommand("inspect", "Print a feature cache file as CSV");
    inspect->add_option("file", inspect_path, "HIVF feature file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (extract->parsed()) return cmd_extract(extract_opt);
        if (run->parsed()) return cmd_run(run_opt);
        if (synth->parsed()) return cmd_synth(synth_opt);
        if (inspect->parsed()) return cmd_inspect(inspect_path);
    } catch (const hive::NumericError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const hive::DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    }
    return kExitUsage;
}
