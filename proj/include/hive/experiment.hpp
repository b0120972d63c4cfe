#pragma once

// The eight named experiments: feature pipeline selection, two-fold
// splitting, normalization fitted on training data only, classifier training
// and AUC scoring, and the JSON/CSV result files.

#include <chrono>
#include <cstdint>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"

#include "hive/audio.hpp"
#include "hive/cache.hpp"
#include "hive/cnn.hpp"
#include "hive/errors.hpp"
#include "hive/eval.hpp"
#include "hive/features.hpp"
#include "hive/hht.hpp"
#include "hive/manifest.hpp"
#include "hive/parallel.hpp"
#include "hive/pitch.hpp"
#include "hive/spectral.hpp"
#include "hive/svm.hpp"
#include "hive/zscore.hpp"

namespace hive {

// Fixed pipeline constants shared by extraction and experiments.
struct PipelineParams {
    std::size_t stft_window = 2048;
    std::size_t stft_hop = 512;
    std::size_t n_mels = 120;
    std::size_t n_mfcc = 20;
    double log_floor = 1e-10;
    int cnn_sample_rate = 22050;   // one-minute CNN segments are processed at this rate
    double segment_seconds = 60.0;
    std::size_t n_slices = 30;
    double hht_fmax = 6000.0;
    std::size_t hht_bins = 6000;
    std::size_t hht_out_bands = 20;
    std::size_t augment_versions = 3;
};

enum class ExperimentId : uint8_t {
    SvmMfccs20,
    SvmHhtDwns20,
    SvmMfccs20HhtDwns20,
    SvmMel120Dwns20,
    SvmLogMel120Dwns20,
    CnnMfccs20,
    CnnMel120,
    CnnLogMel120,
};

inline const std::vector<std::pair<ExperimentId, std::string>>& experiment_names() {
    static const std::vector<std::pair<ExperimentId, std::string>> names = {
        {ExperimentId::SvmMfccs20, "SVM_MFCCs20"},
        {ExperimentId::SvmHhtDwns20, "SVM_HHTdwns20"},
        {ExperimentId::SvmMfccs20HhtDwns20, "SVM_MFCCs20_HHTdwns20"},
        {ExperimentId::SvmMel120Dwns20, "SVM_MEL120dwns20"},
        {ExperimentId::SvmLogMel120Dwns20, "SVM_LOG_MEL120dwns20"},
        {ExperimentId::CnnMfccs20, "CNN_MFCCs20"},
        {ExperimentId::CnnMel120, "CNN_MEL120"},
        {ExperimentId::CnnLogMel120, "CNN_LOG_MEL120"},
    };
    return names;
}

inline std::string experiment_name(ExperimentId id) {
    for (const auto& [eid, name] : experiment_names())
        if (eid == id) return name;
    return "unknown";
}

inline std::optional<ExperimentId> parse_experiment(const std::string& name) {
    for (const auto& [eid, ename] : experiment_names())
        if (ename == name) return eid;
    return std::nullopt;
}

inline bool is_cnn_experiment(ExperimentId id) {
    return id == ExperimentId::CnnMfccs20 || id == ExperimentId::CnnMel120 ||
           id == ExperimentId::CnnLogMel120;
}

// ---------------------------------------------------------------------------
// Feature extraction per cacheable kind
// ---------------------------------------------------------------------------

// Cacheable feature kinds. SVM kinds produce one row per clip; CNN kinds
// produce n_slices rows per one-minute segment, stacked per clip.
inline const std::vector<std::string>& feature_kinds() {
    static const std::vector<std::string> kinds = {
        "mfcc20", "hht20", "mel120avg", "logmel120avg",
        "cnn_mfcc20", "cnn_mel120", "cnn_logmel120",
    };
    return kinds;
}

inline constexpr uint32_t kFeatureKindVersion = 1;

namespace detail {

inline FeatureMatrix row_matrix(const std::vector<double>& v, BandKind kind) {
    FeatureMatrix m;
    m.band_kind = kind;
    m.data = Matrix(1, v.size());
    m.data.data() = v;
    return m;
}

// 30 x bands long-term stack of one segment, already at the CNN sample rate.
inline Matrix cnn_segment_stack(const AudioClip& seg, const std::string& kind,
                                const PipelineParams& p) {
    const auto spec = stft_magnitude(seg, p.stft_window, p.stft_hop);
    const auto mel = mel_spectrogram(spec, p.n_mels);
    FeatureMatrix feat;
    if (kind == "cnn_mel120") {
        feat = mel;
    } else if (kind == "cnn_logmel120") {
        feat = log_mel(mel, p.log_floor);
    } else if (kind == "cnn_mfcc20") {
        feat = mfcc(log_mel(mel, p.log_floor), p.n_mfcc);
    } else {
        throw std::invalid_argument("unknown CNN feature kind: " + kind);
    }
    return slice_stack(feat, p.n_slices).data;
}

}  // namespace detail

// Computes a feature kind for a whole clip. `workers` only matters for the
// frame-parallel HHT kind.
inline FeatureMatrix extract_feature(const AudioClip& clip, const std::string& kind,
                                     const PipelineParams& p = {}, std::size_t workers = 1) {
    if (kind == "hht20") {
        const auto spec = hht_spectrogram(clip, workers);
        return detail::row_matrix(hht_band_vector(spec, p.hht_fmax, p.hht_bins, p.hht_out_bands),
                                  BandKind::HhtBand);
    }
    if (kind == "mfcc20" || kind == "mel120avg" || kind == "logmel120avg") {
        const auto spec = stft_magnitude(clip, p.stft_window, p.stft_hop);
        const auto mel = mel_spectrogram(spec, p.n_mels);
        if (kind == "mel120avg") return detail::row_matrix(time_average(mel), BandKind::Mel);
        const auto logm = log_mel(mel, p.log_floor);
        if (kind == "logmel120avg") return detail::row_matrix(time_average(logm), BandKind::Mel);
        return detail::row_matrix(time_average(mfcc(logm, p.n_mfcc)), BandKind::Mfcc);
    }
    if (kind == "cnn_mfcc20" || kind == "cnn_mel120" || kind == "cnn_logmel120") {
        const auto at_rate = resample(clip, p.cnn_sample_rate);
        const auto segments = segment(at_rate, p.segment_seconds);
        if (segments.empty())
            throw DataError("clip shorter than one segment: " + clip.source_id);
        const std::size_t bands = kind == "cnn_mfcc20" ? p.n_mfcc : p.n_mels;
        FeatureMatrix out;
        out.band_kind = kind == "cnn_mfcc20" ? BandKind::Mfcc : BandKind::Mel;
        out.frame_hop_s = p.segment_seconds / static_cast<double>(p.n_slices);
        out.data = Matrix(segments.size() * p.n_slices, bands);
        for (std::size_t s = 0; s < segments.size(); ++s) {
            const Matrix stack = detail::cnn_segment_stack(segments[s], kind, p);
            for (std::size_t r = 0; r < p.n_slices; ++r)
                for (std::size_t c = 0; c < bands; ++c)
                    out.data(s * p.n_slices + r, c) = stack(r, c);
        }
        return out;
    }
    throw std::invalid_argument("unknown feature kind: " + kind);
}

// Load-or-compute through the cache directory; an empty cache_dir computes
// every time.
inline FeatureMatrix cached_feature(const std::string& audio_path, const std::string& kind,
                                    const std::filesystem::path& cache_dir,
                                    const PipelineParams& p = {}, std::size_t workers = 1) {
    if (cache_dir.empty()) return extract_feature(load_wav(audio_path), kind, p, workers);
    const auto entry = cache_dir / cache_file_name(audio_path, kind, kFeatureKindVersion);
    if (std::filesystem::exists(entry)) return load_feature(entry);
    const auto feat = extract_feature(load_wav(audio_path), kind, p, workers);
    std::filesystem::create_directories(cache_dir);
    save_feature(feat, entry);
    return feat;
}

// ---------------------------------------------------------------------------
// Experiment orchestration
// ---------------------------------------------------------------------------

struct ExperimentConfig {
    ExperimentId id = ExperimentId::SvmMfccs20;
    SplitScheme scheme = SplitScheme::Random;
    uint64_t seed = 42;
    std::size_t workers = 1;
    std::filesystem::path cache_dir;  // empty disables caching
    PipelineParams params;
    TrainConfig cnn_train;  // seed field is overridden per fold
    double test_frac = 0.05;
};

// Test-time instrumentation: observe the split of every fold and the clip
// ids whose features feed normalization fitting.
struct ExperimentHooks {
    std::function<void(const SplitPlan&, const std::vector<LabeledSample>&)> on_split;
    std::function<void(const std::vector<std::string>&)> on_normalization_fit;
};

struct FoldResult {
    int fold = 0;
    double test_auc = 0.0;
    std::optional<double> train_auc;
};

struct AucResult {
    ExperimentId id = ExperimentId::SvmMfccs20;
    SplitScheme scheme = SplitScheme::Random;
    std::vector<FoldResult> folds;
    double mean_test_auc = 0.0;
    uint64_t seed = 0;
};

namespace detail {

inline std::vector<std::string> svm_kinds_for(ExperimentId id) {
    switch (id) {
        case ExperimentId::SvmMfccs20: return {"mfcc20"};
        case ExperimentId::SvmHhtDwns20: return {"hht20"};
        case ExperimentId::SvmMfccs20HhtDwns20: return {"mfcc20", "hht20"};
        case ExperimentId::SvmMel120Dwns20: return {"mel120avg"};
        case ExperimentId::SvmLogMel120Dwns20: return {"logmel120avg"};
        default: throw std::invalid_argument("not an SVM experiment");
    }
}

inline std::string cnn_kind_for(ExperimentId id) {
    switch (id) {
        case ExperimentId::CnnMfccs20: return "cnn_mfcc20";
        case ExperimentId::CnnMel120: return "cnn_mel120";
        case ExperimentId::CnnLogMel120: return "cnn_logmel120";
        default: throw std::invalid_argument("not a CNN experiment");
    }
}

inline FeatureVector assemble_svm_vector(ExperimentId id,
                                         const std::map<std::string, FeatureMatrix>& feats) {
    const auto row_of = [&](const std::string& kind) {
        const auto& m = feats.at(kind);
        return std::vector<double>(m.data.data());
    };
    switch (id) {
        case ExperimentId::SvmMfccs20:
            return make_feature_vector(row_of("mfcc20"), Provenance::Mfcc20);
        case ExperimentId::SvmHhtDwns20:
            return make_feature_vector(row_of("hht20"), Provenance::Hht20);
        case ExperimentId::SvmMfccs20HhtDwns20:
            return concat(make_feature_vector(row_of("mfcc20"), Provenance::Mfcc20),
                          make_feature_vector(row_of("hht20"), Provenance::Hht20));
        case ExperimentId::SvmMel120Dwns20:
            return make_feature_vector(downsample_bands(row_of("mel120avg"), 20),
                                       Provenance::Mel20);
        case ExperimentId::SvmLogMel120Dwns20:
            return make_feature_vector(downsample_bands(row_of("logmel120avg"), 20),
                                       Provenance::LogMel20);
        default: throw std::invalid_argument("not an SVM experiment");
    }
}

// Test hives per fold: sorted hive ids, fold 1 tests the upper half,
// fold 2 the lower half, so every hive is tested exactly once.
inline std::set<std::string> fold_test_hives(const std::set<std::string>& hives, int fold) {
    std::vector<std::string> sorted(hives.begin(), hives.end());
    const std::size_t half = (sorted.size() + 1) / 2;
    std::set<std::string> test;
    if (fold == 1) {
        for (std::size_t i = half; i < sorted.size(); ++i) test.insert(sorted[i]);
    } else {
        for (std::size_t i = 0; i < half; ++i) test.insert(sorted[i]);
    }
    return test;
}

inline uint64_t augment_seed(uint64_t base, int fold, const std::string& clip_id) {
    return fnv1a(clip_id + "|fold" + std::to_string(fold), base ^ 0x6a09e667f3bcc908ULL);
}

}  // namespace detail

inline AucResult run_experiment(const ExperimentConfig& cfg, const DatasetManifest& manifest,
                                const ExperimentHooks& hooks = {}) {
    if (manifest.entries.empty()) throw DataError("run_experiment: empty manifest");
    const auto hives = manifest.hive_ids();
    if (cfg.scheme == SplitScheme::HiveIndependent && hives.size() < 2)
        throw DataError("run_experiment: hive-independent scheme needs at least two hives");

    AucResult result;
    result.id = cfg.id;
    result.scheme = cfg.scheme;
    result.seed = cfg.seed;

    const bool cnn = is_cnn_experiment(cfg.id);

    // --- sample assembly ---------------------------------------------------
    std::vector<LabeledSample> samples;
    if (!cnn) {
        const auto kinds = detail::svm_kinds_for(cfg.id);
        std::vector<LabeledSample> per_clip(manifest.entries.size());
        parallel_for(manifest.entries.size(), cfg.workers, [&](std::size_t i) {
            const auto& entry = manifest.entries[i];
            std::map<std::string, FeatureMatrix> feats;
            for (const auto& kind : kinds)
                feats[kind] = cached_feature(entry.path, kind, cfg.cache_dir, cfg.params);
            LabeledSample s;
            s.vec = detail::assemble_svm_vector(cfg.id, feats);
            s.label = entry.queen_present ? 1 : 0;
            s.hive_id = entry.hive_id;
            s.clip_id = entry.path;
            per_clip[i] = std::move(s);
        });
        samples = std::move(per_clip);
    } else {
        const auto kind = detail::cnn_kind_for(cfg.id);
        std::vector<std::vector<LabeledSample>> per_clip(manifest.entries.size());
        parallel_for(manifest.entries.size(), cfg.workers, [&](std::size_t i) {
            const auto& entry = manifest.entries[i];
            const auto feat = cached_feature(entry.path, kind, cfg.cache_dir, cfg.params);
            if (feat.data.rows() % cfg.params.n_slices != 0)
                throw DataError("cached CNN feature has unexpected row count for " + entry.path);
            const std::size_t n_seg = feat.data.rows() / cfg.params.n_slices;
            for (std::size_t s = 0; s < n_seg; ++s) {
                LabeledSample sample;
                SliceStack stack;
                stack.n_slices = cfg.params.n_slices;
                stack.data = Matrix(cfg.params.n_slices, feat.data.cols());
                for (std::size_t r = 0; r < cfg.params.n_slices; ++r)
                    for (std::size_t c = 0; c < feat.data.cols(); ++c)
                        stack.data(r, c) = feat.data(s * cfg.params.n_slices + r, c);
                sample.stack = std::move(stack);
                sample.label = entry.queen_present ? 1 : 0;
                sample.hive_id = entry.hive_id;
                sample.clip_id = entry.path + "#" + std::to_string(s);
                per_clip[i].push_back(std::move(sample));
            }
        });
        for (auto& group : per_clip)
            for (auto& s : group) samples.push_back(std::move(s));
    }

    // --- folds --------------------------------------------------------------
    double auc_sum = 0.0;
    for (int fold = 1; fold <= 2; ++fold) {
        const uint64_t fold_seed = cfg.seed + static_cast<uint64_t>(fold - 1);
        SplitPlan plan;
        if (cfg.scheme == SplitScheme::Random) {
            plan = random_split(samples, cfg.test_frac, cnn, fold_seed);
        } else {
            plan = hive_independent_split(samples, detail::fold_test_hives(hives, fold), cnn,
                                          fold_seed);
            assert_no_hive_leakage(samples, plan);
        }
        plan.fold_id = fold;
        if (hooks.on_split) hooks.on_split(plan, samples);

        FoldResult fold_result;
        fold_result.fold = fold;

        if (!cnn) {
            std::vector<std::vector<double>> train_x;
            std::vector<int> train_y;
            std::vector<std::string> fit_ids;
            for (auto i : plan.train) {
                train_x.push_back(samples[i].vec->values);
                train_y.push_back(samples[i].label == 1 ? 1 : -1);
                fit_ids.push_back(samples[i].clip_id);
            }
            const auto stats = zscore_fit(train_x, ZScoreMode::PerFeature);
            if (hooks.on_normalization_fit) hooks.on_normalization_fit(fit_ids);
            for (auto& v : train_x) zscore_apply(stats, v);

            SvmConfig svm_cfg;  // C = 1, gamma = 1/d
            const SvmModel model = svm_train(train_x, train_y, svm_cfg, fold_seed);

            std::vector<double> train_scores;
            std::vector<int> train_labels;
            for (std::size_t k = 0; k < plan.train.size(); ++k) {
                train_scores.push_back(decision_score(model, train_x[k]));
                train_labels.push_back(samples[plan.train[k]].label);
            }
            std::vector<double> test_scores;
            std::vector<int> test_labels;
            for (auto i : plan.test) {
                auto v = samples[i].vec->values;
                zscore_apply(stats, v);
                test_scores.push_back(decision_score(model, v));
                test_labels.push_back(samples[i].label);
            }
            fold_result.train_auc = auc(train_scores, train_labels);
            fold_result.test_auc = auc(test_scores, test_labels);
        } else {
            // Train samples are tripled with pitch-shifted versions computed
            // from the original audio; features for those are never cached.
            std::vector<CnnSample> train_set(plan.train.size() * cfg.params.augment_versions);
            std::vector<std::string> fit_ids;
            for (auto i : plan.train) fit_ids.push_back(samples[i].clip_id);

            // group train indices by clip so each WAV is loaded once
            std::map<std::string, std::vector<std::size_t>> by_clip;  // path -> positions in plan.train
            for (std::size_t k = 0; k < plan.train.size(); ++k) {
                const auto& clip_id = samples[plan.train[k]].clip_id;
                by_clip[clip_id.substr(0, clip_id.rfind('#'))].push_back(k);
            }
            std::vector<const std::pair<const std::string, std::vector<std::size_t>>*> groups;
            for (const auto& g : by_clip) groups.push_back(&g);
            const auto kind = detail::cnn_kind_for(cfg.id);
            parallel_for(groups.size(), cfg.workers, [&](std::size_t gi) {
                const auto& [path, positions] = *groups[gi];
                const auto clip = resample(load_wav(path), cfg.params.cnn_sample_rate);
                const auto segs = segment(clip, cfg.params.segment_seconds);
                for (std::size_t k : positions) {
                    const auto& sample = samples[plan.train[k]];
                    const auto hash_pos = sample.clip_id.rfind('#');
                    const auto seg_idx = static_cast<std::size_t>(
                        std::stoul(sample.clip_id.substr(hash_pos + 1)));
                    const auto versions =
                        augment(segs.at(seg_idx), cfg.params.augment_versions,
                                detail::augment_seed(cfg.seed, fold, sample.clip_id));
                    for (std::size_t v = 0; v < versions.size(); ++v) {
                        CnnSample t;
                        t.x = detail::cnn_segment_stack(versions[v], kind, cfg.params);
                        t.label = sample.label;
                        train_set[k * cfg.params.augment_versions + v] = std::move(t);
                    }
                }
            });

            std::vector<Matrix> train_mats;
            train_mats.reserve(train_set.size());
            for (const auto& t : train_set) train_mats.push_back(t.x);
            const auto stats = zscore_fit(train_mats, ZScoreMode::FrequencyWise);
            if (hooks.on_normalization_fit) hooks.on_normalization_fit(fit_ids);
            for (auto& t : train_set) zscore_apply(stats, t.x);

            const auto make_set = [&](const std::vector<std::size_t>& idx) {
                std::vector<CnnSample> set;
                set.reserve(idx.size());
                for (auto i : idx) {
                    CnnSample s;
                    s.x = samples[i].stack->data;
                    zscore_apply(stats, s.x);
                    s.label = samples[i].label;
                    set.push_back(std::move(s));
                }
                return set;
            };
            const auto val_set = make_set(plan.val);
            const auto test_set = make_set(plan.test);

            TrainConfig train_cfg = cfg.cnn_train;
            train_cfg.seed = fold_seed;
            const auto outcome = cnn_train(train_set, val_set, CnnArchitecture{}, train_cfg);

            std::vector<double> test_scores;
            std::vector<int> test_labels;
            for (std::size_t k = 0; k < test_set.size(); ++k) {
                test_scores.push_back(cnn_forward(outcome.model, test_set[k].x));
                test_labels.push_back(test_set[k].label);
            }
            fold_result.test_auc = auc(test_scores, test_labels);
        }

        auc_sum += fold_result.test_auc;
        result.folds.push_back(fold_result);
    }
    result.mean_test_auc = auc_sum / static_cast<double>(result.folds.size());
    return result;
}

// ---------------------------------------------------------------------------
// Result files
// ---------------------------------------------------------------------------

inline std::string iso_timestamp() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::tm tm_utc{};
    gmtime_r(&t, &tm_utc);
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
    return buf;
}

// Writes <experiment>_<scheme>.json plus a flat CSV mirror into out_dir and
// returns the JSON path.
inline std::filesystem::path write_result_files(const AucResult& result,
                                                const std::filesystem::path& out_dir) {
    std::filesystem::create_directories(out_dir);
    const std::string scheme = split_scheme_name(result.scheme);
    const std::string stem = experiment_name(result.id) + "_" + scheme;

    nlohmann::json folds = nlohmann::json::array();
    for (const auto& f : result.folds) {
        nlohmann::json entry = {{"fold", f.fold}, {"test_auc", f.test_auc}};
        if (f.train_auc) entry["train_auc"] = *f.train_auc;
        folds.push_back(entry);
    }
    const nlohmann::json doc = {
        {"experiment", experiment_name(result.id)},
        {"scheme", scheme},
        {"fold_results", folds},
        {"mean_test_auc", result.mean_test_auc},
        {"seeds", {result.seed, result.seed + 1}},
        {"timestamp", iso_timestamp()},
    };
    const auto json_path = out_dir / (stem + ".json");
    {
        std::ofstream out(json_path);
        if (!out) throw DataError("cannot write results file: " + json_path.string());
        out << doc.dump(2) << '\n';
    }

    const auto csv_path = out_dir / (stem + ".csv");
    std::ofstream csv(csv_path);
    if (!csv) throw DataError("cannot write results file: " + csv_path.string());
    csv.precision(12);
    csv << "experiment,scheme,fold,test_auc,train_auc\n";
    for (const auto& f : result.folds) {
        csv << experiment_name(result.id) << ',' << scheme << ',' << f.fold << ',' << f.test_auc
            << ',';
        if (f.train_auc) csv << *f.train_auc;
        csv << '\n';
    }
    csv << experiment_name(result.id) << ',' << scheme << ",mean," << result.mean_test_auc
        << ",\n";
    return json_path;
}

}  // namespace hive
