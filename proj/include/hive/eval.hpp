#pragma once

// Dataset splitting and the AUC metric. Random splits are stratified by
// label; hive-independent splits put whole hives in the test set so no hive
// appears on both sides.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "hive/errors.hpp"
#include "hive/features.hpp"

namespace hive {

// One classifier input: a feature payload (vector for the SVM family, slice
// stack for the CNN family) with its label and origin.
struct LabeledSample {
    std::optional<FeatureVector> vec;
    std::optional<SliceStack> stack;
    int label = 0;  // {0, 1}
    std::string hive_id;
    std::string clip_id;
};

enum class SplitScheme : uint8_t { Random, HiveIndependent };

inline const char* split_scheme_name(SplitScheme s) {
    return s == SplitScheme::Random ? "random" : "hive-independent";
}

struct SplitPlan {
    SplitScheme scheme = SplitScheme::Random;
    std::vector<std::size_t> train;
    std::vector<std::size_t> val;  // empty in SVM mode
    std::vector<std::size_t> test;
    int fold_id = 1;
    uint64_t seed = 0;
};

namespace detail {

// Largest-remainder allocation of `total` test slots across classes, with at
// least one slot per class.
inline std::vector<std::size_t> allocate_per_class(const std::vector<std::size_t>& class_sizes,
                                                   std::size_t total_samples, std::size_t total) {
    const std::size_t k = class_sizes.size();
    std::vector<std::size_t> alloc(k, 0);
    std::vector<std::pair<double, std::size_t>> remainders;
    std::size_t assigned = 0;
    for (std::size_t c = 0; c < k; ++c) {
        const double exact = static_cast<double>(total) * static_cast<double>(class_sizes[c]) /
                             static_cast<double>(total_samples);
        alloc[c] = static_cast<std::size_t>(exact);
        assigned += alloc[c];
        remainders.emplace_back(exact - static_cast<double>(alloc[c]), c);
    }
    std::sort(remainders.begin(), remainders.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    });
    for (std::size_t i = 0; assigned < total && i < remainders.size(); ++i, ++assigned)
        ++alloc[remainders[i].second];
    for (std::size_t c = 0; c < k; ++c) {
        if (alloc[c] == 0) {
            // steal one slot from the largest allocation
            const std::size_t donor = static_cast<std::size_t>(
                std::max_element(alloc.begin(), alloc.end()) - alloc.begin());
            if (alloc[donor] <= 1)
                throw DataError("split: dataset too small for stratification");
            --alloc[donor];
            ++alloc[c];
        }
        if (alloc[c] >= class_sizes[c])
            throw DataError("split: class too small to leave training data");
    }
    return alloc;
}

}  // namespace detail

// Stratified random split. Test size is ceil(test_frac * n), allocated across
// labels by largest remainder; with needs_val the remainder is halved into
// train and validation (sizes differing by at most one), otherwise it all
// becomes training data. Deterministic per seed.
inline SplitPlan random_split(const std::vector<LabeledSample>& ds, double test_frac,
                              bool needs_val, uint64_t seed) {
    if (ds.empty()) throw DataError("random_split: empty dataset");
    if (test_frac <= 0.0 || test_frac >= 1.0)
        throw std::invalid_argument("random_split: test_frac must be in (0, 1)");

    std::vector<std::vector<std::size_t>> by_class(2);
    for (std::size_t i = 0; i < ds.size(); ++i) {
        if (ds[i].label != 0 && ds[i].label != 1)
            throw std::invalid_argument("random_split: labels must be 0 or 1");
        by_class[static_cast<std::size_t>(ds[i].label)].push_back(i);
    }
    if (by_class[0].empty() || by_class[1].empty())
        throw DataError("random_split: both classes must be present");

    const auto n_test = static_cast<std::size_t>(
        std::ceil(test_frac * static_cast<double>(ds.size())));
    const auto test_alloc = detail::allocate_per_class(
        {by_class[0].size(), by_class[1].size()}, ds.size(), n_test);

    SplitPlan plan;
    plan.scheme = SplitScheme::Random;
    plan.seed = seed;
    std::mt19937_64 rng(seed);
    bool val_gets_extra = true;  // alternate odd remainders across classes
    for (std::size_t c = 0; c < 2; ++c) {
        auto idx = by_class[c];
        std::shuffle(idx.begin(), idx.end(), rng);
        const std::size_t t = test_alloc[c];
        plan.test.insert(plan.test.end(), idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(t));
        const std::size_t rest = idx.size() - t;
        if (!needs_val) {
            plan.train.insert(plan.train.end(), idx.begin() + static_cast<std::ptrdiff_t>(t),
                              idx.end());
            continue;
        }
        std::size_t n_val = rest / 2;
        if (rest % 2 == 1 && val_gets_extra) ++n_val;
        if (rest % 2 == 1) val_gets_extra = !val_gets_extra;
        if (n_val == 0 || rest - n_val == 0)
            throw DataError("random_split: dataset too small for a validation split");
        plan.val.insert(plan.val.end(), idx.begin() + static_cast<std::ptrdiff_t>(t),
                        idx.begin() + static_cast<std::ptrdiff_t>(t + n_val));
        plan.train.insert(plan.train.end(), idx.begin() + static_cast<std::ptrdiff_t>(t + n_val),
                          idx.end());
    }
    std::sort(plan.train.begin(), plan.train.end());
    std::sort(plan.val.begin(), plan.val.end());
    std::sort(plan.test.begin(), plan.test.end());
    return plan;
}

// Hive-independent split: every sample of a test hive goes to the test set.
// With needs_val, a seeded 10% (ceil) of the training samples becomes the
// validation set.
inline SplitPlan hive_independent_split(const std::vector<LabeledSample>& ds,
                                        const std::set<std::string>& test_hives, bool needs_val,
                                        uint64_t seed) {
    if (ds.empty()) throw DataError("hive_independent_split: empty dataset");
    if (test_hives.empty())
        throw std::invalid_argument("hive_independent_split: test_hives must be nonempty");

    std::set<std::string> all_hives;
    for (const auto& s : ds) all_hives.insert(s.hive_id);
    if (all_hives.size() < 2)
        throw DataError("hive_independent_split: need at least two hives");
    for (const auto& h : test_hives)
        if (!all_hives.count(h))
            throw DataError("hive_independent_split: unknown hive id '" + h + "'");
    if (test_hives.size() >= all_hives.size())
        throw DataError("hive_independent_split: at least one hive must remain for training");

    SplitPlan plan;
    plan.scheme = SplitScheme::HiveIndependent;
    plan.seed = seed;
    std::vector<std::size_t> train_pool;
    for (std::size_t i = 0; i < ds.size(); ++i) {
        if (test_hives.count(ds[i].hive_id))
            plan.test.push_back(i);
        else
            train_pool.push_back(i);
    }
    if (plan.test.empty() || train_pool.empty())
        throw DataError("hive_independent_split: empty train or test side");

    if (needs_val) {
        const auto n_val = static_cast<std::size_t>(
            std::ceil(0.1 * static_cast<double>(train_pool.size())));
        std::mt19937_64 rng(seed);
        std::shuffle(train_pool.begin(), train_pool.end(), rng);
        plan.val.assign(train_pool.begin(), train_pool.begin() + static_cast<std::ptrdiff_t>(n_val));
        plan.train.assign(train_pool.begin() + static_cast<std::ptrdiff_t>(n_val),
                          train_pool.end());
        if (plan.train.empty())
            throw DataError("hive_independent_split: validation split exhausted training data");
    } else {
        plan.train = std::move(train_pool);
    }
    std::sort(plan.train.begin(), plan.train.end());
    std::sort(plan.val.begin(), plan.val.end());
    std::sort(plan.test.begin(), plan.test.end());
    return plan;
}

// Throws unless train/val hives and test hives are disjoint.
inline void assert_no_hive_leakage(const std::vector<LabeledSample>& ds, const SplitPlan& plan) {
    std::set<std::string> fit_hives, test_hives;
    for (auto i : plan.train) fit_hives.insert(ds[i].hive_id);
    for (auto i : plan.val) fit_hives.insert(ds[i].hive_id);
    for (auto i : plan.test) test_hives.insert(ds[i].hive_id);
    for (const auto& h : test_hives)
        if (fit_hives.count(h))
            throw DataError("hive leakage: hive '" + h + "' appears in both fit and test sets");
}

// Area under the ROC curve via the rank (Mann-Whitney) formulation; tied
// scores contribute 1/2 through midranks, matching trapezoidal ROC area.
inline double auc(const std::vector<double>& scores, const std::vector<int>& labels) {
    if (scores.size() != labels.size())
        throw std::invalid_argument("auc: scores and labels differ in length");
    if (scores.empty()) throw std::invalid_argument("auc: empty input");
    std::size_t n_pos = 0, n_neg = 0;
    for (int l : labels) {
        if (l == 1)
            ++n_pos;
        else if (l == 0)
            ++n_neg;
        else
            throw std::invalid_argument("auc: labels must be 0 or 1");
    }
    if (n_pos == 0 || n_neg == 0) throw DataError("auc: both classes must be present");

    std::vector<std::size_t> order(scores.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

    double pos_rank_sum = 0.0;
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
        const double midrank = 0.5 * static_cast<double>(i + 1 + j);  // ranks are 1-based
        for (std::size_t k = i; k < j; ++k)
            if (labels[order[k]] == 1) pos_rank_sum += midrank;
        i = j;
    }
    const double u = pos_rank_sum - static_cast<double>(n_pos) *
                                        (static_cast<double>(n_pos) + 1.0) / 2.0;
    return u / (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

}  // namespace hive
