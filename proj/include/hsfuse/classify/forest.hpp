#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "hsfuse/classify/dataset.hpp"
#include "hsfuse/core/cube_io.hpp"
#include "hsfuse/core/errors.hpp"
#include "hsfuse/core/image.hpp"
#include "hsfuse/core/parallel.hpp"
#include "hsfuse/core/rng.hpp"
#include "hsfuse/eval/roc.hpp"

namespace hsfuse {

// Random forest of CART trees (Gini impurity), written for reproducibility:
// all randomness comes from the counter RNG keyed by (seed, tree index), so
// training gives bit-identical forests regardless of thread count, and every
// tie (equal split gain, equal votes) breaks toward the lowest index.

struct TreeNode {
    int32_t feature = -1; // -1 marks a leaf
    double threshold = 0.0;
    int32_t left = -1;
    int32_t right = -1;
    std::vector<uint32_t> counts; // leaf: per-class sample counts (model class order)
};

struct DecisionTree {
    std::vector<TreeNode> nodes; // nodes[0] is the root
};

struct ForestConfig {
    int n_trees = 100;
    int max_depth = -1;         // -1 = unlimited, 0 = root leaf only
    int min_samples_split = 2;
    int features_per_split = 0; // 0 = floor(sqrt(n_features))
    uint64_t seed = 0;
};

struct RandomForest {
    std::vector<uint8_t> classes; // sorted distinct training class codes
    int n_features = 0;
    ForestConfig config{};
    double oob_accuracy = 0.0; // out-of-bag accuracy measured during training
    std::vector<DecisionTree> trees;

    int class_count() const { return static_cast<int>(classes.size()); }
};

namespace forestdetail {

inline double gini(const std::vector<uint32_t>& counts, uint32_t total) {
    if (total == 0) return 0.0;
    double g = 1.0;
    for (uint32_t c : counts) {
        double p = static_cast<double>(c) / total;
        g -= p * p;
    }
    return g;
}

/// Leaf vote: majority class index, lowest index on ties.
inline int leaf_vote(const std::vector<uint32_t>& counts) {
    int best = 0;
    for (int c = 1; c < static_cast<int>(counts.size()); ++c)
        if (counts[c] > counts[best]) best = c;
    return best;
}

inline int tree_predict(const DecisionTree& tree, const float* x) {
    int i = 0;
    while (tree.nodes[i].feature >= 0)
        i = (x[tree.nodes[i].feature] < tree.nodes[i].threshold) ? tree.nodes[i].left
                                                                 : tree.nodes[i].right;
    return leaf_vote(tree.nodes[i].counts);
}

struct SplitChoice {
    bool found = false;
    int feature = -1;
    double threshold = 0.0;
    double gain = 0.0;
};

/// Best (gain, feature, threshold) over the candidate features; thresholds
/// are midpoints between consecutive distinct sorted values. Ties in gain
/// break toward the lower feature index, then the lower threshold.
inline SplitChoice best_split(const PixelDataset& data, std::span<const uint32_t> samples,
                              std::span<const int> feats, const std::vector<int>& class_of,
                              int n_classes, const std::vector<uint32_t>& parent_counts) {
    const uint32_t n = static_cast<uint32_t>(samples.size());
    const double parent_impurity = gini(parent_counts, n);
    SplitChoice best;

    std::vector<std::pair<float, int>> vals(n); // (value, class index)
    std::vector<uint32_t> left_counts(n_classes);
    for (int f : feats) {
        for (uint32_t i = 0; i < n; ++i) {
            const uint32_t s = samples[i];
            vals[i] = {data.row(s)[f], class_of[data.labels[s]]};
        }
        std::sort(vals.begin(), vals.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        if (vals.front().first == vals.back().first) continue; // constant feature

        std::fill(left_counts.begin(), left_counts.end(), 0);
        uint32_t n_left = 0;
        for (uint32_t i = 0; i + 1 < n; ++i) {
            ++left_counts[vals[i].second];
            ++n_left;
            if (vals[i].first == vals[i + 1].first) continue; // not a boundary
            double gl = gini(left_counts, n_left);
            std::vector<uint32_t> right_counts(n_classes);
            for (int c = 0; c < n_classes; ++c) right_counts[c] = parent_counts[c] - left_counts[c];
            double gr = gini(right_counts, n - n_left);
            double children = (static_cast<double>(n_left) * gl +
                               static_cast<double>(n - n_left) * gr) /
                              n;
            double gain = parent_impurity - children;
            double thr = 0.5 * (static_cast<double>(vals[i].first) +
                                static_cast<double>(vals[i + 1].first));
            bool better = false;
            if (!best.found || gain > best.gain + 1e-15)
                better = true;
            else if (std::abs(gain - best.gain) <= 1e-15) {
                if (f < best.feature || (f == best.feature && thr < best.threshold))
                    better = true;
            }
            if (better && gain > 1e-12) {
                best.found = true;
                best.feature = f;
                best.threshold = thr;
                best.gain = gain;
            }
        }
    }
    return best;
}

struct BuildItem {
    int node;
    uint32_t begin, end; // range in the workspace index array
    int depth;
};

inline DecisionTree build_tree(const PixelDataset& data, const ForestConfig& cfg,
                               const std::vector<int>& class_of, int n_classes,
                               std::vector<uint32_t>& workspace, CounterRng& rng) {
    const int d = data.n_features;
    const int k = cfg.features_per_split > 0
                      ? cfg.features_per_split
                      : std::max(1, static_cast<int>(std::floor(std::sqrt(d))));

    DecisionTree tree;
    std::vector<BuildItem> stack;
    tree.nodes.emplace_back();
    stack.push_back({0, 0, static_cast<uint32_t>(workspace.size()), 0});
    std::vector<int> all_feats(d);
    std::iota(all_feats.begin(), all_feats.end(), 0);

    while (!stack.empty()) {
        BuildItem item = stack.back();
        stack.pop_back();
        std::span<uint32_t> samples(workspace.data() + item.begin, item.end - item.begin);

        std::vector<uint32_t> counts(n_classes, 0);
        for (uint32_t s : samples) ++counts[class_of[data.labels[s]]];
        uint32_t n = static_cast<uint32_t>(samples.size());
        bool pure = false;
        for (int c = 0; c < n_classes; ++c)
            if (counts[c] == n) pure = true;

        auto make_leaf = [&] { tree.nodes[item.node].counts = counts; };
        if (pure || n < static_cast<uint32_t>(cfg.min_samples_split) ||
            (cfg.max_depth >= 0 && item.depth >= cfg.max_depth)) {
            make_leaf();
            continue;
        }

        // Sample k distinct candidate features (partial Fisher-Yates).
        std::vector<int> feats(all_feats);
        for (int i = 0; i < k; ++i) {
            int j = i + static_cast<int>(rng.next_index(static_cast<uint64_t>(d - i)));
            std::swap(feats[i], feats[j]);
        }
        feats.resize(k);
        std::sort(feats.begin(), feats.end()); // candidate order fixed for tie-breaks

        SplitChoice split = best_split(data, samples, feats, class_of, n_classes, counts);
        if (!split.found) {
            make_leaf();
            continue;
        }

        auto mid_it = std::stable_partition(samples.begin(), samples.end(), [&](uint32_t s) {
            return data.row(s)[split.feature] < split.threshold;
        });
        uint32_t mid = item.begin + static_cast<uint32_t>(mid_it - samples.begin());
        if (mid == item.begin || mid == item.end) { // numerically degenerate split
            make_leaf();
            continue;
        }

        TreeNode& node = tree.nodes[item.node];
        node.feature = split.feature;
        node.threshold = split.threshold;
        node.left = static_cast<int32_t>(tree.nodes.size());
        tree.nodes.emplace_back();
        int32_t right = static_cast<int32_t>(tree.nodes.size());
        tree.nodes.emplace_back();
        tree.nodes[item.node].right = right;
        // Process left before right: push right first (LIFO). Keeps RNG
        // consumption order independent of anything but the tree shape.
        stack.push_back({right, mid, item.end, item.depth + 1});
        stack.push_back({tree.nodes[item.node].left, item.begin, mid, item.depth + 1});
    }
    return tree;
}

} // namespace forestdetail

/// Trains a random forest on the dataset. Bootstrap sample per tree (size n,
/// with replacement), Gini splits over floor(sqrt(d)) random features per
/// node by default. Deterministic for a given (data, config).
inline RandomForest train_rf(const PixelDataset& data, const ForestConfig& cfg) {
    data.validate();
    detail::require(cfg.n_trees >= 1, "train_rf: need at least one tree");
    detail::require(cfg.max_depth >= -1, "train_rf: invalid max_depth");
    detail::require(cfg.min_samples_split >= 2, "train_rf: min_samples_split must be >= 2");
    detail::require(cfg.features_per_split >= 0 && cfg.features_per_split <= data.n_features,
                    "train_rf: features_per_split out of range");

    RandomForest rf;
    rf.n_features = data.n_features;
    rf.config = cfg;
    {
        std::vector<bool> seen(256, false);
        for (uint8_t l : data.labels) seen[l] = true;
        for (int c = 0; c < 256; ++c)
            if (seen[c]) rf.classes.push_back(static_cast<uint8_t>(c));
    }
    const int n_classes = rf.class_count();
    detail::require(n_classes >= 2, "train_rf: need at least two classes in the training set");
    std::vector<int> class_of(256, -1);
    for (int c = 0; c < n_classes; ++c) class_of[rf.classes[c]] = c;

    const size_t n = data.size();
    rf.trees.resize(cfg.n_trees);
    // oob_pred[t][i]: class index predicted by tree t for sample i, or -1 if
    // sample i was in tree t's bootstrap bag.
    std::vector<std::vector<int16_t>> oob_pred(cfg.n_trees);

    parallel_for(static_cast<size_t>(cfg.n_trees), [&](size_t t) {
        CounterRng rng(cfg.seed, t);
        std::vector<uint32_t> bag(n);
        std::vector<bool> in_bag(n, false);
        for (size_t i = 0; i < n; ++i) {
            uint32_t s = static_cast<uint32_t>(rng.next_index(n));
            bag[i] = s;
            in_bag[s] = true;
        }
        rf.trees[t] = forestdetail::build_tree(data, cfg, class_of, n_classes, bag, rng);
        std::vector<int16_t>& preds = oob_pred[t];
        preds.assign(n, -1);
        for (size_t i = 0; i < n; ++i)
            if (!in_bag[i])
                preds[i] = static_cast<int16_t>(forestdetail::tree_predict(rf.trees[t],
                                                                           data.row(i)));
    });

    size_t voted = 0, correct = 0;
    std::vector<uint32_t> votes(n_classes);
    for (size_t i = 0; i < n; ++i) {
        std::fill(votes.begin(), votes.end(), 0);
        bool any = false;
        for (int t = 0; t < cfg.n_trees; ++t)
            if (oob_pred[t][i] >= 0) {
                ++votes[oob_pred[t][i]];
                any = true;
            }
        if (!any) continue;
        ++voted;
        int best = 0;
        for (int c = 1; c < n_classes; ++c)
            if (votes[c] > votes[best]) best = c;
        if (rf.classes[best] == data.labels[i]) ++correct;
    }
    rf.oob_accuracy = voted > 0 ? static_cast<double>(correct) / voted : 0.0;
    return rf;
}

/// Per-class vote fractions (model class order); rows sum to 1.
inline std::vector<double> predict_proba(const RandomForest& rf, const float* features) {
    std::vector<double> proba(rf.class_count(), 0.0);
    for (const DecisionTree& tree : rf.trees)
        proba[forestdetail::tree_predict(tree, features)] += 1.0;
    for (double& p : proba) p /= static_cast<double>(rf.trees.size());
    return proba;
}

/// Majority-vote class code; ties break toward the lowest class code.
inline uint8_t predict(const RandomForest& rf, const float* features) {
    std::vector<double> proba = predict_proba(rf, features);
    int best = 0;
    for (int c = 1; c < rf.class_count(); ++c)
        if (proba[c] > proba[best]) best = c;
    return rf.classes[best];
}

struct ClassEval {
    uint8_t class_code = 0;
    size_t support = 0;
    double recall = 0.0;
    std::optional<double> auc_score;  // absent if only one class present
    std::vector<RocPoint> roc;        // empty if AUC undefined
};

struct EvalReport {
    size_t n_samples = 0;
    size_t n_evaluated = 0;     // samples whose true class the model knows
    double overall_accuracy = 0.0; // over evaluated samples (support-weighted)
    std::vector<ClassEval> per_class;
    std::vector<std::vector<size_t>> confusion; // [true][predicted], model class order
    std::vector<std::string> warnings;
};

/// Scores a forest on a labeled dataset: per-class recall and one-vs-rest
/// ROC/AUC, a confusion matrix, and support-weighted overall accuracy.
/// Samples of classes unseen at training are excluded (with a warning).
inline EvalReport evaluate(const RandomForest& rf, const PixelDataset& test) {
    test.validate();
    detail::require(test.n_features == rf.n_features,
                    "evaluate: feature count differs from the trained model");
    const int n_classes = rf.class_count();
    std::vector<int> class_of(256, -1);
    for (int c = 0; c < n_classes; ++c) class_of[rf.classes[c]] = c;

    EvalReport report;
    report.n_samples = test.size();
    report.confusion.assign(n_classes, std::vector<size_t>(n_classes, 0));

    std::vector<int> true_idx(test.size());
    std::vector<int> pred_idx(test.size());
    std::vector<double> probas(test.size() * n_classes);
    parallel_for(test.size(), [&](size_t i) {
        true_idx[i] = class_of[test.labels[i]];
        std::vector<double> p = predict_proba(rf, test.row(i));
        std::copy(p.begin(), p.end(), probas.begin() + i * n_classes);
        int best = 0;
        for (int c = 1; c < n_classes; ++c)
            if (p[c] > p[best]) best = c;
        pred_idx[i] = best;
    });

    std::vector<bool> unseen_warned(256, false);
    size_t correct = 0;
    for (size_t i = 0; i < test.size(); ++i) {
        if (true_idx[i] < 0) {
            if (!unseen_warned[test.labels[i]]) {
                unseen_warned[test.labels[i]] = true;
                report.warnings.push_back(
                    "class " + std::to_string(static_cast<int>(test.labels[i])) +
                    " absent from training; its samples are excluded from accuracy");
            }
            continue;
        }
        ++report.n_evaluated;
        ++report.confusion[true_idx[i]][pred_idx[i]];
        if (pred_idx[i] == true_idx[i]) ++correct;
    }
    detail::require(report.n_evaluated > 0, "evaluate: no test samples of known classes");
    report.overall_accuracy = static_cast<double>(correct) / report.n_evaluated;

    for (int c = 0; c < n_classes; ++c) {
        ClassEval ce;
        ce.class_code = rf.classes[c];
        size_t tp = 0;
        std::vector<double> scores;
        std::vector<uint8_t> binary;
        scores.reserve(report.n_evaluated);
        binary.reserve(report.n_evaluated);
        for (size_t i = 0; i < test.size(); ++i) {
            if (true_idx[i] < 0) continue;
            bool is_c = (true_idx[i] == c);
            ce.support += is_c;
            tp += (is_c && pred_idx[i] == c);
            scores.push_back(probas[i * n_classes + c]);
            binary.push_back(is_c ? 1 : 0);
        }
        if (ce.support == 0) {
            report.warnings.push_back("class " + std::to_string(static_cast<int>(ce.class_code)) +
                                      " has no test samples; recall/AUC undefined");
            report.per_class.push_back(std::move(ce));
            continue;
        }
        ce.recall = static_cast<double>(tp) / ce.support;
        if (ce.support < report.n_evaluated) { // both classes present for one-vs-rest
            ce.roc = roc_curve(scores, binary);
            ce.auc_score = auc(ce.roc);
        } else {
            report.warnings.push_back("class " + std::to_string(static_cast<int>(ce.class_code)) +
                                      " is the only class in the test set; AUC undefined");
        }
        report.per_class.push_back(std::move(ce));
    }
    return report;
}

/// Labels every pixel of a cube with the forest's prediction. The cube's
/// band count must equal the model's feature count, in the same band order
/// used at training.
inline LabelMap classify_cube(const RandomForest& rf, const HyperCube& cube) {
    cube.validate();
    detail::require(static_cast<int>(cube.bands.size()) == rf.n_features,
                    "classify_cube: band count differs from the trained model");
    LabelMap out = LabelMap::make(cube.width(), cube.height());
    const size_t n_px = out.size();
    parallel_for(static_cast<size_t>(cube.height()), [&](size_t y) {
        std::vector<float> row(rf.n_features);
        for (int x = 0; x < out.width; ++x) {
            size_t px = y * out.width + x;
            for (int b = 0; b < rf.n_features; ++b) row[b] = cube.bands[b].pixels[px];
            out.labels[px] = predict(rf, row.data());
        }
    });
    (void)n_px;
    return out;
}

// --- model (de)serialization -------------------------------------------------

inline nlohmann::json forest_to_json(const RandomForest& rf) {
    nlohmann::json j;
    j["format"] = "hsfuse-random-forest";
    j["version"] = 1;
    j["n_features"] = rf.n_features;
    j["classes"] = rf.classes;
    j["config"] = {{"n_trees", rf.config.n_trees},
                   {"max_depth", rf.config.max_depth},
                   {"min_samples_split", rf.config.min_samples_split},
                   {"features_per_split", rf.config.features_per_split},
                   {"seed", rf.config.seed}};
    j["oob_accuracy"] = rf.oob_accuracy;
    nlohmann::json trees = nlohmann::json::array();
    for (const DecisionTree& tree : rf.trees) {
        nlohmann::json t;
        std::vector<int32_t> feature, left, right;
        std::vector<double> threshold;
        nlohmann::json counts = nlohmann::json::array();
        for (const TreeNode& node : tree.nodes) {
            feature.push_back(node.feature);
            threshold.push_back(node.threshold);
            left.push_back(node.left);
            right.push_back(node.right);
            counts.push_back(node.counts);
        }
        t["feature"] = feature;
        t["threshold"] = threshold;
        t["left"] = left;
        t["right"] = right;
        t["leaf_counts"] = counts;
        trees.push_back(std::move(t));
    }
    j["trees"] = std::move(trees);
    return j;
}

inline RandomForest forest_from_json(const nlohmann::json& j) {
    detail::require(j.is_object() && j.value("format", "") == "hsfuse-random-forest",
                    "forest model: unrecognized format");
    detail::require(j.value("version", 0) == 1, "forest model: unsupported version");
    RandomForest rf;
    rf.n_features = j.at("n_features").get<int>();
    rf.classes = j.at("classes").get<std::vector<uint8_t>>();
    const nlohmann::json& c = j.at("config");
    rf.config.n_trees = c.at("n_trees").get<int>();
    rf.config.max_depth = c.at("max_depth").get<int>();
    rf.config.min_samples_split = c.at("min_samples_split").get<int>();
    rf.config.features_per_split = c.at("features_per_split").get<int>();
    rf.config.seed = c.at("seed").get<uint64_t>();
    rf.oob_accuracy = j.at("oob_accuracy").get<double>();
    detail::require(rf.n_features > 0 && rf.classes.size() >= 2, "forest model: degenerate header");

    for (const nlohmann::json& t : j.at("trees")) {
        DecisionTree tree;
        auto feature = t.at("feature").get<std::vector<int32_t>>();
        auto threshold = t.at("threshold").get<std::vector<double>>();
        auto left = t.at("left").get<std::vector<int32_t>>();
        auto right = t.at("right").get<std::vector<int32_t>>();
        const nlohmann::json& counts = t.at("leaf_counts");
        size_t n = feature.size();
        detail::require(threshold.size() == n && left.size() == n && right.size() == n &&
                            counts.size() == n && n > 0,
                        "forest model: inconsistent tree arrays");
        for (size_t i = 0; i < n; ++i) {
            TreeNode node;
            node.feature = feature[i];
            node.threshold = threshold[i];
            node.left = left[i];
            node.right = right[i];
            node.counts = counts[i].get<std::vector<uint32_t>>();
            detail::require(node.feature >= -1 && node.feature < rf.n_features,
                            "forest model: feature index out of range");
            if (node.feature >= 0) {
                detail::require(node.left > 0 && node.right > 0 &&
                                    node.left < static_cast<int32_t>(n) &&
                                    node.right < static_cast<int32_t>(n),
                                "forest model: child index out of range");
            } else {
                detail::require(node.counts.size() == rf.classes.size(),
                                "forest model: leaf counts do not match class count");
            }
            tree.nodes.push_back(std::move(node));
        }
        rf.trees.push_back(std::move(tree));
    }
    detail::require(static_cast<int>(rf.trees.size()) == rf.config.n_trees,
                    "forest model: tree count does not match config");
    return rf;
}

inline void save_forest(const RandomForest& rf, const std::filesystem::path& path) {
    std::string text = forest_to_json(rf).dump(2);
    text.push_back('\n');
    iodetail::write_file(path, text.data(), text.size());
}

inline RandomForest load_forest(const std::filesystem::path& path) {
    return forest_from_json(iodetail::parse_json_file(path));
}

} // namespace hsfuse
