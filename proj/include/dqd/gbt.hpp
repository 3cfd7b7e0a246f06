#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dqd/features.hpp"

namespace dqd {

struct GbtParams {
    int rounds = 200;
    double learning_rate = 0.1;
    int max_depth = 6;
    double min_child_weight = 1.0;
    double lambda = 1.0;   // L2 on leaf weights
    double gamma = 0.0;    // split penalty
    double colsample = 0.8;
    std::uint64_t seed = 0;
    int early_stopping_patience = 0;  // 0 disables, needs a validation set
};

struct TreeNode {
    bool is_leaf = true;
    double weight = 0.0;       // leaf value, learning rate baked in
    int feature_index = -1;
    double threshold = 0.0;
    double gain = 0.0;         // split gain, kept for feature importance
    bool default_left = true;  // routing for missing (NaN) values
    int left = -1;             // child indices into Tree::nodes
    int right = -1;
};

struct Tree {
    std::vector<TreeNode> nodes;  // pre-order, root at 0

    double predict(const double* features) const;
};

struct TreeEnsemble {
    std::string catalog_version = kCatalogVersion;
    GbtParams params;
    double base_score = 0.0;  // log-odds
    std::vector<Tree> trees;
    std::vector<double> train_logloss;  // per round

    double raw_score(const double* features) const;
    double predict(const double* features) const;  // probability
};

// g = p - y, h = p (1 - p), p = sigmoid(raw).
std::pair<double, double> grad_hess_logistic(double raw_score, int label);

double leaf_weight(double sum_g, double sum_h, const GbtParams& params);

struct SplitResult {
    int feature_index = -1;
    double threshold = 0.0;
    double gain = 0.0;
};

// Exact greedy split over one pre-sorted column. `values`, `g`, `h` are
// parallel and sorted by value ascending.
std::optional<SplitResult> best_split_column(int feature_index,
                                             const std::vector<double>& values,
                                             const std::vector<double>& g,
                                             const std::vector<double>& h,
                                             const GbtParams& params);

struct GbtTrainOptions {
    bool parallel = true;  // per-feature split search across threads
    const FeatureMatrix* validation = nullptr;
};

TreeEnsemble train_gbt(const FeatureMatrix& data, const GbtParams& params,
                       const GbtTrainOptions& options = {});

double predict_gbt(const TreeEnsemble& ensemble, const FeatureVector& features);

std::vector<double> predict_gbt_batch(const TreeEnsemble& ensemble,
                                      const FeatureMatrix& data,
                                      bool parallel = true);

// Total gain per feature name, summed over all splits.
std::map<std::string, double> feature_importance(const TreeEnsemble& ensemble);

// Versioned text serialization, 17 significant digits, bit-exact round-trip.
void save_gbt(const std::string& path, const TreeEnsemble& ensemble);
TreeEnsemble load_gbt(const std::string& path);

}  // namespace dqd
