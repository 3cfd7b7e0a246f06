#include "dqd/gbt.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "dqd/eval.hpp"
#include "dqd/rng.hpp"

namespace dqd {

namespace {

double sigmoid(double x) {
    return 1.0 / (1.0 + std::exp(-x));
}

std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

std::pair<double, double> grad_hess_logistic(double raw_score, int label) {
    double p = sigmoid(raw_score);
    return {p - static_cast<double>(label), p * (1.0 - p)};
}

double leaf_weight(double sum_g, double sum_h, const GbtParams& params) {
    return -sum_g / (sum_h + params.lambda);
}

std::optional<SplitResult> best_split_column(int feature_index,
                                             const std::vector<double>& values,
                                             const std::vector<double>& g,
                                             const std::vector<double>& h,
                                             const GbtParams& params) {
    std::size_t n = values.size();
    if (n < 2) return std::nullopt;

    double total_g = 0.0, total_h = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        total_g += g[i];
        total_h += h[i];
    }
    double parent = total_g * total_g / (total_h + params.lambda);

    SplitResult best;
    bool found = false;
    double gl = 0.0, hl = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        gl += g[i];
        hl += h[i];
        if (values[i] == values[i + 1]) continue;  // can only cut between distinct values
        double gr = total_g - gl;
        double hr = total_h - hl;
        if (hl < params.min_child_weight || hr < params.min_child_weight) continue;
        double gain = 0.5 * (gl * gl / (hl + params.lambda) +
                             gr * gr / (hr + params.lambda) - parent) -
                      params.gamma;
        if (gain > best.gain || !found) {
            if (gain <= 0.0) continue;
            best.feature_index = feature_index;
            best.threshold = values[i] + 0.5 * (values[i + 1] - values[i]);
            best.gain = gain;
            found = true;
        }
    }
    if (!found) return std::nullopt;
    return best;
}

double Tree::predict(const double* features) const {
    int idx = 0;
    for (;;) {
        const TreeNode& node = nodes[idx];
        if (node.is_leaf) return node.weight;
        double v = features[node.feature_index];
        bool go_left = std::isnan(v) ? node.default_left : v < node.threshold;
        idx = go_left ? node.left : node.right;
    }
}

double TreeEnsemble::raw_score(const double* features) const {
    double s = base_score;
    for (const auto& t : trees) s += t.predict(features);
    return s;
}

double TreeEnsemble::predict(const double* features) const {
    return sigmoid(raw_score(features));
}

namespace {

struct NodeTask {
    std::vector<std::int64_t> rows;
    int depth;
    int node_index;
};

class TreeBuilder {
public:
    TreeBuilder(const FeatureMatrix& data, const std::vector<double>& g,
                const std::vector<double>& h, const GbtParams& params,
                const std::vector<int>& feature_subset, bool parallel)
        : data_(data), g_(g), h_(h), params_(params),
          features_(feature_subset), parallel_(parallel) {}

    Tree build() {
        Tree tree;
        std::vector<std::int64_t> all(data_.rows.size());
        std::iota(all.begin(), all.end(), 0);
        tree.nodes.emplace_back();
        grow(tree, std::move(all), 0, 0);
        return tree;
    }

private:
    void grow(Tree& tree, std::vector<std::int64_t> rows, int depth, int node_index) {
        double sum_g = 0.0, sum_h = 0.0;
        for (auto r : rows) {
            sum_g += g_[r];
            sum_h += h_[r];
        }

        std::optional<SplitResult> split;
        if (depth < params_.max_depth && sum_h >= params_.min_child_weight) {
            split = search_split(rows);
        }
        if (!split) {
            tree.nodes[node_index].is_leaf = true;
            tree.nodes[node_index].weight =
                params_.learning_rate * leaf_weight(sum_g, sum_h, params_);
            return;
        }

        std::vector<std::int64_t> left_rows, right_rows;
        for (auto r : rows) {
            if (data_.rows[r][split->feature_index] < split->threshold) {
                left_rows.push_back(r);
            } else {
                right_rows.push_back(r);
            }
        }
        rows.clear();
        rows.shrink_to_fit();

        int left = static_cast<int>(tree.nodes.size());
        tree.nodes.emplace_back();
        int right = static_cast<int>(tree.nodes.size());
        tree.nodes.emplace_back();

        TreeNode& node = tree.nodes[node_index];
        node.is_leaf = false;
        node.feature_index = split->feature_index;
        node.threshold = split->threshold;
        node.gain = split->gain;
        node.default_left = true;
        node.left = left;
        node.right = right;

        grow(tree, std::move(left_rows), depth + 1, left);
        grow(tree, std::move(right_rows), depth + 1, right);
    }

    // Per-feature search may run on any thread; the winner is chosen by a
    // serial reduction with the (gain, feature index, threshold) tie rule,
    // so the result does not depend on scheduling.
    std::optional<SplitResult> search_split(const std::vector<std::int64_t>& rows) {
        std::size_t nf = features_.size();
        std::vector<std::optional<SplitResult>> results(nf);

        auto search_one = [&](std::size_t fi) {
            int f = features_[fi];
            std::vector<std::size_t> order(rows.size());
            std::iota(order.begin(), order.end(), 0);
            std::stable_sort(order.begin(), order.end(),
                             [&](std::size_t a, std::size_t b) {
                                 return data_.rows[rows[a]][f] < data_.rows[rows[b]][f];
                             });
            std::vector<double> values(rows.size()), gs(rows.size()), hs(rows.size());
            for (std::size_t i = 0; i < rows.size(); ++i) {
                auto r = rows[order[i]];
                values[i] = data_.rows[r][f];
                gs[i] = g_[r];
                hs[i] = h_[r];
            }
            results[fi] = best_split_column(f, values, gs, hs, params_);
        };

        if (parallel_) {
#ifdef DQD_HAVE_OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
            for (std::int64_t fi = 0; fi < static_cast<std::int64_t>(nf); ++fi) {
                search_one(static_cast<std::size_t>(fi));
            }
        } else {
            for (std::size_t fi = 0; fi < nf; ++fi) search_one(fi);
        }

        std::optional<SplitResult> best;
        for (const auto& r : results) {
            if (!r) continue;
            if (!best || r->gain > best->gain ||
                (r->gain == best->gain &&
                 (r->feature_index < best->feature_index ||
                  (r->feature_index == best->feature_index &&
                   r->threshold < best->threshold)))) {
                best = r;
            }
        }
        return best;
    }

    const FeatureMatrix& data_;
    const std::vector<double>& g_;
    const std::vector<double>& h_;
    const GbtParams& params_;
    const std::vector<int>& features_;
    bool parallel_;
};

double mean_logloss(const std::vector<double>& raw, const std::vector<int>& labels) {
    constexpr double eps = 1e-15;
    double total = 0.0;
    for (std::size_t i = 0; i < raw.size(); ++i) {
        double p = std::clamp(sigmoid(raw[i]), eps, 1.0 - eps);
        total += labels[i] ? -std::log(p) : -std::log(1.0 - p);
    }
    return total / static_cast<double>(raw.size());
}

}  // namespace

TreeEnsemble train_gbt(const FeatureMatrix& data, const GbtParams& params,
                       const GbtTrainOptions& options) {
    if (data.rows.empty()) throw std::runtime_error("train_gbt: empty dataset");
    if (data.rows.size() != data.labels.size()) {
        throw std::runtime_error("train_gbt: row/label count mismatch");
    }
    for (const auto& row : data.rows) {
        for (double v : row) {
            if (!std::isfinite(v)) throw std::runtime_error("train_gbt: non-finite feature");
        }
    }

    TreeEnsemble model;
    model.params = params;

    std::size_t positives = 0;
    for (int y : data.labels) positives += y;
    double prevalence = static_cast<double>(positives) / static_cast<double>(data.labels.size());
    double clamped = std::clamp(prevalence, 1e-6, 1.0 - 1e-6);
    model.base_score = std::log(clamped / (1.0 - clamped));

    if (positives == 0 || positives == data.labels.size()) {
        // Single-class data: prevalence prior only.
        return model;
    }

    std::size_t nf = kFeatureCount;
    std::size_t subset_size = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::llround(params.colsample * static_cast<double>(nf))));
    Rng col_rng(derive_seed(params.seed, "gbt.colsample"));

    std::vector<double> raw(data.rows.size(), model.base_score);
    std::vector<double> g(data.rows.size()), h(data.rows.size());

    double best_val_auc = -1.0;
    int best_round = -1;
    int since_best = 0;

    for (int round = 0; round < params.rounds; ++round) {
        for (std::size_t i = 0; i < data.rows.size(); ++i) {
            auto [gi, hi] = grad_hess_logistic(raw[i], data.labels[i]);
            g[i] = gi;
            h[i] = hi;
        }

        std::vector<int> all_features(nf);
        std::iota(all_features.begin(), all_features.end(), 0);
        col_rng.shuffle(all_features);
        std::vector<int> subset(all_features.begin(), all_features.begin() + subset_size);
        std::sort(subset.begin(), subset.end());

        TreeBuilder builder(data, g, h, params, subset, options.parallel);
        Tree tree = builder.build();

        for (std::size_t i = 0; i < data.rows.size(); ++i) {
            raw[i] += tree.predict(data.rows[i].data());
        }
        model.trees.push_back(std::move(tree));
        model.train_logloss.push_back(mean_logloss(raw, data.labels));

        if (options.validation && params.early_stopping_patience > 0) {
            std::vector<double> val_scores = predict_gbt_batch(model, *options.validation);
            double val_auc = auc(val_scores, options.validation->labels);
            if (val_auc > best_val_auc) {
                best_val_auc = val_auc;
                best_round = round;
                since_best = 0;
            } else if (++since_best >= params.early_stopping_patience) {
                break;
            }
        }
    }

    if (best_round >= 0) {
        model.trees.resize(static_cast<std::size_t>(best_round) + 1);
        model.train_logloss.resize(static_cast<std::size_t>(best_round) + 1);
    }
    return model;
}

double predict_gbt(const TreeEnsemble& ensemble, const FeatureVector& features) {
    if (ensemble.catalog_version != kCatalogVersion) {
        throw std::runtime_error("feature catalog version mismatch: model has " +
                                 ensemble.catalog_version);
    }
    return ensemble.predict(features.data());
}

std::vector<double> predict_gbt_batch(const TreeEnsemble& ensemble,
                                      const FeatureMatrix& data, bool parallel) {
    std::vector<double> out(data.rows.size());
    const auto n = static_cast<std::int64_t>(data.rows.size());
    if (parallel) {
#ifdef DQD_HAVE_OPENMP
#pragma omp parallel for schedule(static)
#endif
        for (std::int64_t i = 0; i < n; ++i) {
            out[i] = ensemble.predict(data.rows[i].data());
        }
    } else {
        for (std::int64_t i = 0; i < n; ++i) {
            out[i] = ensemble.predict(data.rows[i].data());
        }
    }
    return out;
}

std::map<std::string, double> feature_importance(const TreeEnsemble& ensemble) {
    std::map<std::string, double> importance;
    const auto& catalog = feature_catalog();
    for (const auto& tree : ensemble.trees) {
        for (const auto& node : tree.nodes) {
            if (!node.is_leaf) {
                importance[catalog[node.feature_index].name] += node.gain;
            }
        }
    }
    return importance;
}

void save_gbt(const std::string& path, const TreeEnsemble& ensemble) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write model file: " + path);
    const auto& p = ensemble.params;
    out << "dqd-gbt-v1\n";
    out << "catalog " << ensemble.catalog_version << "\n";
    out << "params " << p.rounds << " " << fmt17(p.learning_rate) << " " << p.max_depth
        << " " << fmt17(p.min_child_weight) << " " << fmt17(p.lambda) << " "
        << fmt17(p.gamma) << " " << fmt17(p.colsample) << " " << p.seed << " "
        << p.early_stopping_patience << "\n";
    out << "base_score " << fmt17(ensemble.base_score) << "\n";
    out << "trees " << ensemble.trees.size() << "\n";
    for (const auto& tree : ensemble.trees) {
        out << "tree " << tree.nodes.size() << "\n";
        for (const auto& n : tree.nodes) {
            if (n.is_leaf) {
                out << "leaf " << fmt17(n.weight) << "\n";
            } else {
                out << "split " << n.feature_index << " " << fmt17(n.threshold) << " "
                    << fmt17(n.gain) << " " << (n.default_left ? 1 : 0) << " " << n.left
                    << " " << n.right << "\n";
            }
        }
    }
}

TreeEnsemble load_gbt(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open model file: " + path);
    std::string tag;
    in >> tag;
    if (tag != "dqd-gbt-v1") throw std::runtime_error("bad model file magic");

    TreeEnsemble model;
    std::string key;
    in >> key >> model.catalog_version;
    if (key != "catalog") throw std::runtime_error("bad model file: expected catalog");
    if (model.catalog_version != kCatalogVersion) {
        throw std::runtime_error("feature catalog version mismatch: model has " +
                                 model.catalog_version);
    }
    auto& p = model.params;
    int default_left;
    in >> key >> p.rounds >> p.learning_rate >> p.max_depth >> p.min_child_weight >>
        p.lambda >> p.gamma >> p.colsample >> p.seed >> p.early_stopping_patience;
    if (key != "params") throw std::runtime_error("bad model file: expected params");
    in >> key >> model.base_score;
    if (key != "base_score") throw std::runtime_error("bad model file: expected base_score");
    std::size_t num_trees;
    in >> key >> num_trees;
    if (key != "trees") throw std::runtime_error("bad model file: expected trees");
    for (std::size_t t = 0; t < num_trees; ++t) {
        std::size_t num_nodes;
        in >> key >> num_nodes;
        if (key != "tree") throw std::runtime_error("bad model file: expected tree");
        Tree tree;
        for (std::size_t i = 0; i < num_nodes; ++i) {
            TreeNode node;
            in >> key;
            if (key == "leaf") {
                in >> node.weight;
            } else if (key == "split") {
                node.is_leaf = false;
                in >> node.feature_index >> node.threshold >> node.gain >> default_left >>
                    node.left >> node.right;
                node.default_left = default_left != 0;
            } else {
                throw std::runtime_error("bad model file: unknown node kind " + key);
            }
            tree.nodes.push_back(node);
        }
        model.trees.push_back(std::move(tree));
    }
    if (!in) throw std::runtime_error("truncated model file: " + path);
    return model;
}

}  // namespace dqd
