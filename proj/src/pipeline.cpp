#include "dqd/pipeline.hpp"

#include "dqd/errors.hpp"

#include <stdexcept>

namespace dqd {

namespace {

std::vector<int> labels_of(const std::vector<ProcessedPair>& pairs) {
    std::vector<int> labels;
    labels.reserve(pairs.size());
    for (const auto& p : pairs) labels.push_back(p.label);
    return labels;
}

std::vector<int> labels_of(const std::vector<EncodedPair>& pairs) {
    std::vector<int> labels;
    labels.reserve(pairs.size());
    for (const auto& p : pairs) labels.push_back(p.label);
    return labels;
}

std::map<std::string, std::string> gbt_config_echo(const GbtParams& p,
                                                   std::uint64_t split_seed,
                                                   bool use_graph) {
    return {
        {"catalog", kCatalogVersion},
        {"rounds", std::to_string(p.rounds)},
        {"learning_rate", std::to_string(p.learning_rate)},
        {"max_depth", std::to_string(p.max_depth)},
        {"min_child_weight", std::to_string(p.min_child_weight)},
        {"lambda", std::to_string(p.lambda)},
        {"gamma", std::to_string(p.gamma)},
        {"colsample", std::to_string(p.colsample)},
        {"seed", std::to_string(p.seed)},
        {"split_seed", std::to_string(split_seed)},
        {"graph_features", use_graph ? "on" : "off"},
    };
}

std::map<std::string, std::string> snn_config_echo(const SnnSpec& s, const TrainConfig& c,
                                                   std::uint64_t split_seed) {
    return {
        {"encoder", encoder_name(s.encoder)},
        {"aggregation", aggregation_name(s.aggregation)},
        {"max_len", std::to_string(s.max_len)},
        {"embed_dim", std::to_string(s.embed_dim)},
        {"hidden_dim", std::to_string(s.hidden_dim)},
        {"epochs", std::to_string(c.epochs)},
        {"batch_size", std::to_string(c.batch_size)},
        {"learning_rate", std::to_string(c.learning_rate)},
        {"patience", std::to_string(c.patience)},
        {"seed", std::to_string(c.seed)},
        {"split_seed", std::to_string(split_seed)},
    };
}

}  // namespace

SplitContexts build_contexts(const DatasetSplit& split) {
    SplitContexts ctx;
    ctx.idf = build_idf(split.train);
    std::vector<ProcessedPair> all = split.train;
    all.insert(all.end(), split.validation.begin(), split.validation.end());
    all.insert(all.end(), split.test.begin(), split.test.end());
    ctx.graph = build_pair_graph(all);
    return ctx;
}

GbtRun train_eval_gbt(const std::string& dataset_id, const DatasetSplit& split,
                      const EmbeddingTable& table, const GbtParams& params,
                      bool use_graph, bool parallel) {
    SplitContexts ctx = build_contexts(split);
    FeatureContext fctx{&ctx.idf, &table, use_graph ? &ctx.graph : nullptr};

    FeatureMatrix train = featurize_corpus(split.train, fctx, parallel);
    FeatureMatrix val = featurize_corpus(split.validation, fctx, parallel);
    FeatureMatrix test = featurize_corpus(split.test, fctx, parallel);

    GbtTrainOptions options;
    options.parallel = parallel;
    if (params.early_stopping_patience > 0 && !val.rows.empty()) {
        options.validation = &val;
    }

    GbtRun run;
    run.model = train_gbt(train, params, options);
    run.report.model_kind = "gbt";
    run.report.dataset = dataset_id;
    run.report.train_size = split.train.size();
    run.report.validation_size = split.validation.size();
    run.report.test_size = split.test.size();
    run.report.auc = auc(predict_gbt_batch(run.model, test), test.labels);
    run.report.config = gbt_config_echo(params, split.seed, use_graph);
    return run;
}

EvalReport evaluate_gbt(const TreeEnsemble& model, const std::string& dataset_id,
                        const DatasetSplit& split, const EmbeddingTable& table,
                        bool use_graph) {
    if (model.catalog_version != kCatalogVersion) {
        throw DataError("evaluate: feature catalog version mismatch");
    }
    SplitContexts ctx = build_contexts(split);
    FeatureContext fctx{&ctx.idf, &table, use_graph ? &ctx.graph : nullptr};
    FeatureMatrix test = featurize_corpus(split.test, fctx);

    EvalReport report;
    report.model_kind = "gbt";
    report.dataset = dataset_id;
    report.train_size = split.train.size();
    report.validation_size = split.validation.size();
    report.test_size = split.test.size();
    report.auc = auc(predict_gbt_batch(model, test), test.labels);
    report.config = gbt_config_echo(model.params, split.seed, use_graph);
    return report;
}

namespace {

std::vector<EncodedPair> encode_all(const Vocab& vocab,
                                    const std::vector<ProcessedPair>& pairs,
                                    std::size_t max_len) {
    std::vector<EncodedPair> out;
    out.reserve(pairs.size());
    for (const auto& p : pairs) out.push_back(encode_pair(vocab, p, max_len));
    return out;
}

}  // namespace

SnnRun train_eval_snn(const std::string& dataset_id, const DatasetSplit& split,
                      const EmbeddingTable& table, SnnSpec spec, TrainConfig config) {
    SnnRun run;
    run.vocab = build_vocab(split.train, 1);
    spec.vocab_size = run.vocab.size();
    spec.seed = config.seed;

    auto train = encode_all(run.vocab, split.train, spec.max_len);
    auto val = encode_all(run.vocab, split.validation, spec.max_len);
    auto test = encode_all(run.vocab, split.test, spec.max_len);

    TrainResult result = train_snn(spec, train, val, config, &run.vocab, &table);
    run.model.spec = spec;
    run.model.params = result.params;
    run.history = result.history;

    run.report.model_kind = "snn";
    run.report.dataset = dataset_id;
    run.report.train_size = split.train.size();
    run.report.validation_size = split.validation.size();
    run.report.test_size = split.test.size();
    run.report.auc = auc(predict_snn(run.model, test), labels_of(test));
    run.report.config = snn_config_echo(spec, config, split.seed);
    return run;
}

EvalReport evaluate_snn(const SnnModel& model, const Vocab& vocab,
                        const std::string& dataset_id, const DatasetSplit& split) {
    auto test = encode_all(vocab, split.test, model.spec.max_len);
    EvalReport report;
    report.model_kind = "snn";
    report.dataset = dataset_id;
    report.train_size = split.train.size();
    report.validation_size = split.validation.size();
    report.test_size = split.test.size();
    report.auc = auc(predict_snn(model, test), labels_of(test));
    report.config = {{"encoder", encoder_name(model.spec.encoder)},
                     {"aggregation", aggregation_name(model.spec.aggregation)},
                     {"seed", std::to_string(model.spec.seed)},
                     {"split_seed", std::to_string(split.seed)}};
    return report;
}

std::vector<EvalReport> run_combined_baseline_gbt(const std::vector<CombinedInput>& inputs,
                                                  const EmbeddingTable& table,
                                                  const GbtParams& params) {
    if (inputs.empty()) throw std::runtime_error("combined baseline: no datasets");
    for (const auto& in : inputs) {
        if (in.split.train.empty() || in.split.test.empty()) {
            throw std::runtime_error("combined baseline: dataset " + in.dataset_id +
                                     " has an empty split");
        }
    }

    // One pooled training context; per-dataset graphs would leak nothing
    // extra since the graph is label-blind, so pool those too.
    DatasetSplit pooled;
    for (const auto& in : inputs) {
        pooled.train.insert(pooled.train.end(), in.split.train.begin(), in.split.train.end());
        pooled.validation.insert(pooled.validation.end(), in.split.validation.begin(),
                                 in.split.validation.end());
        pooled.test.insert(pooled.test.end(), in.split.test.begin(), in.split.test.end());
    }
    SplitContexts ctx = build_contexts(pooled);
    FeatureContext fctx{&ctx.idf, &table, &ctx.graph};

    FeatureMatrix train = featurize_corpus(pooled.train, fctx);
    FeatureMatrix val = featurize_corpus(pooled.validation, fctx);
    GbtTrainOptions options;
    if (params.early_stopping_patience > 0 && !val.rows.empty()) options.validation = &val;
    TreeEnsemble model = train_gbt(train, params, options);

    std::vector<EvalReport> reports;
    for (const auto& in : inputs) {
        FeatureMatrix test = featurize_corpus(in.split.test, fctx);
        EvalReport r;
        r.model_kind = "combined";
        r.dataset = in.dataset_id;
        r.train_size = pooled.train.size();
        r.validation_size = pooled.validation.size();
        r.test_size = in.split.test.size();
        r.auc = auc(predict_gbt_batch(model, test), test.labels);
        r.config = gbt_config_echo(params, in.split.seed, true);
        r.config["base_model"] = "gbt";
        reports.push_back(std::move(r));
    }
    return reports;
}

std::vector<EvalReport> run_combined_baseline_snn(const std::vector<CombinedInput>& inputs,
                                                  const EmbeddingTable& table,
                                                  SnnSpec spec, TrainConfig config) {
    if (inputs.empty()) throw std::runtime_error("combined baseline: no datasets");
    std::vector<ProcessedPair> pooled_train, pooled_val;
    for (const auto& in : inputs) {
        if (in.split.train.empty() || in.split.test.empty()) {
            throw std::runtime_error("combined baseline: dataset " + in.dataset_id +
                                     " has an empty split");
        }
        pooled_train.insert(pooled_train.end(), in.split.train.begin(), in.split.train.end());
        pooled_val.insert(pooled_val.end(), in.split.validation.begin(),
                          in.split.validation.end());
    }

    DatasetSplit pooled;
    pooled.train = pooled_train;
    Vocab vocab = build_vocab(pooled_train, 1);
    spec.vocab_size = vocab.size();
    spec.seed = config.seed;

    auto train = encode_all(vocab, pooled_train, spec.max_len);
    auto val = encode_all(vocab, pooled_val, spec.max_len);
    TrainResult result = train_snn(spec, train, val, config, &vocab, &table);
    SnnModel model{spec, result.params};

    std::vector<EvalReport> reports;
    for (const auto& in : inputs) {
        auto test = encode_all(vocab, in.split.test, spec.max_len);
        EvalReport r;
        r.model_kind = "combined";
        r.dataset = in.dataset_id;
        r.train_size = pooled_train.size();
        r.validation_size = pooled_val.size();
        r.test_size = in.split.test.size();
        r.auc = auc(predict_snn(model, test), labels_of(test));
        r.config = snn_config_echo(spec, config, in.split.seed);
        r.config["base_model"] = "snn";
        reports.push_back(std::move(r));
    }
    return reports;
}

}  // namespace dqd
