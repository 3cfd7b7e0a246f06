#include "dqd/transfer.hpp"

#include <fstream>
#include <stdexcept>

#include "dqd/eval.hpp"
#include "dqd/rng.hpp"
#include "json.hpp"

namespace dqd {

using nlohmann::json;

std::string init_state_name(InitState s) {
    switch (s) {
        case InitState::I1: return "I1";
        case InitState::I2: return "I2";
        case InitState::I3: return "I3";
    }
    return "?";
}

std::string TlConfig::name() const {
    const char* groups = "ERAD";
    std::string out;
    for (int g = 0; g < 4; ++g) {
        if (g) out += ',';
        out += groups[g];
        out += '(';
        out += init_state_name(states[g]);
        out += ')';
    }
    return out;
}

std::vector<TlConfig> enumerate_configs(SweepMode mode) {
    using S = InitState;
    if (mode == SweepMode::Curated) {
        return {
            TlConfig{{S::I3, S::I3, S::I3, S::I3}},  // target-only baseline
            TlConfig{{S::I2, S::I3, S::I3, S::I3}},
            TlConfig{{S::I2, S::I2, S::I3, S::I3}},
            TlConfig{{S::I2, S::I2, S::I2, S::I2}},
            TlConfig{{S::I2, S::I2, S::I2, S::I3}},
            TlConfig{{S::I1, S::I2, S::I3, S::I3}},
        };
    }
    std::vector<TlConfig> configs;
    for (int e = 0; e < 3; ++e) {
        for (int r = 0; r < 3; ++r) {
            for (int a = 0; a < 3; ++a) {
                for (int d = 0; d < 3; ++d) {
                    configs.push_back(TlConfig{{static_cast<S>(e), static_cast<S>(r),
                                                static_cast<S>(a), static_cast<S>(d)}});
                }
            }
        }
    }
    return configs;
}

namespace {

// Embedding rows transfer by token name; rows for tokens the source has
// never seen keep their fresh seeded draw.
void copy_embedding(ParamArray& target, const ParamArray& source,
                    const Vocab* source_vocab, const Vocab* target_vocab,
                    std::size_t embed_dim) {
    if (!source_vocab || !target_vocab) {
        if (source.data.size() != target.data.size()) {
            throw std::runtime_error(
                "embedding shape mismatch and no vocabularies given for row mapping");
        }
        target.data = source.data;
        return;
    }
    for (std::size_t i = 0; i < target_vocab->tokens.size(); ++i) {
        auto it = source_vocab->index.find(target_vocab->tokens[i]);
        if (it == source_vocab->index.end()) continue;
        std::size_t src_row = it->second;
        std::size_t dst_row = i + 2;
        for (std::size_t d = 0; d < embed_dim; ++d) {
            target.data[dst_row * embed_dim + d] = source.data[src_row * embed_dim + d];
        }
    }
    // OOV row (index 1) carries over as well; padding stays zero.
    for (std::size_t d = 0; d < embed_dim; ++d) {
        target.data[embed_dim + d] = source.data[embed_dim + d];
    }
}

}  // namespace

ParameterStore apply_init_config(const ParameterStore& source_params,
                                 const SnnSpec& target_spec,
                                 const TlConfig& config,
                                 std::uint64_t seed,
                                 const Vocab* source_vocab,
                                 const Vocab* target_vocab,
                                 const EmbeddingTable* table) {
    SnnSpec seeded_spec = target_spec;
    seeded_spec.seed = seed;
    ParameterStore target = init_params(seeded_spec, target_vocab, table);

    for (auto& a : target.arrays) {
        InitState state = config.state_of(a.group);
        if (state == InitState::I3) continue;  // fresh seeded draw already in place
        if (a.name == "E.embedding") {
            copy_embedding(a, source_params.at(a.name), source_vocab, target_vocab,
                           target_spec.embed_dim);
            continue;
        }
        const ParamArray& src = source_params.at(a.name);
        if (src.shape != a.shape) {
            throw std::runtime_error("transfer shape mismatch in group " +
                                     group_name(a.group) + ", array " + a.name);
        }
        a.data = src.data;
    }

    for (int g = 0; g < 4; ++g) {
        target.frozen[g] = config.states[g] == InitState::I1;
    }
    return target;
}

TransferExperiment run_transfer_experiment(const SnnModel& source_model,
                                           const std::vector<EncodedPair>& target_train,
                                           const std::vector<EncodedPair>& target_val,
                                           const std::vector<EncodedPair>& target_test,
                                           const std::string& target_dataset,
                                           const std::vector<TlConfig>& configs,
                                           const TrainConfig& train_config,
                                           const SnnSpec& target_spec,
                                           const Vocab* source_vocab,
                                           const Vocab* target_vocab,
                                           const EmbeddingTable* table) {
    std::vector<int> test_labels;
    test_labels.reserve(target_test.size());
    for (const auto& p : target_test) test_labels.push_back(p.label);

    SnnSpec seeded_spec = target_spec;
    seeded_spec.seed = train_config.seed;

    // Target-only baseline, shared by every report.
    TrainResult baseline = train_snn(seeded_spec, target_train, target_val, train_config,
                                     target_vocab, table);
    SnnModel baseline_model{seeded_spec, baseline.params};
    double baseline_auc =
        target_test.empty() ? 0.0 : auc(predict_snn(baseline_model, target_test), test_labels);

    TransferExperiment exp;
    for (const auto& config : configs) {
        ParameterStore init = apply_init_config(source_model.params, target_spec, config,
                                                train_config.seed, source_vocab,
                                                target_vocab, table);
        TlReport report;
        report.config = config;
        report.target_dataset = target_dataset;
        report.baseline_auc = baseline_auc;

        if (train_config.epochs > 0) {
            TrainResult tuned = train_snn(seeded_spec, target_train, target_val,
                                          train_config, target_vocab, table, &init);
            report.history = tuned.history;
            SnnModel tuned_model{seeded_spec, tuned.params};
            report.transferred_auc =
                target_test.empty() ? 0.0
                                    : auc(predict_snn(tuned_model, target_test), test_labels);
        } else {
            SnnModel as_is{seeded_spec, init};
            report.transferred_auc =
                target_test.empty() ? 0.0 : auc(predict_snn(as_is, target_test), test_labels);
        }
        exp.reports.push_back(std::move(report));
    }

    for (std::size_t i = 1; i < exp.reports.size(); ++i) {
        if (exp.reports[i].transferred_auc > exp.reports[exp.best_index].transferred_auc) {
            exp.best_index = i;
        }
    }
    return exp;
}

void save_tl_reports(const std::string& path, const TransferExperiment& exp) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write transfer reports: " + path);
    for (std::size_t i = 0; i < exp.reports.size(); ++i) {
        const auto& r = exp.reports[i];
        json hist = json::array();
        for (const auto& e : r.history) {
            hist.push_back({{"epoch", e.epoch},
                            {"train_loss", e.train_loss},
                            {"val_auc", e.val_auc}});
        }
        json j{{"config", r.config.name()},
               {"target_dataset", r.target_dataset},
               {"baseline_auc", r.baseline_auc},
               {"transferred_auc", r.transferred_auc},
               {"best", i == exp.best_index},
               {"history", hist}};
        out << j.dump() << "\n";
    }
}

}  // namespace dqd
