#pragma once

#include <array>
#include <string>
#include <vector>

#include "dqd/net.hpp"

namespace dqd {

// I1: copy source values and freeze. I2: copy and fine-tune. I3: fresh
// seeded random initialization.
enum class InitState { I1, I2, I3 };

std::string init_state_name(InitState s);

// One state per module group, in E, R, A, D order. A is parameter-free;
// its state is recorded but changes nothing.
struct TlConfig {
    std::array<InitState, 4> states{};

    InitState state_of(ParamGroup g) const { return states[static_cast<int>(g)]; }
    std::string name() const;  // e.g. "E(I2),R(I3),A(I3),D(I3)"
};

enum class SweepMode { Curated, Full };

// Curated: the three published example configurations, the all-I3
// baseline, and two freeze/fine-tune variants (6 total). Full: all 3^4.
std::vector<TlConfig> enumerate_configs(SweepMode mode);

// Builds target parameters from a trained source model per the config.
// Copied groups must match shapes exactly, except the embedding matrix
// where rows are copied by token-name intersection of the two vocabs.
ParameterStore apply_init_config(const ParameterStore& source_params,
                                 const SnnSpec& target_spec,
                                 const TlConfig& config,
                                 std::uint64_t seed,
                                 const Vocab* source_vocab = nullptr,
                                 const Vocab* target_vocab = nullptr,
                                 const EmbeddingTable* table = nullptr);

struct TlReport {
    TlConfig config;
    std::string target_dataset;
    double baseline_auc = 0.0;     // target-only training
    double transferred_auc = 0.0;  // test AUC after fine-tuning
    std::vector<EpochRecord> history;
};

struct TransferExperiment {
    std::vector<TlReport> reports;  // one per requested config, config order
    std::size_t best_index = 0;     // max transferred AUC, ties by order
};

TransferExperiment run_transfer_experiment(const SnnModel& source_model,
                                           const std::vector<EncodedPair>& target_train,
                                           const std::vector<EncodedPair>& target_val,
                                           const std::vector<EncodedPair>& target_test,
                                           const std::string& target_dataset,
                                           const std::vector<TlConfig>& configs,
                                           const TrainConfig& train_config,
                                           const SnnSpec& target_spec,
                                           const Vocab* source_vocab = nullptr,
                                           const Vocab* target_vocab = nullptr,
                                           const EmbeddingTable* table = nullptr);

void save_tl_reports(const std::string& path, const TransferExperiment& exp);

}  // namespace dqd
