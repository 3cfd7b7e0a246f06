#pragma once

#include <string>
#include <vector>

#include "dqd/corpus.hpp"
#include "dqd/eval.hpp"
#include "dqd/features.hpp"
#include "dqd/gbt.hpp"
#include "dqd/net.hpp"

namespace dqd {

// Feature contexts derived from a split: IDF from the training questions
// only, pair graph over all splits (label-blind).
struct SplitContexts {
    IdfTable idf;
    PairGraph graph;
};

SplitContexts build_contexts(const DatasetSplit& split);

struct GbtRun {
    TreeEnsemble model;
    EvalReport report;
};

GbtRun train_eval_gbt(const std::string& dataset_id, const DatasetSplit& split,
                      const EmbeddingTable& table, const GbtParams& params,
                      bool use_graph = true, bool parallel = true);

struct SnnRun {
    SnnModel model;
    Vocab vocab;
    std::vector<EpochRecord> history;
    EvalReport report;
};

SnnRun train_eval_snn(const std::string& dataset_id, const DatasetSplit& split,
                      const EmbeddingTable& table, SnnSpec spec, TrainConfig config);

// Scores a test split with an existing model; the context objects must come
// from the same preprocessing version.
EvalReport evaluate_gbt(const TreeEnsemble& model, const std::string& dataset_id,
                        const DatasetSplit& split, const EmbeddingTable& table,
                        bool use_graph = true);
EvalReport evaluate_snn(const SnnModel& model, const Vocab& vocab,
                        const std::string& dataset_id, const DatasetSplit& split);

struct CombinedInput {
    std::string dataset_id;
    DatasetSplit split;
};

// One model on the concatenated train splits, one report per dataset's own
// test split, tagged model kind "combined".
std::vector<EvalReport> run_combined_baseline_gbt(const std::vector<CombinedInput>& inputs,
                                                  const EmbeddingTable& table,
                                                  const GbtParams& params);
std::vector<EvalReport> run_combined_baseline_snn(const std::vector<CombinedInput>& inputs,
                                                  const EmbeddingTable& table,
                                                  SnnSpec spec, TrainConfig config);

}  // namespace dqd
