#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dqd/embeddings.hpp"

namespace dqd {

enum class EncoderKind { MeanPool, Lstm };
enum class Aggregation { ExpAbsDiff, Concat };

std::string encoder_name(EncoderKind k);
std::string aggregation_name(Aggregation a);
std::optional<EncoderKind> encoder_from_name(const std::string& name);
std::optional<Aggregation> aggregation_from_name(const std::string& name);

struct SnnSpec {
    std::size_t max_len = 30;
    std::size_t vocab_size = 0;
    std::size_t embed_dim = 50;
    EncoderKind encoder = EncoderKind::MeanPool;
    std::size_t hidden_dim = 64;  // lstm only
    std::vector<std::size_t> representation_dense = {64};
    Aggregation aggregation = Aggregation::ExpAbsDiff;
    std::vector<std::size_t> decision_dense = {32, 1};  // last must be 1
    std::uint64_t seed = 0;

    std::size_t encoder_output_dim() const {
        return encoder == EncoderKind::MeanPool ? embed_dim : hidden_dim;
    }
    std::size_t representation_dim() const {
        return representation_dense.empty() ? encoder_output_dim()
                                            : representation_dense.back();
    }
    std::size_t aggregation_dim() const {
        return aggregation == Aggregation::ExpAbsDiff ? representation_dim()
                                                      : 2 * representation_dim();
    }
};

enum class ParamGroup : int { E = 0, R = 1, A = 2, D = 3 };

std::string group_name(ParamGroup g);

struct ParamArray {
    std::string name;
    ParamGroup group;
    std::vector<std::size_t> shape;
    std::vector<double> data;

    std::size_t size() const { return data.size(); }
};

struct ParameterStore {
    std::vector<ParamArray> arrays;           // fixed construction order
    std::array<bool, 4> frozen{};             // per group

    ParamArray& at(const std::string& name);
    const ParamArray& at(const std::string& name) const;
    bool is_frozen(ParamGroup g) const { return frozen[static_cast<int>(g)]; }
};

// Gradients keyed and shaped like the store.
using GradStore = ParameterStore;

GradStore zero_grads(const ParameterStore& params);

// Seeded initialization: embedding rows come from `table` where the vocab
// token is present, otherwise uniform(-0.05, 0.05); the padding row is
// zero. Dense and recurrent weights use fan-based scaled uniform draws,
// biases zero. Each array draws from its own (seed, name)-derived stream.
ParameterStore init_params(const SnnSpec& spec,
                           const Vocab* vocab = nullptr,
                           const EmbeddingTable* table = nullptr);

// Re-draws a single array exactly as init_params would.
void reinit_array(ParamArray& array, const SnnSpec& spec, std::uint64_t seed,
                  const Vocab* vocab = nullptr, const EmbeddingTable* table = nullptr);

struct SnnModel {
    SnnSpec spec;
    ParameterStore params;
};

std::vector<double> encoder_forward(const SnnModel& model,
                                    const std::vector<std::uint32_t>& ids);

std::vector<double> aggregate_exp_abs(const std::vector<double>& r1,
                                      const std::vector<double>& r2);
std::vector<double> aggregate_concat(const std::vector<double>& r1,
                                     const std::vector<double>& r2);

double forward(const SnnModel& model, const EncodedPair& pair);

inline constexpr double kBceClamp = 1e-7;

double bce_loss(double p, int label);

// Mean BCE over the batch.
double batch_loss(const SnnModel& model, const std::vector<EncodedPair>& batch);

// Reverse-mode gradients of batch_loss. Frozen groups get zero gradients.
GradStore backward(const SnnModel& model, const std::vector<EncodedPair>& batch);

struct TrainConfig {
    int epochs = 20;
    std::size_t batch_size = 32;
    double learning_rate = 0.002;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    int patience = 5;
    std::uint64_t seed = 0;
};

struct NadamState {
    std::vector<std::vector<double>> m;
    std::vector<std::vector<double>> v;
};

NadamState make_nadam_state(const ParameterStore& params);

// m <- b1 m + (1-b1) g;  v <- b2 v + (1-b2) g^2;
// mhat = b1 m / (1 - b1^(t+1)) + (1-b1) g / (1 - b1^t);  vhat = v / (1 - b2^t);
// theta <- theta - lr * mhat / (sqrt(vhat) + eps).   t starts at 1.
void nadam_step(ParameterStore& params, const GradStore& grads, NadamState& state,
                const TrainConfig& config, int t);

struct EpochRecord {
    int epoch = 0;
    double train_loss = 0.0;
    double val_auc = 0.0;
};

struct TrainResult {
    ParameterStore params;  // best-epoch parameters
    std::vector<EpochRecord> history;
    int best_epoch = 0;
    double best_val_auc = 0.0;
};

// Seeded shuffling per epoch; early stop on best validation AUC with the
// configured patience. params_in, when given, resumes from those values
// (transfer fine-tuning); otherwise init_params runs.
TrainResult train_snn(const SnnSpec& spec,
                      const std::vector<EncodedPair>& train,
                      const std::vector<EncodedPair>& validation,
                      const TrainConfig& config,
                      const Vocab* vocab = nullptr,
                      const EmbeddingTable* table = nullptr,
                      const ParameterStore* params_in = nullptr);

std::vector<double> predict_snn(const SnnModel& model,
                                const std::vector<EncodedPair>& pairs,
                                bool parallel = true);

// Max relative error between analytic and central-difference gradients over
// up to `samples_per_array` coordinates per unfrozen array.
double gradient_check(const SnnModel& model, const std::vector<EncodedPair>& batch,
                      double eps, std::size_t samples_per_array = 20,
                      std::uint64_t seed = 0);

// Versioned container: spec echo, seed, named arrays with shapes, group
// tags and frozen flags; bit-exact round-trip.
void save_snn(const std::string& path, const SnnModel& model);
SnnModel load_snn(const std::string& path);

void save_history(const std::string& path, const std::vector<EpochRecord>& history);

}  // namespace dqd
