#include "dqd/net.hpp"

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

std::string encoder_name(EncoderKind k) {
    return k == EncoderKind::MeanPool ? "mean" : "lstm";
}

std::string aggregation_name(Aggregation a) {
    return a == Aggregation::ExpAbsDiff ? "expabs" : "concat";
}

std::optional<EncoderKind> encoder_from_name(const std::string& name) {
    if (name == "mean") return EncoderKind::MeanPool;
    if (name == "lstm") return EncoderKind::Lstm;
    return std::nullopt;
}

std::optional<Aggregation> aggregation_from_name(const std::string& name) {
    if (name == "expabs") return Aggregation::ExpAbsDiff;
    if (name == "concat") return Aggregation::Concat;
    return std::nullopt;
}

std::string group_name(ParamGroup g) {
    switch (g) {
        case ParamGroup::E: return "E";
        case ParamGroup::R: return "R";
        case ParamGroup::A: return "A";
        case ParamGroup::D: return "D";
    }
    return "?";
}

ParamArray& ParameterStore::at(const std::string& name) {
    for (auto& a : arrays) {
        if (a.name == name) return a;
    }
    throw std::runtime_error("no parameter array named " + name);
}

const ParamArray& ParameterStore::at(const std::string& name) const {
    for (const auto& a : arrays) {
        if (a.name == name) return a;
    }
    throw std::runtime_error("no parameter array named " + name);
}

GradStore zero_grads(const ParameterStore& params) {
    GradStore grads = params;
    for (auto& a : grads.arrays) std::fill(a.data.begin(), a.data.end(), 0.0);
    return grads;
}

namespace {

// The array list is a pure function of the spec; init and serialization
// both walk it.
std::vector<ParamArray> array_skeleton(const SnnSpec& spec) {
    if (spec.vocab_size < 2) throw std::runtime_error("snn spec: vocab_size < 2");
    if (spec.decision_dense.empty() || spec.decision_dense.back() != 1) {
        throw std::runtime_error("snn spec: decision head must end in a single unit");
    }
    std::vector<ParamArray> arrays;
    auto add = [&](std::string name, ParamGroup group, std::vector<std::size_t> shape) {
        ParamArray a;
        a.name = std::move(name);
        a.group = group;
        a.shape = std::move(shape);
        std::size_t n = 1;
        for (auto d : a.shape) n *= d;
        a.data.assign(n, 0.0);
        arrays.push_back(std::move(a));
    };

    add("E.embedding", ParamGroup::E, {spec.vocab_size, spec.embed_dim});
    if (spec.encoder == EncoderKind::Lstm) {
        add("R.lstm.W", ParamGroup::R, {4 * spec.hidden_dim, spec.embed_dim});
        add("R.lstm.U", ParamGroup::R, {4 * spec.hidden_dim, spec.hidden_dim});
        add("R.lstm.b", ParamGroup::R, {4 * spec.hidden_dim});
    }
    std::size_t in = spec.encoder_output_dim();
    for (std::size_t i = 0; i < spec.representation_dense.size(); ++i) {
        std::size_t out = spec.representation_dense[i];
        add("R.dense" + std::to_string(i) + ".W", ParamGroup::R, {out, in});
        add("R.dense" + std::to_string(i) + ".b", ParamGroup::R, {out});
        in = out;
    }
    in = spec.aggregation_dim();
    for (std::size_t i = 0; i < spec.decision_dense.size(); ++i) {
        std::size_t out = spec.decision_dense[i];
        add("D.dense" + std::to_string(i) + ".W", ParamGroup::D, {out, in});
        add("D.dense" + std::to_string(i) + ".b", ParamGroup::D, {out});
        in = out;
    }
    return arrays;
}

}  // namespace

void reinit_array(ParamArray& array, const SnnSpec& spec, std::uint64_t seed,
                  const Vocab* vocab, const EmbeddingTable* table) {
    Rng rng(derive_seed(seed, array.name));
    if (array.name == "E.embedding") {
        std::size_t dim = spec.embed_dim;
        // Padding row stays zero; every other row draws, then pre-trained
        // vectors overwrite rows whose token is covered. Drawing first keeps
        // the stream position independent of table coverage.
        std::fill(array.data.begin(), array.data.begin() + dim, 0.0);
        for (std::size_t r = 1; r < spec.vocab_size; ++r) {
            for (std::size_t d = 0; d < dim; ++d) {
                array.data[r * dim + d] = rng.uniform(-0.05, 0.05);
            }
        }
        if (vocab && table && table->dim == dim) {
            for (std::size_t i = 0; i < vocab->tokens.size(); ++i) {
                const auto* vec = table->find(vocab->tokens[i]);
                if (!vec) continue;
                std::size_t r = i + 2;
                for (std::size_t d = 0; d < dim; ++d) array.data[r * dim + d] = (*vec)[d];
            }
        }
        return;
    }
    if (array.shape.size() == 1) {
        std::fill(array.data.begin(), array.data.end(), 0.0);  // biases
        return;
    }
    double fan_out = static_cast<double>(array.shape[0]);
    double fan_in = static_cast<double>(array.shape[1]);
    double limit = std::sqrt(6.0 / (fan_in + fan_out));
    for (auto& v : array.data) v = rng.uniform(-limit, limit);
}

ParameterStore init_params(const SnnSpec& spec, const Vocab* vocab,
                           const EmbeddingTable* table) {
    ParameterStore store;
    store.arrays = array_skeleton(spec);
    for (auto& a : store.arrays) reinit_array(a, spec, spec.seed, vocab, table);
    return store;
}

namespace {

std::size_t sequence_length(const std::vector<std::uint32_t>& ids) {
    std::size_t len = 0;
    while (len < ids.size() && ids[len] != Vocab::kPad) ++len;
    return len;
}

struct DenseCache {
    std::vector<double> input;
    std::vector<double> preact;
    std::vector<double> output;
};

struct LstmStep {
    std::vector<double> i, f, g, o, c, tanh_c, h;
};

struct EncoderCache {
    std::vector<std::uint32_t> ids;
    std::size_t len = 0;
    std::vector<double> pooled;        // mean_pool path
    std::vector<LstmStep> steps;       // lstm path
    std::vector<DenseCache> dense;
    std::vector<double> output;
};

struct PairCache {
    EncoderCache enc1, enc2;
    std::vector<double> agg;
    std::vector<double> abs_diff_sign;  // sign(r1 - r2), exp_abs path
    std::vector<DenseCache> decision;
    double z = 0.0;
    double p = 0.5;
};

void dense_forward(const ParamArray& W, const ParamArray& b,
                   const std::vector<double>& input, bool relu, DenseCache& cache) {
    std::size_t out = W.shape[0];
    std::size_t in = W.shape[1];
    cache.input = input;
    cache.preact.assign(out, 0.0);
    for (std::size_t j = 0; j < out; ++j) {
        double s = b.data[j];
        const double* row = W.data.data() + j * in;
        for (std::size_t k = 0; k < in; ++k) s += row[k] * input[k];
        cache.preact[j] = s;
    }
    cache.output = cache.preact;
    if (relu) {
        for (auto& v : cache.output) v = std::max(0.0, v);
    }
}

// dL/d(output) -> accumulates W, b grads; returns dL/d(input).
std::vector<double> dense_backward(const ParamArray& W, const DenseCache& cache,
                                   bool relu, const std::vector<double>& dout,
                                   ParamArray& dW, ParamArray& db) {
    std::size_t out = W.shape[0];
    std::size_t in = W.shape[1];
    std::vector<double> dpre = dout;
    if (relu) {
        for (std::size_t j = 0; j < out; ++j) {
            if (cache.preact[j] <= 0.0) dpre[j] = 0.0;
        }
    }
    std::vector<double> dinput(in, 0.0);
    for (std::size_t j = 0; j < out; ++j) {
        double d = dpre[j];
        if (d == 0.0) continue;
        db.data[j] += d;
        const double* row = W.data.data() + j * in;
        double* drow = dW.data.data() + j * in;
        for (std::size_t k = 0; k < in; ++k) {
            drow[k] += d * cache.input[k];
            dinput[k] += d * row[k];
        }
    }
    return dinput;
}

void encoder_forward_cached(const SnnModel& model, const std::vector<std::uint32_t>& ids,
                            EncoderCache& cache) {
    const SnnSpec& spec = model.spec;
    const ParamArray& E = model.params.at("E.embedding");
    cache.ids = ids;
    cache.len = sequence_length(ids);

    std::vector<double> encoded;
    if (spec.encoder == EncoderKind::MeanPool) {
        cache.pooled.assign(spec.embed_dim, 0.0);
        for (std::size_t t = 0; t < cache.len; ++t) {
            const double* row = E.data.data() + ids[t] * spec.embed_dim;
            for (std::size_t d = 0; d < spec.embed_dim; ++d) cache.pooled[d] += row[d];
        }
        if (cache.len > 0) {
            for (auto& v : cache.pooled) v /= static_cast<double>(cache.len);
        }
        encoded = cache.pooled;
    } else {
        const ParamArray& W = model.params.at("R.lstm.W");
        const ParamArray& U = model.params.at("R.lstm.U");
        const ParamArray& b = model.params.at("R.lstm.b");
        std::size_t h = spec.hidden_dim;
        std::vector<double> h_prev(h, 0.0), c_prev(h, 0.0);
        cache.steps.clear();
        for (std::size_t t = 0; t < cache.len; ++t) {
            const double* x = E.data.data() + ids[t] * spec.embed_dim;
            LstmStep step;
            step.i.resize(h);
            step.f.resize(h);
            step.g.resize(h);
            step.o.resize(h);
            step.c.resize(h);
            step.tanh_c.resize(h);
            step.h.resize(h);
            // Gate order in the packed matrices: i, f, g, o.
            for (std::size_t j = 0; j < 4 * h; ++j) {
                double s = b.data[j];
                const double* wrow = W.data.data() + j * spec.embed_dim;
                for (std::size_t k = 0; k < spec.embed_dim; ++k) s += wrow[k] * x[k];
                const double* urow = U.data.data() + j * h;
                for (std::size_t k = 0; k < h; ++k) s += urow[k] * h_prev[k];
                std::size_t gate = j / h;
                std::size_t unit = j % h;
                if (gate == 0) step.i[unit] = sigmoid(s);
                else if (gate == 1) step.f[unit] = sigmoid(s);
                else if (gate == 2) step.g[unit] = std::tanh(s);
                else step.o[unit] = sigmoid(s);
            }
            for (std::size_t u = 0; u < h; ++u) {
                step.c[u] = step.f[u] * c_prev[u] + step.i[u] * step.g[u];
                step.tanh_c[u] = std::tanh(step.c[u]);
                step.h[u] = step.o[u] * step.tanh_c[u];
            }
            h_prev = step.h;
            c_prev = step.c;
            cache.steps.push_back(std::move(step));
        }
        encoded = h_prev;  // zero vector for empty input
    }

    cache.dense.resize(spec.representation_dense.size());
    for (std::size_t i = 0; i < spec.representation_dense.size(); ++i) {
        const ParamArray& W = model.params.at("R.dense" + std::to_string(i) + ".W");
        const ParamArray& b = model.params.at("R.dense" + std::to_string(i) + ".b");
        dense_forward(W, b, encoded, /*relu=*/true, cache.dense[i]);
        encoded = cache.dense[i].output;
    }
    cache.output = encoded;
}

void encoder_backward(const SnnModel& model, const EncoderCache& cache,
                      std::vector<double> dout, GradStore& grads) {
    const SnnSpec& spec = model.spec;
    for (std::size_t i = spec.representation_dense.size(); i-- > 0;) {
        const ParamArray& W = model.params.at("R.dense" + std::to_string(i) + ".W");
        dout = dense_backward(W, cache.dense[i], /*relu=*/true, dout,
                              grads.at("R.dense" + std::to_string(i) + ".W"),
                              grads.at("R.dense" + std::to_string(i) + ".b"));
    }

    ParamArray& dE = grads.at("E.embedding");
    if (spec.encoder == EncoderKind::MeanPool) {
        if (cache.len == 0) return;
        double inv = 1.0 / static_cast<double>(cache.len);
        for (std::size_t t = 0; t < cache.len; ++t) {
            double* row = dE.data.data() + cache.ids[t] * spec.embed_dim;
            for (std::size_t d = 0; d < spec.embed_dim; ++d) row[d] += dout[d] * inv;
        }
        return;
    }

    const ParamArray& W = model.params.at("R.lstm.W");
    const ParamArray& U = model.params.at("R.lstm.U");
    const ParamArray& E = model.params.at("E.embedding");
    ParamArray& dW = grads.at("R.lstm.W");
    ParamArray& dU = grads.at("R.lstm.U");
    ParamArray& db = grads.at("R.lstm.b");
    std::size_t h = spec.hidden_dim;

    std::vector<double> dh = dout;  // gradient on the final hidden state
    std::vector<double> dc(h, 0.0);
    for (std::size_t t = cache.len; t-- > 0;) {
        const LstmStep& s = cache.steps[t];
        const std::vector<double>& c_prev =
            t == 0 ? std::vector<double>(h, 0.0) : cache.steps[t - 1].c;
        const std::vector<double>& h_prev =
            t == 0 ? std::vector<double>(h, 0.0) : cache.steps[t - 1].h;

        std::vector<double> dz(4 * h);
        for (std::size_t u = 0; u < h; ++u) {
            double do_ = dh[u] * s.tanh_c[u];
            double dcu = dc[u] + dh[u] * s.o[u] * (1.0 - s.tanh_c[u] * s.tanh_c[u]);
            double di = dcu * s.g[u];
            double df = dcu * c_prev[u];
            double dg = dcu * s.i[u];
            dc[u] = dcu * s.f[u];  // becomes dc for step t-1
            dz[0 * h + u] = di * s.i[u] * (1.0 - s.i[u]);
            dz[1 * h + u] = df * s.f[u] * (1.0 - s.f[u]);
            dz[2 * h + u] = dg * (1.0 - s.g[u] * s.g[u]);
            dz[3 * h + u] = do_ * s.o[u] * (1.0 - s.o[u]);
        }

        const double* x = E.data.data() + cache.ids[t] * spec.embed_dim;
        double* dx = dE.data.data() + cache.ids[t] * spec.embed_dim;
        std::vector<double> dh_prev(h, 0.0);
        for (std::size_t j = 0; j < 4 * h; ++j) {
            double d = dz[j];
            if (d == 0.0) continue;
            db.data[j] += d;
            double* dwrow = dW.data.data() + j * spec.embed_dim;
            const double* wrow = W.data.data() + j * spec.embed_dim;
            for (std::size_t k = 0; k < spec.embed_dim; ++k) {
                dwrow[k] += d * x[k];
                dx[k] += d * wrow[k];
            }
            double* durow = dU.data.data() + j * h;
            const double* urow = U.data.data() + j * h;
            for (std::size_t k = 0; k < h; ++k) {
                durow[k] += d * h_prev[k];
                dh_prev[k] += d * urow[k];
            }
        }
        dh = dh_prev;
    }
}

void pair_forward(const SnnModel& model, const EncodedPair& pair, PairCache& cache) {
    const SnnSpec& spec = model.spec;
    encoder_forward_cached(model, pair.q1_ids, cache.enc1);
    encoder_forward_cached(model, pair.q2_ids, cache.enc2);

    if (spec.aggregation == Aggregation::ExpAbsDiff) {
        std::size_t n = cache.enc1.output.size();
        cache.agg.resize(n);
        cache.abs_diff_sign.resize(n);
        for (std::size_t k = 0; k < n; ++k) {
            double d = cache.enc1.output[k] - cache.enc2.output[k];
            cache.abs_diff_sign[k] = d > 0.0 ? 1.0 : (d < 0.0 ? -1.0 : 0.0);
            cache.agg[k] = std::exp(-std::abs(d));
        }
    } else {
        cache.agg = cache.enc1.output;
        cache.agg.insert(cache.agg.end(), cache.enc2.output.begin(),
                         cache.enc2.output.end());
    }

    std::vector<double> cur = cache.agg;
    cache.decision.resize(spec.decision_dense.size());
    for (std::size_t i = 0; i < spec.decision_dense.size(); ++i) {
        const ParamArray& W = model.params.at("D.dense" + std::to_string(i) + ".W");
        const ParamArray& b = model.params.at("D.dense" + std::to_string(i) + ".b");
        bool relu = i + 1 < spec.decision_dense.size();
        dense_forward(W, b, cur, relu, cache.decision[i]);
        cur = cache.decision[i].output;
    }
    cache.z = cur[0];
    cache.p = sigmoid(cache.z);
}

void pair_backward(const SnnModel& model, const PairCache& cache, double dz,
                   GradStore& grads) {
    const SnnSpec& spec = model.spec;
    std::vector<double> dout = {dz};
    for (std::size_t i = spec.decision_dense.size(); i-- > 0;) {
        const ParamArray& W = model.params.at("D.dense" + std::to_string(i) + ".W");
        bool relu = i + 1 < spec.decision_dense.size();
        dout = dense_backward(W, cache.decision[i], relu, dout,
                              grads.at("D.dense" + std::to_string(i) + ".W"),
                              grads.at("D.dense" + std::to_string(i) + ".b"));
    }

    std::size_t rep = cache.enc1.output.size();
    std::vector<double> dr1(rep, 0.0), dr2(rep, 0.0);
    if (spec.aggregation == Aggregation::ExpAbsDiff) {
        for (std::size_t k = 0; k < rep; ++k) {
            double dd = -dout[k] * cache.agg[k] * cache.abs_diff_sign[k];
            dr1[k] = dd;
            dr2[k] = -dd;
        }
    } else {
        std::copy(dout.begin(), dout.begin() + rep, dr1.begin());
        std::copy(dout.begin() + rep, dout.end(), dr2.begin());
    }

    encoder_backward(model, cache.enc1, std::move(dr1), grads);
    encoder_backward(model, cache.enc2, std::move(dr2), grads);
}

}  // namespace

std::vector<double> encoder_forward(const SnnModel& model,
                                    const std::vector<std::uint32_t>& ids) {
    EncoderCache cache;
    encoder_forward_cached(model, ids, cache);
    return cache.output;
}

std::vector<double> aggregate_exp_abs(const std::vector<double>& r1,
                                      const std::vector<double>& r2) {
    if (r1.size() != r2.size()) {
        throw std::runtime_error("aggregate_exp_abs: length mismatch");
    }
    std::vector<double> out(r1.size());
    for (std::size_t k = 0; k < r1.size(); ++k) {
        out[k] = std::exp(-std::abs(r1[k] - r2[k]));
    }
    return out;
}

std::vector<double> aggregate_concat(const std::vector<double>& r1,
                                     const std::vector<double>& r2) {
    std::vector<double> out = r1;
    out.insert(out.end(), r2.begin(), r2.end());
    return out;
}

double forward(const SnnModel& model, const EncodedPair& pair) {
    PairCache cache;
    pair_forward(model, pair, cache);
    return cache.p;
}

double bce_loss(double p, int label) {
    double q = std::clamp(p, kBceClamp, 1.0 - kBceClamp);
    return label ? -std::log(q) : -std::log(1.0 - q);
}

double batch_loss(const SnnModel& model, const std::vector<EncodedPair>& batch) {
    if (batch.empty()) throw std::runtime_error("batch_loss: empty batch");
    double total = 0.0;
    for (const auto& pair : batch) total += bce_loss(forward(model, pair), pair.label);
    return total / static_cast<double>(batch.size());
}

GradStore backward(const SnnModel& model, const std::vector<EncodedPair>& batch) {
    if (batch.empty()) throw std::runtime_error("backward: empty batch");
    GradStore grads = zero_grads(model.params);
    double inv = 1.0 / static_cast<double>(batch.size());
    for (const auto& pair : batch) {
        PairCache cache;
        pair_forward(model, pair, cache);
        double dz;
        if (cache.p <= kBceClamp || cache.p >= 1.0 - kBceClamp) {
            dz = 0.0;  // loss is clamped flat here
        } else {
            dz = (cache.p - static_cast<double>(pair.label)) * inv;
        }
        pair_backward(model, cache, dz, grads);
    }
    for (auto& a : grads.arrays) {
        if (grads.is_frozen(a.group)) std::fill(a.data.begin(), a.data.end(), 0.0);
    }
    return grads;
}

NadamState make_nadam_state(const ParameterStore& params) {
    NadamState state;
    for (const auto& a : params.arrays) {
        state.m.emplace_back(a.size(), 0.0);
        state.v.emplace_back(a.size(), 0.0);
    }
    return state;
}

void nadam_step(ParameterStore& params, const GradStore& grads, NadamState& state,
                const TrainConfig& config, int t) {
    if (t < 1) throw std::runtime_error("nadam_step: t must be >= 1");
    double b1 = config.beta1;
    double b2 = config.beta2;
    double bias1_next = 1.0 - std::pow(b1, t + 1);
    double bias1 = 1.0 - std::pow(b1, t);
    double bias2 = 1.0 - std::pow(b2, t);
    for (std::size_t i = 0; i < params.arrays.size(); ++i) {
        auto& a = params.arrays[i];
        const auto& ga = grads.arrays[i];
        if (a.size() != ga.size()) throw std::runtime_error("nadam_step: shape mismatch");
        bool frozen = params.is_frozen(a.group);
        auto& m = state.m[i];
        auto& v = state.v[i];
        for (std::size_t k = 0; k < a.size(); ++k) {
            double g = ga.data[k];
            m[k] = b1 * m[k] + (1.0 - b1) * g;
            v[k] = b2 * v[k] + (1.0 - b2) * g * g;
            if (frozen) continue;
            double mhat = b1 * m[k] / bias1_next + (1.0 - b1) * g / bias1;
            double vhat = v[k] / bias2;
            a.data[k] -= config.learning_rate * mhat / (std::sqrt(vhat) + config.epsilon);
        }
    }
}

std::vector<double> predict_snn(const SnnModel& model,
                                const std::vector<EncodedPair>& pairs,
                                bool parallel) {
    std::vector<double> out(pairs.size());
    const auto n = static_cast<std::int64_t>(pairs.size());
    if (parallel) {
#ifdef DQD_HAVE_OPENMP
#pragma omp parallel for schedule(dynamic, 32)
#endif
        for (std::int64_t i = 0; i < n; ++i) {
            out[i] = forward(model, pairs[i]);
        }
    } else {
        for (std::int64_t i = 0; i < n; ++i) {
            out[i] = forward(model, pairs[i]);
        }
    }
    return out;
}

namespace {

bool has_both_classes(const std::vector<EncodedPair>& pairs) {
    bool pos = false, neg = false;
    for (const auto& p : pairs) (p.label ? pos : neg) = true;
    return pos && neg;
}

}  // namespace

TrainResult train_snn(const SnnSpec& spec,
                      const std::vector<EncodedPair>& train,
                      const std::vector<EncodedPair>& validation,
                      const TrainConfig& config,
                      const Vocab* vocab,
                      const EmbeddingTable* table,
                      const ParameterStore* params_in) {
    if (train.empty()) throw std::runtime_error("train_snn: empty training set");

    SnnModel model;
    model.spec = spec;
    model.params = params_in ? *params_in : init_params(spec, vocab, table);

    NadamState state = make_nadam_state(model.params);
    Rng shuffle_rng(derive_seed(config.seed, "snn.shuffle"));

    TrainResult result;
    result.params = model.params;
    result.best_val_auc = -1.0;
    bool val_usable = !validation.empty() && has_both_classes(validation);

    std::vector<std::size_t> order(train.size());
    std::iota(order.begin(), order.end(), 0);

    int t = 0;
    for (int epoch = 1; epoch <= config.epochs; ++epoch) {
        shuffle_rng.shuffle(order);
        double epoch_loss = 0.0;
        for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
            std::size_t end = std::min(order.size(), start + config.batch_size);
            std::vector<EncodedPair> batch;
            batch.reserve(end - start);
            for (std::size_t k = start; k < end; ++k) batch.push_back(train[order[k]]);
            GradStore grads = backward(model, batch);
            nadam_step(model.params, grads, state, config, ++t);
            epoch_loss += batch_loss(model, batch) * static_cast<double>(batch.size());
        }
        epoch_loss /= static_cast<double>(train.size());

        double val_auc = 0.5;
        if (val_usable) {
            val_auc = auc(predict_snn(model, validation), [&] {
                std::vector<int> labels;
                labels.reserve(validation.size());
                for (const auto& p : validation) labels.push_back(p.label);
                return labels;
            }());
        }
        result.history.push_back({epoch, epoch_loss, val_auc});

        if (val_auc > result.best_val_auc) {
            result.best_val_auc = val_auc;
            result.best_epoch = epoch;
            result.params = model.params;
        }
        int since_best = epoch - result.best_epoch;
        if (val_usable && since_best >= config.patience) break;
    }

    if (!val_usable) {
        result.params = model.params;  // no signal to pick a best epoch
        result.best_epoch = result.history.empty() ? 0 : result.history.back().epoch;
    }
    return result;
}

double gradient_check(const SnnModel& model, const std::vector<EncodedPair>& batch,
                      double eps, std::size_t samples_per_array, std::uint64_t seed) {
    GradStore analytic = backward(model, batch);
    SnnModel probe = model;

    double max_rel_err = 0.0;
    for (std::size_t ai = 0; ai < model.params.arrays.size(); ++ai) {
        const auto& a = model.params.arrays[ai];
        if (model.params.is_frozen(a.group)) continue;
        Rng rng(derive_seed(seed, "gradcheck." + a.name));
        std::size_t n = a.size();
        std::size_t samples = std::min(samples_per_array, n);
        for (std::size_t s = 0; s < samples; ++s) {
            std::size_t k = static_cast<std::size_t>(rng.next_below(n));
            double orig = probe.params.arrays[ai].data[k];
            probe.params.arrays[ai].data[k] = orig + eps;
            double up = batch_loss(probe, batch);
            probe.params.arrays[ai].data[k] = orig - eps;
            double down = batch_loss(probe, batch);
            probe.params.arrays[ai].data[k] = orig;
            double fd = (up - down) / (2.0 * eps);
            double an = analytic.arrays[ai].data[k];
            double rel = std::abs(an - fd) / std::max({std::abs(an), std::abs(fd), 1e-12});
            max_rel_err = std::max(max_rel_err, rel);
        }
    }
    return max_rel_err;
}

namespace {

std::string sizes_to_string(const std::vector<std::size_t>& v) {
    std::string s = std::to_string(v.size());
    for (auto x : v) s += " " + std::to_string(x);
    return s;
}

}  // namespace

void save_snn(const std::string& path, const SnnModel& model) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write snn model: " + path);
    const SnnSpec& s = model.spec;
    out << "dqd-snn-v1\n";
    out << "max_len " << s.max_len << "\n";
    out << "vocab_size " << s.vocab_size << "\n";
    out << "embed_dim " << s.embed_dim << "\n";
    out << "encoder " << encoder_name(s.encoder) << "\n";
    out << "hidden_dim " << s.hidden_dim << "\n";
    out << "representation_dense " << sizes_to_string(s.representation_dense) << "\n";
    out << "aggregation " << aggregation_name(s.aggregation) << "\n";
    out << "decision_dense " << sizes_to_string(s.decision_dense) << "\n";
    out << "seed " << s.seed << "\n";
    out << "frozen";
    for (bool f : model.params.frozen) out << " " << (f ? 1 : 0);
    out << "\n";
    out << "arrays " << model.params.arrays.size() << "\n";
    for (const auto& a : model.params.arrays) {
        out << "array " << a.name << " " << group_name(a.group) << " "
            << sizes_to_string(a.shape) << "\n";
        for (std::size_t k = 0; k < a.size(); ++k) {
            if (k) out << " ";
            out << fmt17(a.data[k]);
        }
        out << "\n";
    }
}

SnnModel load_snn(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open snn model: " + path);
    std::string tag;
    in >> tag;
    if (tag != "dqd-snn-v1") throw std::runtime_error("bad snn model magic");

    auto expect = [&](const char* key) {
        std::string k;
        in >> k;
        if (k != key) throw std::runtime_error(std::string("snn model: expected ") + key);
    };
    auto read_sizes = [&]() {
        std::size_t n;
        in >> n;
        std::vector<std::size_t> v(n);
        for (auto& x : v) in >> x;
        return v;
    };

    SnnModel model;
    SnnSpec& s = model.spec;
    std::string word;
    expect("max_len");
    in >> s.max_len;
    expect("vocab_size");
    in >> s.vocab_size;
    expect("embed_dim");
    in >> s.embed_dim;
    expect("encoder");
    in >> word;
    auto enc = encoder_from_name(word);
    if (!enc) throw std::runtime_error("snn model: unknown encoder " + word);
    s.encoder = *enc;
    expect("hidden_dim");
    in >> s.hidden_dim;
    expect("representation_dense");
    s.representation_dense = read_sizes();
    expect("aggregation");
    in >> word;
    auto agg = aggregation_from_name(word);
    if (!agg) throw std::runtime_error("snn model: unknown aggregation " + word);
    s.aggregation = *agg;
    expect("decision_dense");
    s.decision_dense = read_sizes();
    expect("seed");
    in >> s.seed;
    expect("frozen");
    for (auto& f : model.params.frozen) {
        int x;
        in >> x;
        f = x != 0;
    }
    expect("arrays");
    std::size_t count;
    in >> count;
    for (std::size_t i = 0; i < count; ++i) {
        expect("array");
        ParamArray a;
        std::string gname;
        in >> a.name >> gname;
        if (gname == "E") a.group = ParamGroup::E;
        else if (gname == "R") a.group = ParamGroup::R;
        else if (gname == "A") a.group = ParamGroup::A;
        else if (gname == "D") a.group = ParamGroup::D;
        else throw std::runtime_error("snn model: unknown group " + gname);
        a.shape = read_sizes();
        std::size_t n = 1;
        for (auto d : a.shape) n *= d;
        a.data.resize(n);
        for (auto& v : a.data) in >> v;
        model.params.arrays.push_back(std::move(a));
    }
    if (!in) throw std::runtime_error("truncated snn model: " + path);
    return model;
}

void save_history(const std::string& path, const std::vector<EpochRecord>& history) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write history: " + path);
    for (const auto& r : history) {
        out << "{\"epoch\": " << r.epoch << ", \"train_loss\": " << fmt17(r.train_loss)
            << ", \"val_auc\": " << fmt17(r.val_auc) << "}\n";
    }
}

}  // namespace dqd
