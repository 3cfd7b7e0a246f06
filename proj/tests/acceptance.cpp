// Acceptance checks for the duplicate-question toolkit. Each criterion
// prints one PASS/FAIL line; the process exits non-zero if any gating
// criterion fails. The final full-scale reproduction check needs the public
// datasets and pre-trained vectors; it runs only when DQD_FULL_DATA_DIR is
// set and is reported but never gates.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "dqd/corpus.hpp"
#include "dqd/eval.hpp"
#include "dqd/features.hpp"
#include "dqd/gbt.hpp"
#include "dqd/net.hpp"
#include "dqd/pipeline.hpp"
#include "dqd/porter.hpp"
#include "dqd/rng.hpp"
#include "dqd/transfer.hpp"
#include "dqd/wmd.hpp"
#include "json.hpp"

using namespace dqd;

namespace {

std::vector<std::string> g_notes;

void note(const std::string& s) { g_notes.push_back(s); }

// ---------------------------------------------------------------- helpers

double brute_force_auc(const std::vector<double>& scores, const std::vector<int>& labels) {
    double wins = 0.0;
    std::size_t pos = 0, neg = 0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (!labels[i]) continue;
        ++pos;
        for (std::size_t j = 0; j < scores.size(); ++j) {
            if (labels[j]) continue;
            if (scores[i] > scores[j]) wins += 1.0;
            else if (scores[i] == scores[j]) wins += 0.5;
        }
    }
    neg = scores.size() - pos;
    return wins / (static_cast<double>(pos) * static_cast<double>(neg));
}

std::vector<EncodedPair> random_pairs(std::size_t n, std::size_t max_len,
                                      std::size_t vocab_size, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<EncodedPair> out;
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<std::uint32_t> a, b;
        std::size_t la = 1 + rng.next_below(max_len);
        std::size_t lb = 1 + rng.next_below(max_len);
        for (std::size_t k = 0; k < la; ++k) {
            a.push_back(2 + static_cast<std::uint32_t>(rng.next_below(vocab_size - 2)));
        }
        for (std::size_t k = 0; k < lb; ++k) {
            b.push_back(2 + static_cast<std::uint32_t>(rng.next_below(vocab_size - 2)));
        }
        a.resize(max_len, Vocab::kPad);
        b.resize(max_len, Vocab::kPad);
        out.push_back({std::move(a), std::move(b), static_cast<int>(rng.next_below(2))});
    }
    return out;
}

SnnSpec small_snn_spec(EncoderKind enc, Aggregation agg) {
    SnnSpec spec;
    spec.max_len = 6;
    spec.vocab_size = 20;
    spec.embed_dim = 4;
    spec.encoder = enc;
    spec.hidden_dim = 3;
    spec.representation_dense = {4};
    spec.aggregation = agg;
    spec.decision_dense = {3, 1};
    spec.seed = 7;
    return spec;
}

// ------------------------------------------------------------- criteria

// Rank-based AUC equals brute-force pair counting within 1e-12 on 200
// seeded random score sets, ties included.
bool criterion_auc_oracle() {
    Rng rng(1001);
    for (int trial = 0; trial < 200; ++trial) {
        std::size_t n = 2 + rng.next_below(499);
        std::vector<double> scores(n);
        std::vector<int> labels(n);
        bool quantize = trial % 3 == 0;  // forces ties
        for (std::size_t i = 0; i < n; ++i) {
            double s = rng.next_double();
            scores[i] = quantize ? std::round(s * 8.0) / 8.0 : s;
            labels[i] = static_cast<int>(rng.next_below(2));
        }
        labels[0] = 0;
        labels[1] = 1;
        double fast = auc(scores, labels);
        double slow = brute_force_auc(scores, labels);
        if (std::abs(fast - slow) > 1e-12) {
            note("auc mismatch at trial " + std::to_string(trial));
            return false;
        }
    }
    return true;
}

// Central-difference gradient check, eps = 1e-5, max relative error < 1e-4
// for every encoder x aggregation combination on a 2-pair batch. Parameters
// are nudged away from their tiny initial values first so no relu
// pre-activation sits within eps of its kink.
bool criterion_gradients() {
    for (auto enc : {EncoderKind::MeanPool, EncoderKind::Lstm}) {
        for (auto agg : {Aggregation::ExpAbsDiff, Aggregation::Concat}) {
            SnnSpec spec = small_snn_spec(enc, agg);
            SnnModel model{spec, init_params(spec)};
            Rng noise(13);
            for (auto& arr : model.params.arrays) {
                for (auto& v : arr.data) v += noise.uniform(-0.4, 0.4);
            }
            auto batch = random_pairs(2, spec.max_len, spec.vocab_size, 2002);
            batch[0].label = 0;
            batch[1].label = 1;
            double err = gradient_check(model, batch, 1e-5, 25, 5);
            if (!(err < 1e-4)) {
                note(encoder_name(enc) + "/" + aggregation_name(agg) +
                     " gradient error " + std::to_string(err));
                return false;
            }
        }
    }
    return true;
}

// forward(q1,q2) bit-identical to forward(q2,q1) under the exp-abs-diff
// aggregation on 1,000 random encoded pairs.
bool criterion_symmetry() {
    for (auto enc : {EncoderKind::MeanPool, EncoderKind::Lstm}) {
        SnnSpec spec = small_snn_spec(enc, Aggregation::ExpAbsDiff);
        SnnModel model{spec, init_params(spec)};
        auto pairs = random_pairs(enc == EncoderKind::MeanPool ? 500 : 500,
                                  spec.max_len, spec.vocab_size, 3003);
        for (const auto& p : pairs) {
            EncodedPair swapped{p.q2_ids, p.q1_ids, p.label};
            if (forward(model, p) != forward(model, swapped)) {
                note("asymmetric prediction under " + encoder_name(enc));
                return false;
            }
        }
    }
    return true;
}

// After 5 fine-tuning epochs under E(I1),R(I2),A(I3),D(I3), the embedding
// arrays stay bit-identical to the source copy while R moves; the all-I3
// configuration retrains to exactly the target-only baseline.
bool criterion_freeze() {
    SnnSpec spec = small_snn_spec(EncoderKind::MeanPool, Aggregation::ExpAbsDiff);
    auto train = random_pairs(40, spec.max_len, spec.vocab_size, 4004);
    auto val = random_pairs(16, spec.max_len, spec.vocab_size, 4005);
    for (auto* set : {&train, &val}) {
        for (auto& p : *set) p.label = p.q1_ids[0] == p.q2_ids[0] ? 1 : 0;
        (*set)[0].label = 0;
        (*set)[1].label = 1;
    }

    ParameterStore source = init_params(spec);
    for (auto& a : source.arrays) {
        for (auto& v : a.data) v += 0.25;  // visibly not a fresh draw
    }

    TrainConfig config;
    config.epochs = 5;
    config.batch_size = 8;
    config.patience = 5;
    config.seed = 21;

    TlConfig tl{{InitState::I1, InitState::I2, InitState::I3, InitState::I3}};
    ParameterStore init = apply_init_config(source, spec, tl, config.seed);
    TrainResult tuned = train_snn(spec, train, val, config, nullptr, nullptr, &init);
    // compare against the epoch-5 state, not the best-epoch snapshot
    SnnModel last{spec, tuned.params};
    bool e_frozen = true, r_moved = false;
    for (std::size_t i = 0; i < tuned.params.arrays.size(); ++i) {
        const auto& a = tuned.params.arrays[i];
        if (a.group == ParamGroup::E && a.data != source.arrays[i].data) e_frozen = false;
        if (a.group == ParamGroup::R && a.data != init.arrays[i].data) r_moved = true;
    }
    if (!e_frozen) { note("frozen embeddings changed during fine-tuning"); return false; }
    if (!r_moved) { note("unfrozen encoder never moved"); return false; }

    SnnSpec seeded = spec;
    seeded.seed = config.seed;
    TrainResult baseline = train_snn(seeded, train, val, config);
    TlConfig all3{{InitState::I3, InitState::I3, InitState::I3, InitState::I3}};
    ParameterStore init3 = apply_init_config(source, spec, all3, config.seed);
    TrainResult redo = train_snn(seeded, train, val, config, nullptr, nullptr, &init3);
    for (std::size_t i = 0; i < baseline.params.arrays.size(); ++i) {
        if (baseline.params.arrays[i].data != redo.params.arrays[i].data) {
            note("all-I3 run diverged from the target-only baseline");
            return false;
        }
    }
    return true;
}

// Boosted trees: a linearly separable 500-row set reaches training AUC
// >= 0.99 within 50 rounds with monotone training logloss; exclusive-or
// data defeats depth-1 trees (AUC about 0.5) but not depth-2.
bool criterion_gbt() {
    Rng rng(5005);
    FeatureMatrix sep;
    for (int i = 0; i < 500; ++i) {
        FeatureVector row{};
        double x = rng.uniform(-1.0, 1.0);
        row[0] = x;
        for (std::size_t k = 1; k < kFeatureCount; ++k) row[k] = rng.uniform(-1.0, 1.0);
        sep.rows.push_back(row);
        sep.labels.push_back(x > 0.0 ? 1 : 0);
    }
    GbtParams params;
    params.rounds = 50;
    params.max_depth = 3;
    params.colsample = 1.0;
    params.min_child_weight = 0.0;
    TreeEnsemble model = train_gbt(sep, params);
    double sep_auc = auc(predict_gbt_batch(model, sep), sep.labels);
    if (!(sep_auc >= 0.99)) { note("separable AUC " + std::to_string(sep_auc)); return false; }
    for (std::size_t r = 1; r < model.train_logloss.size(); ++r) {
        if (model.train_logloss[r] > model.train_logloss[r - 1] + 1e-12) {
            note("training logloss increased at round " + std::to_string(r));
            return false;
        }
    }

    // exclusive-or corners, replicated, plus one tie-breaking extra row so
    // a greedy root split has somewhere to gain
    FeatureMatrix xordata;
    for (int rep = 0; rep < 25; ++rep) {
        for (int a = 0; a < 2; ++a) {
            for (int b = 0; b < 2; ++b) {
                FeatureVector row{};
                row[0] = a ? 1.0 : -1.0;
                row[1] = b ? 1.0 : -1.0;
                xordata.rows.push_back(row);
                xordata.labels.push_back(a ^ b);
            }
        }
    }
    FeatureVector extra{};
    extra[0] = -1.0;
    extra[1] = -1.0;
    xordata.rows.push_back(extra);
    xordata.labels.push_back(0);

    GbtParams shallow = params;
    shallow.max_depth = 1;
    double auc1 = auc(predict_gbt_batch(train_gbt(xordata, shallow), xordata),
                      xordata.labels);
    GbtParams deep = params;
    deep.max_depth = 2;
    double auc2 = auc(predict_gbt_batch(train_gbt(xordata, deep), xordata),
                      xordata.labels);
    if (!(auc1 >= 0.45 && auc1 <= 0.55)) { note("depth-1 AUC " + std::to_string(auc1)); return false; }
    if (!(auc2 >= 0.95)) { note("depth-2 AUC " + std::to_string(auc2)); return false; }
    return true;
}

// The relaxed distance never exceeds the exact transport cost, the exact
// distance of a bag with itself is 0, and the exact distance is symmetric —
// checked exhaustively over all distinct-token bags of size <= 5 drawn from
// a 10-word toy embedding.
bool criterion_wmd() {
    EmbeddingTable table;
    table.dim = 2;
    for (int i = 0; i < 10; ++i) {
        table.entries["w" + std::to_string(i)] = {static_cast<double>(i % 5),
                                                  static_cast<double>(i / 5)};
    }
    std::vector<std::vector<std::string>> bags;
    for (unsigned mask = 1; mask < (1u << 10); ++mask) {
        if (__builtin_popcount(mask) > 5) continue;
        std::vector<std::string> bag;
        for (int i = 0; i < 10; ++i) {
            if (mask & (1u << i)) bag.push_back("w" + std::to_string(i));
        }
        bags.push_back(std::move(bag));
    }
    for (std::size_t i = 0; i < bags.size(); ++i) {
        double self = exact_wmd_small(bags[i], bags[i], table);
        if (self != 0.0) { note("nonzero self-distance"); return false; }
        for (std::size_t j = i + 1; j < bags.size(); ++j) {
            double ab = exact_wmd_small(bags[i], bags[j], table);
            double ba = exact_wmd_small(bags[j], bags[i], table);
            if (ab != ba) { note("asymmetric exact distance"); return false; }
            double relaxed = relaxed_wmd(bags[i], bags[j], table);
            if (relaxed > ab + 1e-12) {
                note("relaxed bound violated: " + std::to_string(relaxed) + " > " +
                     std::to_string(ab));
                return false;
            }
        }
    }
    return true;
}

// A 100-pair synthetic duplicate task whose label follows a token-overlap
// rule is learnable: training AUC >= 0.95 within 200 epochs of the
// mean-pool model.
bool criterion_snn_learnability() {
    SnnSpec spec = small_snn_spec(EncoderKind::MeanPool, Aggregation::ExpAbsDiff);
    spec.vocab_size = 30;
    Rng rng(7007);
    std::vector<EncodedPair> train;
    while (train.size() < 100) {
        std::vector<std::uint32_t> a, b;
        for (int k = 0; k < 4; ++k) {
            a.push_back(2 + static_cast<std::uint32_t>(rng.next_below(28)));
        }
        bool dup = rng.next_below(2) == 0;
        if (dup) {
            b = a;
            std::swap(b[0], b[3]);  // same token bag, different order
        } else {
            for (int k = 0; k < 4; ++k) {
                b.push_back(2 + static_cast<std::uint32_t>(rng.next_below(28)));
            }
        }
        std::size_t overlap = 0;
        for (auto t : a) overlap += std::count(b.begin(), b.end(), t) > 0;
        int label = overlap >= 3 ? 1 : 0;
        a.resize(spec.max_len, Vocab::kPad);
        b.resize(spec.max_len, Vocab::kPad);
        train.push_back({std::move(a), std::move(b), label});
    }

    TrainConfig config;
    config.epochs = 200;
    config.batch_size = 16;
    config.learning_rate = 0.01;
    config.patience = 200;
    config.seed = 9;
    // validate on the training pairs so the tracked AUC is the training AUC
    TrainResult result = train_snn(spec, train, train, config);
    if (!(result.best_val_auc >= 0.95)) {
        note("training AUC " + std::to_string(result.best_val_auc) + " after " +
             std::to_string(result.history.size()) + " epochs");
        return false;
    }
    return true;
}

// The stemmer reproduces the committed reference sample exactly, and the
// 60/20/20 split of 404,303 rows lands on 242,581 / 80,861 / 80,861.
bool criterion_preprocessing() {
    std::ifstream in("data/porter_sample.tsv");
    if (!in.good()) { note("missing data/porter_sample.tsv"); return false; }
    std::string line;
    std::size_t rows = 0;
    while (std::getline(in, line)) {
        auto tab = line.find('\t');
        if (tab == std::string::npos) { note("malformed stem sample row"); return false; }
        std::string word = line.substr(0, tab);
        std::string expected = line.substr(tab + 1);
        if (porter_stem(word) != expected) {
            note("stem mismatch for '" + word + "'");
            return false;
        }
        ++rows;
    }
    if (rows < 5000) { note("stem sample unexpectedly small"); return false; }

    std::vector<ProcessedPair> pairs(404303);
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        pairs[i].id = static_cast<std::int64_t>(i);
        pairs[i].label = static_cast<int>(i % 2);
    }
    DatasetSplit split = split_dataset(std::move(pairs), 1);
    if (split.train.size() != 242581 || split.validation.size() != 80861 ||
        split.test.size() != 80861) {
        note("split sizes " + std::to_string(split.train.size()) + "/" +
             std::to_string(split.validation.size()) + "/" +
             std::to_string(split.test.size()));
        return false;
    }
    return true;
}

// featurize_pair always emits exactly 42 finite values; a pair of identical
// questions scores 0 on every distance and 1 on every similarity; and the
// committed toy feature file is reproduced byte for byte.
bool criterion_features() {
    std::ifstream cin("data/toy_corpus.json");
    if (!cin.good()) { note("missing data/toy_corpus.json"); return false; }
    nlohmann::json j;
    cin >> j;
    std::vector<ProcessedPair> pairs;
    std::int64_t id = 0;
    for (const auto& jp : j) {
        ProcessedPair p;
        p.id = id++;
        p.label = jp.at("label").get<int>();
        for (const char* side : {"q1", "q2"}) {
            ProcessedQuestion& q = side[1] == '1' ? p.q1 : p.q2;
            const auto& jq = jp.at(side);
            q.raw = jq.at("raw").get<std::string>();
            q.tokens = jq.at("tokens").get<std::vector<std::string>>();
            q.tokens_no_stop = jq.at("no_stop").get<std::vector<std::string>>();
        }
        pairs.push_back(std::move(p));
    }
    EmbeddingTable table = load_text_embeddings("data/toy_embeddings.txt", 4);
    IdfTable idf = build_idf(pairs);
    PairGraph graph = build_pair_graph(pairs);
    FeatureContext ctx{&idf, &table, &graph};

    const auto& catalog = feature_catalog();
    if (catalog.size() != kFeatureCount) { note("catalog size"); return false; }

    for (const auto& p : pairs) {
        FeatureVector v = featurize_pair(p, ctx);
        for (double x : v) {
            if (!std::isfinite(x)) { note("non-finite feature value"); return false; }
        }
        if (p.q1.raw == p.q2.raw) {
            for (const auto& info : catalog) {
                double x = v[info.index];
                if (info.kind == FeatureKind::Distance && x != 0.0) {
                    note(std::string("identical pair, nonzero ") + info.name);
                    return false;
                }
                if (info.kind == FeatureKind::Similarity && x != 1.0) {
                    note(std::string("identical pair, ") + info.name + " != 1");
                    return false;
                }
            }
        }
    }

    FeatureMatrix m = featurize_corpus(pairs, ctx);
    std::string tmp = "/tmp/dqd_acceptance_features.tsv";
    save_feature_matrix(tmp, m, "toy", "all");
    auto slurp = [](const std::string& path) {
        std::ifstream f(path);
        return std::string(std::istreambuf_iterator<char>(f),
                           std::istreambuf_iterator<char>());
    };
    std::string fresh = slurp(tmp);
    std::string golden = slurp("data/toy_features_golden.tsv");
    std::remove(tmp.c_str());
    if (golden.empty() || fresh != golden) {
        note("feature file differs from the committed golden copy");
        return false;
    }
    return true;
}

// Full-scale reproduction against the public datasets. Non-gating: runs
// only when DQD_FULL_DATA_DIR points at a directory with quora.tsv (and
// optionally askubuntu/ and english/ dump files); otherwise reported as
// SKIP.
int criterion_full_scale() {  // 1 pass, 0 fail, -1 skip
    const char* dir = std::getenv("DQD_FULL_DATA_DIR");
    if (!dir) return -1;
    std::string base = dir;
    std::string quora_path = base + "/quora.tsv";
    std::string vectors_path = base + "/vectors.txt";
    if (!std::ifstream(quora_path).good() || !std::ifstream(vectors_path).good()) {
        return -1;
    }
    auto pairs = load_quora_tsv(quora_path);
    std::vector<ProcessedPair> processed;
    processed.reserve(pairs.size());
    for (const auto& p : pairs) processed.push_back(preprocess_pair(p));
    processed = filter_pairs(processed);
    DatasetSplit split = split_dataset(std::move(processed), 1);
    EmbeddingTable table = load_text_embeddings(vectors_path, 300);
    GbtParams params;
    params.rounds = 400;
    params.early_stopping_patience = 20;
    GbtRun run = train_eval_gbt("quora", split, table, params);
    std::printf("  full-scale quora test AUC %.4f (target 0.941 +/- 0.03)\n",
                run.report.auc);
    return std::abs(run.report.auc - 0.941) <= 0.03 ? 1 : 0;
}

}  // namespace

int main() {
    struct Criterion {
        const char* name;
        std::function<bool()> run;
    };
    const std::vector<Criterion> criteria = {
        {"auc matches brute-force pair counting", criterion_auc_oracle},
        {"gradients match central differences", criterion_gradients},
        {"prediction symmetric under question swap", criterion_symmetry},
        {"freeze and reinit invariants hold", criterion_freeze},
        {"boosted trees pass sanity suite", criterion_gbt},
        {"relaxed distance bounds the exact transport cost", criterion_wmd},
        {"mean-pool model learns a token-overlap rule", criterion_snn_learnability},
        {"stemmer sample and split arithmetic conform", criterion_preprocessing},
        {"feature contract and golden file hold", criterion_features},
    };

    bool all_ok = true;
    int idx = 0;
    for (const auto& c : criteria) {
        ++idx;
        g_notes.clear();
        auto start = std::chrono::steady_clock::now();
        bool ok = c.run();
        double secs = std::chrono::duration<double>(
                          std::chrono::steady_clock::now() - start).count();
        std::printf("criterion %d: %s — %s (%.1fs)\n", idx, ok ? "PASS" : "FAIL",
                    c.name, secs);
        for (const auto& n : g_notes) std::printf("    %s\n", n.c_str());
        all_ok = all_ok && ok;
    }

    int full = criterion_full_scale();
    if (full < 0) {
        std::printf("criterion 10: SKIP — full-scale reproduction "
                    "(set DQD_FULL_DATA_DIR to run; never gates)\n");
    } else {
        std::printf("criterion 10: %s — full-scale reproduction (non-gating)\n",
                    full ? "PASS" : "FAIL");
    }

    return all_ok ? 0 : 1;
}
