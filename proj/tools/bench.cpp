// Compares the OpenMP kernels against their serial reference paths on a
// synthetic corpus: feature extraction, one-shot boosted-tree training
// (parallel split search), and batch network inference. Each section prints
// serial/parallel wall time plus a check that the outputs match bitwise.

#include <chrono>
#include <cstdio>
#include <cstring>
#include <string>
#include <vector>

#ifdef DQD_HAVE_OPENMP
#include <omp.h>
#endif

#include "dqd/features.hpp"
#include "dqd/gbt.hpp"
#include "dqd/net.hpp"
#include "dqd/pipeline.hpp"
#include "dqd/rng.hpp"

using namespace dqd;

namespace {

double now_seconds() {
    using clock = std::chrono::steady_clock;
    return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

std::vector<std::string> make_lexicon(std::size_t n) {
    static const char* kRoots[] = {"install", "update", "window", "network", "python",
                                   "laptop", "driver", "screen", "format", "error",
                                   "file", "boot", "sound", "mouse", "kernel"};
    std::vector<std::string> words;
    words.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        words.push_back(std::string(kRoots[i % 15]) + std::to_string(i / 15));
    }
    return words;
}

std::vector<ProcessedPair> make_corpus(std::size_t n_pairs, std::uint64_t seed) {
    auto words = make_lexicon(400);
    Rng rng(seed);
    std::vector<ProcessedPair> out;
    out.reserve(n_pairs);
    for (std::size_t i = 0; i < n_pairs; ++i) {
        QuestionPair qp;
        qp.id = static_cast<std::int64_t>(i);
        qp.source = Source::Synthetic;
        qp.label = static_cast<int>(rng.next_below(2));
        auto sentence = [&](std::size_t len) {
            std::string s = "how do i";
            for (std::size_t k = 0; k < len; ++k) {
                s += " " + words[rng.next_below(words.size())];
            }
            return s + "?";
        };
        qp.q1_raw = sentence(4 + rng.next_below(8));
        qp.q2_raw = qp.label ? qp.q1_raw + " please"
                             : sentence(4 + rng.next_below(8));
        out.push_back(preprocess_pair(qp));
    }
    return out;
}

EmbeddingTable make_table(const std::vector<ProcessedPair>& pairs, std::size_t dim,
                          std::uint64_t seed) {
    EmbeddingTable table;
    table.dim = dim;
    Rng rng(seed);
    for (const auto& p : pairs) {
        for (const auto* q : {&p.q1, &p.q2}) {
            for (const auto& tok : q->tokens) {
                if (table.find(tok)) continue;
                std::vector<double> v(dim);
                for (auto& x : v) x = rng.uniform(-0.5, 0.5);
                table.entries.emplace(tok, std::move(v));
            }
        }
    }
    return table;
}

bool bitwise_equal(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) return false;
    return std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

void report(const char* name, double serial_s, double parallel_s, bool match) {
    std::printf("%-22s serial %8.3fs  parallel %8.3fs  speedup %5.2fx  match %s\n",
                name, serial_s, parallel_s,
                parallel_s > 0 ? serial_s / parallel_s : 0.0,
                match ? "yes" : "NO");
}

}  // namespace

int main(int argc, char** argv) {
    std::size_t n_pairs = 4000;
    if (argc > 1) n_pairs = static_cast<std::size_t>(std::stoul(argv[1]));

#ifdef DQD_HAVE_OPENMP
    std::printf("openmp enabled, max threads %d\n", omp_get_max_threads());
#else
    std::printf("openmp disabled at build time; parallel paths run serially\n");
#endif
    std::printf("synthetic corpus: %zu pairs\n\n", n_pairs);

    auto pairs = make_corpus(n_pairs, 42);
    auto table = make_table(pairs, 50, 43);
    IdfTable idf = build_idf(pairs);
    PairGraph graph = build_pair_graph(pairs);
    FeatureContext ctx{&idf, &table, &graph};

    bool all_match = true;

    // feature extraction
    {
        double t0 = now_seconds();
        FeatureMatrix serial = featurize_corpus(pairs, ctx, /*parallel=*/false);
        double t1 = now_seconds();
        FeatureMatrix parallel = featurize_corpus(pairs, ctx, /*parallel=*/true);
        double t2 = now_seconds();
        bool match = serial.rows.size() == parallel.rows.size();
        for (std::size_t i = 0; match && i < serial.rows.size(); ++i) {
            match = std::memcmp(serial.rows[i].data(), parallel.rows[i].data(),
                                sizeof(FeatureVector)) == 0;
        }
        report("featurize_corpus", t1 - t0, t2 - t1, match);
        all_match = all_match && match;

        // boosted-tree training (split search dominates)
        GbtParams params;
        params.rounds = 30;
        params.max_depth = 6;
        params.seed = 7;
        GbtTrainOptions serial_opts;
        serial_opts.parallel = false;
        double t3 = now_seconds();
        TreeEnsemble m_serial = train_gbt(serial, params, serial_opts);
        double t4 = now_seconds();
        TreeEnsemble m_parallel = train_gbt(serial, params, {});
        double t5 = now_seconds();
        auto p_serial = predict_gbt_batch(m_serial, serial, false);
        auto p_parallel = predict_gbt_batch(m_parallel, serial, true);
        report("train_gbt", t4 - t3, t5 - t4, bitwise_equal(p_serial, p_parallel));
        all_match = all_match && bitwise_equal(p_serial, p_parallel);

        // batch tree prediction on its own
        double t6 = now_seconds();
        for (int r = 0; r < 20; ++r) p_serial = predict_gbt_batch(m_serial, serial, false);
        double t7 = now_seconds();
        for (int r = 0; r < 20; ++r) p_parallel = predict_gbt_batch(m_serial, serial, true);
        double t8 = now_seconds();
        report("predict_gbt_batch", t7 - t6, t8 - t7, bitwise_equal(p_serial, p_parallel));
        all_match = all_match && bitwise_equal(p_serial, p_parallel);
    }

    // batch network inference
    {
        Vocab vocab = build_vocab(pairs, 1);
        SnnSpec spec;
        spec.vocab_size = vocab.size();
        spec.encoder = EncoderKind::Lstm;
        spec.seed = 11;
        SnnModel model{spec, init_params(spec, &vocab, &table)};
        std::vector<EncodedPair> encoded;
        encoded.reserve(pairs.size());
        for (const auto& p : pairs) encoded.push_back(encode_pair(vocab, p, spec.max_len));

        double t0 = now_seconds();
        auto serial = predict_snn(model, encoded, false);
        double t1 = now_seconds();
        auto parallel = predict_snn(model, encoded, true);
        double t2 = now_seconds();
        report("predict_snn", t1 - t0, t2 - t1, bitwise_equal(serial, parallel));
        all_match = all_match && bitwise_equal(serial, parallel);
    }

    return all_match ? 0 : 1;
}
