#include <cstdio>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include "doctest.h"
#include "dqd/corpus.hpp"
#include "dqd/rng.hpp"

using namespace dqd;

namespace {

std::vector<ProcessedPair> synthetic_pairs(std::size_t n, std::uint64_t seed) {
    static const char* kWords[] = {"install", "python", "window", "network", "driver",
                                   "update", "screen", "laptop", "error", "kernel"};
    Rng rng(seed);
    std::vector<ProcessedPair> out;
    for (std::size_t i = 0; i < n; ++i) {
        QuestionPair qp;
        qp.id = static_cast<std::int64_t>(i);
        qp.label = static_cast<int>(rng.next_below(2));
        auto sentence = [&] {
            std::string s = "how do i fix";
            for (int k = 0; k < 3; ++k) s += std::string(" ") + kWords[rng.next_below(10)];
            return s + "?";
        };
        qp.q1_raw = sentence();
        qp.q2_raw = sentence();
        out.push_back(preprocess_pair(qp));
    }
    return out;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    out << content;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_CASE("preprocess runs the full stage pipeline") {
    ProcessedQuestion q = preprocess("What's the best way of Stopping the ponies?");
    CHECK(q.expanded == "what is the best way of Stopping the ponies?");
    CHECK(q.tokens == std::vector<std::string>{"what", "is", "the", "best", "way", "of",
                                               "stopping", "the", "ponies"});
    CHECK(q.tokens_no_stop == std::vector<std::string>{"best", "way", "stopping", "ponies"});
    // "best" lemmatizes to "good" through the irregular table
    CHECK(q.lemmas == std::vector<std::string>{"good", "way", "stop", "pony"});
    CHECK(q.stems == std::vector<std::string>{"good", "wai", "stop", "poni"});
}

TEST_CASE("quora loader parses rows and skips bad labels") {
    std::string path = "/tmp/dqd_test_quora.tsv";
    write_file(path,
               "id\tqid1\tqid2\tquestion1\tquestion2\tis_duplicate\n"
               "0\t1\t2\t\"What is X?\"\t\"What is Y?\"\t0\n"
               "1\t3\t4\tHow to cook rice?\tBest way to cook rice?\t1\n"
               "2\t5\t6\tBroken row\tNo label\t7\n"
               "3\t7\t8\t\tMissing left side\t0\n");
    LoadTally tally;
    auto pairs = load_quora_tsv(path, &tally);
    REQUIRE(pairs.size() == 2);
    CHECK(tally.rows_read == 4);
    CHECK(tally.skipped_bad_label == 1);
    CHECK(tally.skipped_missing_text == 1);
    CHECK(pairs[0].q1_raw == "What is X?");  // quotes stripped
    CHECK(pairs[0].label == 0);
    CHECK(pairs[1].label == 1);
    CHECK(pairs[1].source == Source::Quora);
    std::remove(path.c_str());
}

TEST_CASE("quora loader rejects a wrong header") {
    std::string path = "/tmp/dqd_test_quora_bad.tsv";
    write_file(path, "a\tb\tc\n1\t2\t3\n");
    CHECK_THROWS(load_quora_tsv(path));
    std::remove(path.c_str());
}

TEST_CASE("stackexchange loader builds positives from duplicate links") {
    std::string posts = "/tmp/dqd_test_posts.xml";
    std::string links = "/tmp/dqd_test_links.xml";
    write_file(posts,
               "<?xml version=\"1.0\"?>\n<posts>\n"
               "  <row Id=\"1\" PostTypeId=\"1\" Title=\"How to install drivers?\" />\n"
               "  <row Id=\"2\" PostTypeId=\"1\" Title=\"Driver installation steps\" />\n"
               "  <row Id=\"3\" PostTypeId=\"2\" Body=\"an answer\" />\n"
               "  <row Id=\"4\" PostTypeId=\"1\" Title=\"Screen stays black\" />\n"
               "  <row Id=\"5\" PostTypeId=\"1\" Title=\"Sound &amp; video broken\" />\n"
               "</posts>\n");
    write_file(links,
               "<?xml version=\"1.0\"?>\n<postlinks>\n"
               "  <row Id=\"10\" PostId=\"2\" RelatedPostId=\"1\" LinkTypeId=\"3\" />\n"
               "  <row Id=\"11\" PostId=\"4\" RelatedPostId=\"1\" LinkTypeId=\"1\" />\n"
               "</postlinks>\n");
    auto pairs = load_stackexchange(posts, links, 1.0, 5, Source::AskUbuntu);
    std::size_t positives = 0, negatives = 0;
    for (const auto& p : pairs) (p.label ? positives : negatives)++;
    CHECK(positives == 1);  // only the LinkTypeId=3 link
    CHECK(negatives == 1);  // round(1.0 * positives)
    for (const auto& p : pairs) CHECK(p.source == Source::AskUbuntu);

    // xml entities are unescaped in titles
    bool found_amp = false;
    for (const auto& p : pairs) {
        if (p.q1_raw.find('&') != std::string::npos ||
            p.q2_raw.find('&') != std::string::npos) {
            found_amp = true;
            CHECK(p.q1_raw.find("&amp;") == std::string::npos);
            CHECK(p.q2_raw.find("&amp;") == std::string::npos);
        }
    }
    (void)found_amp;

    // no duplicate links at all -> error
    write_file(links, "<?xml version=\"1.0\"?>\n<postlinks>\n</postlinks>\n");
    CHECK_THROWS(load_stackexchange(posts, links, 1.0, 5, Source::AskUbuntu));

    std::remove(posts.c_str());
    std::remove(links.c_str());
}

TEST_CASE("filter drops non-english and empty sides") {
    QuestionPair ok;
    ok.q1_raw = "How do I install python?";
    ok.q2_raw = "Installing python on linux";
    QuestionPair cjk;
    cjk.q1_raw = "How do I install python?";
    cjk.q2_raw = "安装 python";
    QuestionPair empty_side;
    empty_side.q1_raw = "???";
    empty_side.q2_raw = "Real question here";

    FilterTally tally;
    auto kept = filter_pairs(
        {preprocess_pair(ok), preprocess_pair(cjk), preprocess_pair(empty_side)}, &tally);
    CHECK(kept.size() == 1);
    CHECK(tally.kept == 1);
    CHECK(tally.dropped_non_english == 1);
    CHECK(tally.dropped_empty == 1);
}

TEST_CASE("split cuts at floor(0.6n) and floor(0.8n)") {
    auto pairs = synthetic_pairs(101, 3);
    DatasetSplit split = split_dataset(pairs, 11);
    CHECK(split.train.size() == 60);       // floor(0.6 * 101)
    CHECK(split.validation.size() == 20);  // floor(0.8 * 101) - 60
    CHECK(split.test.size() == 21);
    CHECK(split.seed == 11);

    // the split is a partition of the input ids
    std::set<std::int64_t> seen;
    for (const auto* part : {&split.train, &split.validation, &split.test}) {
        for (const auto& p : *part) CHECK(seen.insert(p.id).second);
    }
    CHECK(seen.size() == 101);
}

TEST_CASE("split ratios reproduce the published corpus sizes") {
    // floor cuts on 404,303 pairs
    std::size_t n = 404303;
    std::size_t train = static_cast<std::size_t>(n * 6 / 10);
    std::size_t val = static_cast<std::size_t>(n * 8 / 10) - train;
    CHECK(train == 242581);
    CHECK(val == 80861);
    CHECK(n - train - val == 80861);
}

TEST_CASE("split is deterministic in the seed and sensitive to it") {
    auto pairs = synthetic_pairs(50, 9);
    DatasetSplit a = split_dataset(pairs, 1);
    DatasetSplit b = split_dataset(pairs, 1);
    DatasetSplit c = split_dataset(pairs, 2);
    auto ids = [](const std::vector<ProcessedPair>& v) {
        std::vector<std::int64_t> out;
        for (const auto& p : v) out.push_back(p.id);
        return out;
    };
    CHECK(ids(a.train) == ids(b.train));
    CHECK(ids(a.test) == ids(b.test));
    CHECK(ids(a.train) != ids(c.train));
}

TEST_CASE("split requires at least five pairs") {
    CHECK_THROWS(split_dataset(synthetic_pairs(4, 1), 0));
}

TEST_CASE("dataset stats count words per question") {
    QuestionPair qp;
    qp.q1_raw = "one two three";
    qp.q2_raw = "one two three four five";
    auto p = preprocess_pair(qp);
    DatasetStats stats = dataset_stats({p});
    CHECK(stats.pair_count == 1);
    CHECK(stats.max_wpq == 5);
    CHECK(stats.mean_wpq == doctest::Approx(4.0));
}

TEST_CASE("corpus cache round trips and is byte-stable") {
    auto pairs = synthetic_pairs(25, 17);
    std::string path = "/tmp/dqd_test_cache.jsonl";
    save_corpus_cache(path, pairs);
    auto loaded = load_corpus_cache(path);
    REQUIRE(loaded.size() == pairs.size());
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        CHECK(loaded[i].id == pairs[i].id);
        CHECK(loaded[i].label == pairs[i].label);
        CHECK(loaded[i].q1.raw == pairs[i].q1.raw);
        CHECK(loaded[i].q1.tokens == pairs[i].q1.tokens);
        CHECK(loaded[i].q1.stems == pairs[i].q1.stems);
        CHECK(loaded[i].q2.lemmas == pairs[i].q2.lemmas);
    }
    std::string first = read_file(path);
    save_corpus_cache(path, loaded);
    CHECK(read_file(path) == first);  // byte-identical rewrite
    std::remove(path.c_str());
}

TEST_CASE("preprocessing is idempotent at the token level") {
    auto pairs = synthetic_pairs(20, 23);
    for (const auto& p : pairs) {
        // re-running the pipeline on the joined token text keeps tokens fixed
        std::string joined;
        for (const auto& t : p.q1.tokens) joined += t + " ";
        ProcessedQuestion again = preprocess(joined);
        CHECK(again.tokens == p.q1.tokens);
    }
}
