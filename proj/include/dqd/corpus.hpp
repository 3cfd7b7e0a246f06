#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace dqd {

enum class Source { Quora, AskUbuntu, EnglishSE, Synthetic };

std::string source_name(Source s);
std::optional<Source> source_from_name(const std::string& name);

struct QuestionPair {
    std::int64_t id = 0;
    std::string q1_raw;
    std::string q2_raw;
    int label = 0;  // 1 = duplicate
    Source source = Source::Synthetic;
};

// Token views at each pipeline stage.
struct ProcessedQuestion {
    std::string raw;
    std::string expanded;
    std::vector<std::string> tokens;
    std::vector<std::string> tokens_no_stop;
    std::vector<std::string> lemmas;
    std::vector<std::string> stems;
};

struct ProcessedPair {
    std::int64_t id = 0;
    int label = 0;
    Source source = Source::Synthetic;
    ProcessedQuestion q1;
    ProcessedQuestion q2;
};

struct LoadTally {
    std::size_t rows_read = 0;
    std::size_t skipped_bad_label = 0;
    std::size_t skipped_missing_text = 0;
    std::size_t skipped_malformed = 0;
};

struct FilterTally {
    std::size_t kept = 0;
    std::size_t dropped_empty = 0;
    std::size_t dropped_non_english = 0;
};

struct DatasetSplit {
    std::vector<ProcessedPair> train;
    std::vector<ProcessedPair> validation;
    std::vector<ProcessedPair> test;
    std::uint64_t seed = 0;
};

struct DatasetStats {
    std::size_t pair_count = 0;
    std::size_t max_wpq = 0;
    double mean_wpq = 0.0;
};

// Quora public release: tab-separated, header
// id qid1 qid2 question1 question2 is_duplicate.
std::vector<QuestionPair> load_quora_tsv(const std::string& path, LoadTally* tally = nullptr);

// Stack Exchange dump: positives are title pairs joined by duplicate links
// (LinkTypeId=3), negatives are seeded random unlinked question pairs,
// count = round(negative_ratio * positives).
std::vector<QuestionPair> load_stackexchange(const std::string& posts_path,
                                             const std::string& postlinks_path,
                                             double negative_ratio,
                                             std::uint64_t seed,
                                             Source source,
                                             LoadTally* tally = nullptr);

// expand -> tokenize -> stopword-remove -> lemmatize -> stem.
ProcessedQuestion preprocess(const std::string& raw);

ProcessedPair preprocess_pair(const QuestionPair& pair);

// Drops pairs with an empty side after preprocessing or a non-English side.
std::vector<ProcessedPair> filter_pairs(const std::vector<ProcessedPair>& pairs,
                                        FilterTally* tally = nullptr);

// Seeded shuffle, cut at floor(0.6 n) and floor(0.8 n); remainder to test.
DatasetSplit split_dataset(std::vector<ProcessedPair> pairs, std::uint64_t seed);

DatasetStats dataset_stats(const std::vector<ProcessedPair>& pairs);

// Line-delimited cache; first line is a format tag.
void save_corpus_cache(const std::string& path, const std::vector<ProcessedPair>& pairs);
std::vector<ProcessedPair> load_corpus_cache(const std::string& path);

}  // namespace dqd
