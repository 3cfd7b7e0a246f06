#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "dqd/corpus.hpp"

namespace dqd {

struct EmbeddingTable {
    std::size_t dim = 0;
    std::unordered_map<std::string, std::vector<double>> entries;
    std::size_t duplicate_rows = 0;  // later occurrences dropped at load

    const std::vector<double>* find(const std::string& token) const {
        auto it = entries.find(token);
        return it == entries.end() ? nullptr : &it->second;
    }
};

// Index 0 = padding, 1 = out-of-vocabulary.
struct Vocab {
    static constexpr std::uint32_t kPad = 0;
    static constexpr std::uint32_t kOov = 1;

    std::unordered_map<std::string, std::uint32_t> index;
    std::vector<std::string> tokens;  // tokens[i-2] is the token at index i
    std::vector<std::size_t> counts;  // parallel to tokens
    std::size_t min_count = 1;

    std::size_t size() const { return tokens.size() + 2; }
    std::uint32_t lookup(const std::string& token) const {
        auto it = index.find(token);
        return it == index.end() ? kOov : it->second;
    }
};

struct EncodedPair {
    std::vector<std::uint32_t> q1_ids;
    std::vector<std::uint32_t> q2_ids;
    int label = 0;
};

// Text format: one line per word, the word then `expected_dim` decimals.
EmbeddingTable load_text_embeddings(const std::string& path, std::size_t expected_dim);

// Tokens with frequency >= min_count, ordered by (frequency desc, token asc).
// Counts the `tokens` stage of both questions of every pair.
Vocab build_vocab(const std::vector<ProcessedPair>& corpus, std::size_t min_count);

std::vector<std::uint32_t> encode_sequence(const Vocab& vocab,
                                           const std::vector<std::string>& tokens,
                                           std::size_t max_len);

EncodedPair encode_pair(const Vocab& vocab, const ProcessedPair& pair, std::size_t max_len);

// Weighted mean of in-table vectors; zero vector when nothing matches.
std::vector<double> mean_vector(const EmbeddingTable& table,
                                const std::vector<std::string>& tokens,
                                const std::vector<double>* weights = nullptr);

void save_vocab(const std::string& path, const Vocab& vocab);
Vocab load_vocab(const std::string& path);

}  // namespace dqd
