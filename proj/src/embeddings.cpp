#include "dqd/embeddings.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace dqd {

EmbeddingTable load_text_embeddings(const std::string& path, std::size_t expected_dim) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open embeddings file: " + path);

    EmbeddingTable table;
    table.dim = expected_dim;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string word;
        ss >> word;
        std::vector<double> vec;
        vec.reserve(expected_dim);
        double v;
        while (ss >> v) vec.push_back(v);
        if (vec.size() != expected_dim) {
            throw std::runtime_error("embedding row at line " + std::to_string(line_no) +
                                     " has " + std::to_string(vec.size()) +
                                     " values, expected " + std::to_string(expected_dim));
        }
        if (!table.entries.emplace(word, std::move(vec)).second) {
            ++table.duplicate_rows;  // first occurrence wins
        }
    }
    return table;
}

Vocab build_vocab(const std::vector<ProcessedPair>& corpus, std::size_t min_count) {
    if (min_count < 1) throw std::runtime_error("min_count must be >= 1");
    std::map<std::string, std::size_t> freq;  // ordered map fixes the tie order
    for (const auto& p : corpus) {
        for (const auto* q : {&p.q1, &p.q2}) {
            for (const auto& t : q->tokens) ++freq[t];
        }
    }
    std::vector<std::pair<std::string, std::size_t>> items;
    for (const auto& [tok, n] : freq) {
        if (n >= min_count) items.emplace_back(tok, n);
    }
    std::stable_sort(items.begin(), items.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });

    Vocab vocab;
    vocab.min_count = min_count;
    for (const auto& [tok, n] : items) {
        vocab.index.emplace(tok, static_cast<std::uint32_t>(vocab.size()));
        vocab.tokens.push_back(tok);
        vocab.counts.push_back(n);
    }
    return vocab;
}

std::vector<std::uint32_t> encode_sequence(const Vocab& vocab,
                                           const std::vector<std::string>& tokens,
                                           std::size_t max_len) {
    if (max_len < 1) throw std::runtime_error("max_len must be >= 1");
    std::vector<std::uint32_t> ids(max_len, Vocab::kPad);
    std::size_t n = std::min(tokens.size(), max_len);
    for (std::size_t i = 0; i < n; ++i) ids[i] = vocab.lookup(tokens[i]);
    return ids;
}

EncodedPair encode_pair(const Vocab& vocab, const ProcessedPair& pair, std::size_t max_len) {
    EncodedPair e;
    e.q1_ids = encode_sequence(vocab, pair.q1.tokens, max_len);
    e.q2_ids = encode_sequence(vocab, pair.q2.tokens, max_len);
    e.label = pair.label;
    return e;
}

std::vector<double> mean_vector(const EmbeddingTable& table,
                                const std::vector<std::string>& tokens,
                                const std::vector<double>* weights) {
    std::vector<double> sum(table.dim, 0.0);
    double total = 0.0;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        const auto* vec = table.find(tokens[i]);
        if (!vec) continue;
        double w = weights ? (*weights)[i] : 1.0;
        for (std::size_t d = 0; d < table.dim; ++d) sum[d] += w * (*vec)[d];
        total += w;
    }
    if (total != 0.0) {
        for (auto& v : sum) v /= total;
    }
    return sum;
}

void save_vocab(const std::string& path, const Vocab& vocab) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write vocab: " + path);
    for (std::size_t i = 0; i < vocab.tokens.size(); ++i) {
        out << vocab.tokens[i] << "\t" << (i + 2) << "\t" << vocab.counts[i] << "\n";
    }
}

Vocab load_vocab(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open vocab: " + path);
    Vocab vocab;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string tok;
        std::uint32_t idx;
        std::size_t count;
        if (!(ss >> tok >> idx >> count)) throw std::runtime_error("bad vocab line: " + line);
        if (idx != vocab.size()) throw std::runtime_error("vocab indices not dense");
        vocab.index.emplace(tok, idx);
        vocab.tokens.push_back(tok);
        vocab.counts.push_back(count);
    }
    return vocab;
}

}  // namespace dqd
