#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "dqd/corpus.hpp"
#include "dqd/embeddings.hpp"

namespace dqd {

inline constexpr std::size_t kFeatureCount = 42;
inline constexpr const char* kCatalogVersion = "catalog_v1";

using FeatureVector = std::array<double, kFeatureCount>;

enum class FeatureKind { Distance, Similarity, Other };

struct FeatureInfo {
    std::size_t index;
    const char* name;
    const char* block;     // lexical | tfidf | wmd | embedding | graph
    const char* range;
    FeatureKind kind;
    bool symmetric;        // featurize(q1,q2) == featurize(q2,q1) at this slot
};

const std::array<FeatureInfo, kFeatureCount>& feature_catalog();
void save_feature_catalog(const std::string& path);

// idf(t) = ln((N+1)/(df+1)) + 1 with N = number of training questions.
// Built from the training split only.
struct IdfTable {
    std::size_t num_questions = 0;
    std::unordered_map<std::string, double> idf;

    double lookup(const std::string& token) const;
};

IdfTable build_idf(const std::vector<ProcessedPair>& train_pairs);

// Label-blind co-occurrence graph over question texts (exact-match nodes).
class PairGraph {
public:
    void add_pair(const std::string& q1_raw, const std::string& q2_raw);

    bool has_node(const std::string& q) const { return adjacency_.count(q) > 0; }
    std::size_t degree(const std::string& q) const;
    const std::unordered_set<std::string>* neighbors(const std::string& q) const;
    std::size_t node_count() const { return adjacency_.size(); }
    std::size_t edge_count() const { return edge_count_; }

private:
    std::unordered_map<std::string, std::unordered_set<std::string>> adjacency_;
    std::size_t edge_count_ = 0;
};

PairGraph build_pair_graph(const std::vector<ProcessedPair>& all_pairs);

struct FeatureContext {
    const IdfTable* idf = nullptr;
    const EmbeddingTable* table = nullptr;
    const PairGraph* graph = nullptr;  // null disables the graph block (zeros)
};

// Sub-blocks, exposed for oracle tests.
std::array<double, 17> lexical_features(const ProcessedQuestion& p1,
                                        const ProcessedQuestion& p2);
std::array<double, 4> tfidf_features(const ProcessedQuestion& p1,
                                     const ProcessedQuestion& p2,
                                     const IdfTable& idf);
std::array<double, 15> embedding_distance_features(const ProcessedQuestion& p1,
                                                   const ProcessedQuestion& p2,
                                                   const EmbeddingTable& table,
                                                   const IdfTable& idf);
std::array<double, 4> graph_features(const PairGraph& graph,
                                     const std::string& q1_raw,
                                     const std::string& q2_raw);

FeatureVector featurize_pair(const ProcessedPair& pair, const FeatureContext& ctx);

struct FeatureMatrix {
    std::vector<FeatureVector> rows;
    std::vector<int> labels;
};

// Row order matches the input order regardless of `parallel`.
FeatureMatrix featurize_corpus(const std::vector<ProcessedPair>& pairs,
                               const FeatureContext& ctx,
                               bool parallel = true);

void save_feature_matrix(const std::string& path, const FeatureMatrix& m,
                         const std::string& dataset_id, const std::string& split);
FeatureMatrix load_feature_matrix(const std::string& path);

// String similarity helpers used by the lexical block.
std::size_t levenshtein(const std::string& a, const std::string& b);
double levenshtein_ratio(const std::string& a, const std::string& b);
std::size_t longest_common_substring(const std::string& a, const std::string& b);

}  // namespace dqd
