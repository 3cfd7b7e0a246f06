#include "dqd/features.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "dqd/wmd.hpp"

namespace dqd {

namespace {

std::string join_tokens(const std::vector<std::string>& tokens) {
    std::string s;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (i) s += ' ';
        s += tokens[i];
    }
    return s;
}

std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

std::size_t levenshtein(const std::string& a, const std::string& b) {
    if (a.empty()) return b.size();
    if (b.empty()) return a.size();
    std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
    for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
    for (std::size_t i = 1; i <= a.size(); ++i) {
        cur[0] = i;
        for (std::size_t j = 1; j <= b.size(); ++j) {
            std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
            cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
        }
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

double levenshtein_ratio(const std::string& a, const std::string& b) {
    if (a.empty() && b.empty()) return 1.0;
    std::size_t longer = std::max(a.size(), b.size());
    return 1.0 - static_cast<double>(levenshtein(a, b)) / static_cast<double>(longer);
}

std::size_t longest_common_substring(const std::string& a, const std::string& b) {
    if (a.empty() || b.empty()) return 0;
    std::vector<std::size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
    std::size_t best = 0;
    for (std::size_t i = 1; i <= a.size(); ++i) {
        cur[0] = 0;
        for (std::size_t j = 1; j <= b.size(); ++j) {
            cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : 0;
            best = std::max(best, cur[j]);
        }
        std::swap(prev, cur);
    }
    return best;
}

namespace {

// Best equal-length window of the longer string against the shorter one.
double partial_ratio(const std::string& a, const std::string& b) {
    const std::string& s = a.size() <= b.size() ? a : b;
    const std::string& l = a.size() <= b.size() ? b : a;
    if (s.empty()) return l.empty() ? 1.0 : 0.0;
    double best = 0.0;
    for (std::size_t i = 0; i + s.size() <= l.size(); ++i) {
        best = std::max(best, levenshtein_ratio(s, l.substr(i, s.size())));
        if (best == 1.0) break;
    }
    return best;
}

std::set<std::string> token_set(const std::vector<std::string>& tokens) {
    return {tokens.begin(), tokens.end()};
}

std::string join_set(const std::set<std::string>& s) {
    std::string out;
    for (const auto& t : s) {
        if (!out.empty()) out += ' ';
        out += t;
    }
    return out;
}

double token_set_ratio(const std::set<std::string>& s1, const std::set<std::string>& s2) {
    std::set<std::string> inter, d1, d2;
    std::set_intersection(s1.begin(), s1.end(), s2.begin(), s2.end(),
                          std::inserter(inter, inter.end()));
    std::set_difference(s1.begin(), s1.end(), s2.begin(), s2.end(),
                        std::inserter(d1, d1.end()));
    std::set_difference(s2.begin(), s2.end(), s1.begin(), s1.end(),
                        std::inserter(d2, d2.end()));
    std::string t0 = join_set(inter);
    std::string t1 = t0;
    if (!d1.empty()) t1 += (t1.empty() ? "" : " ") + join_set(d1);
    std::string t2 = t0;
    if (!d2.empty()) t2 += (t2.empty() ? "" : " ") + join_set(d2);
    return std::max({levenshtein_ratio(t0, t1), levenshtein_ratio(t0, t2),
                     levenshtein_ratio(t1, t2)});
}

}  // namespace

std::array<double, 17> lexical_features(const ProcessedQuestion& p1,
                                        const ProcessedQuestion& p2) {
    const auto& t1 = p1.tokens;
    const auto& t2 = p2.tokens;
    std::string s1 = join_tokens(t1);
    std::string s2 = join_tokens(t2);
    auto set1 = token_set(t1);
    auto set2 = token_set(t2);

    std::size_t common = 0;
    for (const auto& t : set1) common += set2.count(t);
    std::size_t uni = set1.size() + set2.size() - common;

    double n1 = static_cast<double>(t1.size());
    double n2 = static_cast<double>(t2.size());

    std::array<double, 17> f{};
    f[0] = n1;
    f[1] = n2;
    f[2] = std::abs(n1 - n2);
    f[3] = (t1.empty() && t2.empty()) ? 1.0 : std::min(n1, n2) / std::max(n1, n2);
    f[4] = static_cast<double>(s1.size());
    f[5] = static_cast<double>(s2.size());
    f[6] = static_cast<double>(common);
    f[7] = uni == 0 ? 1.0 : static_cast<double>(common) / static_cast<double>(uni);
    f[8] = (set1.empty() && set2.empty())
               ? 1.0
               : 2.0 * static_cast<double>(common) /
                     static_cast<double>(set1.size() + set2.size());
    if (set1.empty() && set2.empty()) {
        f[9] = 1.0;
    } else if (set1.empty() || set2.empty()) {
        f[9] = 0.0;
    } else {
        f[9] = static_cast<double>(common) /
               static_cast<double>(std::min(set1.size(), set2.size()));
    }
    f[10] = (t1.empty() && t2.empty()) ? 1.0
            : (t1.empty() || t2.empty()) ? 0.0
                                         : (t1.front() == t2.front() ? 1.0 : 0.0);
    f[11] = (t1.empty() && t2.empty()) ? 1.0
            : (t1.empty() || t2.empty()) ? 0.0
                                         : (t1.back() == t2.back() ? 1.0 : 0.0);
    f[12] = levenshtein_ratio(s1, s2);
    f[13] = partial_ratio(s1, s2);
    {
        auto sorted1 = t1;
        auto sorted2 = t2;
        std::sort(sorted1.begin(), sorted1.end());
        std::sort(sorted2.begin(), sorted2.end());
        f[14] = levenshtein_ratio(join_tokens(sorted1), join_tokens(sorted2));
    }
    f[15] = token_set_ratio(set1, set2);
    f[16] = (s1.empty() && s2.empty())
                ? 1.0
                : static_cast<double>(longest_common_substring(s1, s2)) /
                      static_cast<double>(std::max(s1.size(), s2.size()));
    return f;
}

double IdfTable::lookup(const std::string& token) const {
    auto it = idf.find(token);
    if (it != idf.end()) return it->second;
    // Unseen token: df = 0.
    return std::log(static_cast<double>(num_questions + 1)) + 1.0;
}

IdfTable build_idf(const std::vector<ProcessedPair>& train_pairs) {
    IdfTable table;
    table.num_questions = train_pairs.size() * 2;
    std::unordered_map<std::string, std::size_t> df;
    for (const auto& p : train_pairs) {
        for (const auto* q : {&p.q1, &p.q2}) {
            std::set<std::string> uniq(q->tokens.begin(), q->tokens.end());
            for (const auto& t : uniq) ++df[t];
        }
    }
    double n = static_cast<double>(table.num_questions);
    for (const auto& [tok, d] : df) {
        table.idf[tok] = std::log((n + 1.0) / (static_cast<double>(d) + 1.0)) + 1.0;
    }
    return table;
}

std::array<double, 4> tfidf_features(const ProcessedQuestion& p1,
                                     const ProcessedQuestion& p2,
                                     const IdfTable& idf) {
    std::map<std::string, double> w1, w2;
    for (const auto& t : p1.tokens) w1[t] += 1.0;
    for (const auto& t : p2.tokens) w2[t] += 1.0;
    for (auto& [t, w] : w1) w *= idf.lookup(t);
    for (auto& [t, w] : w2) w *= idf.lookup(t);

    std::set<std::string> uni;
    for (const auto& [t, w] : w1) uni.insert(t);
    for (const auto& [t, w] : w2) uni.insert(t);

    double dot = 0.0, n1 = 0.0, n2 = 0.0, l1 = 0.0, l2 = 0.0;
    for (const auto& t : uni) {
        double a = w1.count(t) ? w1.at(t) : 0.0;
        double b = w2.count(t) ? w2.at(t) : 0.0;
        dot += a * b;
        n1 += a * a;
        n2 += b * b;
        l1 += std::abs(a - b);
        l2 += (a - b) * (a - b);
    }

    std::array<double, 4> f{};
    if (w1 == w2) {
        f[0] = 0.0;  // identical weight maps are exactly distance 0
    } else if (n1 == 0.0 || n2 == 0.0) {
        f[0] = 1.0;
    } else {
        f[0] = std::clamp(1.0 - dot / std::sqrt(n1 * n2), 0.0, 1.0);
    }
    f[1] = l1;
    f[2] = std::sqrt(l2);

    std::set<std::string> set1, set2;
    for (const auto& [t, w] : w1) set1.insert(t);
    for (const auto& [t, w] : w2) set2.insert(t);
    double shared = 0.0, total = 0.0;
    for (const auto& t : uni) {
        double v = idf.lookup(t);
        total += v;
        if (set1.count(t) && set2.count(t)) shared += v;
    }
    f[3] = total == 0.0 ? 1.0 : shared / total;
    return f;
}

namespace {

double cosine_distance(const std::vector<double>& a, const std::vector<double>& b) {
    if (a == b) {
        bool zero = std::all_of(a.begin(), a.end(), [](double v) { return v == 0.0; });
        return zero ? 1.0 : 0.0;
    }
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    if (na == 0.0 || nb == 0.0) return 1.0;
    return std::clamp(1.0 - dot / std::sqrt(na * nb), 0.0, 2.0);
}

double cityblock(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
    return s;
}

double euclidean_d(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(s);
}

double minkowski3(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double d = std::abs(a[i] - b[i]);
        s += d * d * d;
    }
    return std::cbrt(s);
}

double canberra(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double denom = std::abs(a[i]) + std::abs(b[i]);
        if (denom > 0.0) s += std::abs(a[i] - b[i]) / denom;
    }
    return s;
}

double braycurtis(const std::vector<double>& a, const std::vector<double>& b) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        num += std::abs(a[i] - b[i]);
        den += std::abs(a[i] + b[i]);
    }
    if (den == 0.0) return num == 0.0 ? 0.0 : 1.0;
    return num / den;
}

double correlation_distance(const std::vector<double>& a, const std::vector<double>& b) {
    if (a == b) {
        // Constant vectors have no defined correlation; sentinel applies.
        double first = a.empty() ? 0.0 : a[0];
        bool constant = std::all_of(a.begin(), a.end(),
                                    [&](double v) { return v == first; });
        return constant ? 1.0 : 0.0;
    }
    std::size_t n = a.size();
    double ma = 0.0, mb = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        ma += a[i];
        mb += b[i];
    }
    ma /= static_cast<double>(n);
    mb /= static_cast<double>(n);
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        dot += (a[i] - ma) * (b[i] - mb);
        na += (a[i] - ma) * (a[i] - ma);
        nb += (b[i] - mb) * (b[i] - mb);
    }
    if (na == 0.0 || nb == 0.0) return 1.0;
    return std::clamp(1.0 - dot / std::sqrt(na * nb), 0.0, 2.0);
}

// Population skewness m3 / m2^1.5 and excess kurtosis m4 / m2^2 - 3.
std::pair<double, double> moments(const std::vector<double>& v) {
    if (v.empty()) return {0.0, 0.0};
    double n = static_cast<double>(v.size());
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= n;
    double m2 = 0.0, m3 = 0.0, m4 = 0.0;
    for (double x : v) {
        double d = x - mean;
        m2 += d * d;
        m3 += d * d * d;
        m4 += d * d * d * d;
    }
    m2 /= n;
    m3 /= n;
    m4 /= n;
    if (m2 == 0.0) return {0.0, 0.0};
    return {m3 / std::pow(m2, 1.5), m4 / (m2 * m2) - 3.0};
}

}  // namespace

std::array<double, 15> embedding_distance_features(const ProcessedQuestion& p1,
                                                   const ProcessedQuestion& p2,
                                                   const EmbeddingTable& table,
                                                   const IdfTable& idf) {
    std::vector<double> m1 = mean_vector(table, p1.tokens);
    std::vector<double> m2 = mean_vector(table, p2.tokens);

    std::vector<double> idf_w1, idf_w2;
    idf_w1.reserve(p1.tokens.size());
    for (const auto& t : p1.tokens) idf_w1.push_back(idf.lookup(t));
    idf_w2.reserve(p2.tokens.size());
    for (const auto& t : p2.tokens) idf_w2.push_back(idf.lookup(t));
    std::vector<double> w1 = mean_vector(table, p1.tokens, &idf_w1);
    std::vector<double> w2 = mean_vector(table, p2.tokens, &idf_w2);

    std::array<double, 15> f{};
    f[0] = cosine_distance(m1, m2);
    f[1] = cityblock(m1, m2);
    f[2] = euclidean_d(m1, m2);
    f[3] = minkowski3(m1, m2);
    f[4] = canberra(m1, m2);
    f[5] = braycurtis(m1, m2);
    f[6] = correlation_distance(m1, m2);
    f[7] = cosine_distance(w1, w2);
    f[8] = cityblock(w1, w2);
    f[9] = euclidean_d(w1, w2);
    f[10] = braycurtis(w1, w2);
    auto [sk1, ku1] = moments(m1);
    auto [sk2, ku2] = moments(m2);
    f[11] = sk1;
    f[12] = ku1;
    f[13] = sk2;
    f[14] = ku2;
    return f;
}

void PairGraph::add_pair(const std::string& q1_raw, const std::string& q2_raw) {
    auto& n1 = adjacency_[q1_raw];
    auto& n2 = adjacency_[q2_raw];
    if (q1_raw == q2_raw) return;  // node exists, no self-loop
    if (n1.insert(q2_raw).second) {
        n2.insert(q1_raw);
        ++edge_count_;
    }
}

std::size_t PairGraph::degree(const std::string& q) const {
    auto it = adjacency_.find(q);
    return it == adjacency_.end() ? 0 : it->second.size();
}

const std::unordered_set<std::string>* PairGraph::neighbors(const std::string& q) const {
    auto it = adjacency_.find(q);
    return it == adjacency_.end() ? nullptr : &it->second;
}

PairGraph build_pair_graph(const std::vector<ProcessedPair>& all_pairs) {
    PairGraph g;
    for (const auto& p : all_pairs) g.add_pair(p.q1.raw, p.q2.raw);
    return g;
}

std::array<double, 4> graph_features(const PairGraph& graph,
                                     const std::string& q1_raw,
                                     const std::string& q2_raw) {
    std::array<double, 4> f{};
    const auto* n1 = graph.neighbors(q1_raw);
    const auto* n2 = graph.neighbors(q2_raw);
    if (!n1 || !n2) return f;  // unseen question: zero block

    std::size_t common = 0, only1 = 0;
    for (const auto& n : *n1) {
        if (n == q2_raw) continue;
        if (n2->count(n) && n != q1_raw) {
            ++common;
        } else {
            ++only1;
        }
    }
    std::size_t only2 = 0;
    for (const auto& n : *n2) {
        if (n == q1_raw) continue;
        if (!(n1->count(n) && n != q2_raw)) ++only2;
    }
    std::size_t uni = common + only1 + only2;

    f[0] = static_cast<double>(common);
    f[1] = static_cast<double>(std::min(n1->size(), n2->size()));
    f[2] = static_cast<double>(std::max(n1->size(), n2->size()));
    f[3] = uni == 0 ? 1.0 : static_cast<double>(common) / static_cast<double>(uni);
    return f;
}

const std::array<FeatureInfo, kFeatureCount>& feature_catalog() {
    using K = FeatureKind;
    static const std::array<FeatureInfo, kFeatureCount> catalog = {{
        {0, "q1_token_count", "lexical", "[0,inf)", K::Other, false},
        {1, "q2_token_count", "lexical", "[0,inf)", K::Other, false},
        {2, "abs_token_count_diff", "lexical", "[0,inf)", K::Distance, true},
        {3, "token_count_ratio", "lexical", "[0,1]", K::Similarity, true},
        {4, "q1_char_len", "lexical", "[0,inf)", K::Other, false},
        {5, "q2_char_len", "lexical", "[0,inf)", K::Other, false},
        {6, "common_token_count", "lexical", "[0,inf)", K::Other, true},
        {7, "token_jaccard", "lexical", "[0,1]", K::Similarity, true},
        {8, "token_dice", "lexical", "[0,1]", K::Similarity, true},
        {9, "token_containment", "lexical", "[0,1]", K::Similarity, true},
        {10, "first_token_equal", "lexical", "{0,1}", K::Similarity, true},
        {11, "last_token_equal", "lexical", "{0,1}", K::Similarity, true},
        {12, "levenshtein_ratio", "lexical", "[0,1]", K::Similarity, true},
        {13, "partial_ratio", "lexical", "[0,1]", K::Similarity, true},
        {14, "token_sort_ratio", "lexical", "[0,1]", K::Similarity, true},
        {15, "token_set_ratio", "lexical", "[0,1]", K::Similarity, true},
        {16, "lcs_substring_ratio", "lexical", "[0,1]", K::Similarity, true},
        {17, "tfidf_cosine_distance", "tfidf", "[0,1]", K::Distance, true},
        {18, "tfidf_l1_distance", "tfidf", "[0,inf)", K::Distance, true},
        {19, "tfidf_l2_distance", "tfidf", "[0,inf)", K::Distance, true},
        {20, "shared_idf_ratio", "tfidf", "[0,1]", K::Similarity, true},
        {21, "rwmd_tokens", "wmd", "[0,inf)", K::Distance, true},
        {22, "rwmd_tokens_no_stop", "wmd", "[0,inf)", K::Distance, true},
        {23, "emb_cosine_distance", "embedding", "[0,2]", K::Distance, true},
        {24, "emb_cityblock", "embedding", "[0,inf)", K::Distance, true},
        {25, "emb_euclidean", "embedding", "[0,inf)", K::Distance, true},
        {26, "emb_minkowski3", "embedding", "[0,inf)", K::Distance, true},
        {27, "emb_canberra", "embedding", "[0,inf)", K::Distance, true},
        {28, "emb_braycurtis", "embedding", "[0,inf)", K::Distance, true},
        {29, "emb_correlation_distance", "embedding", "[0,2]", K::Distance, true},
        {30, "idf_emb_cosine_distance", "embedding", "[0,2]", K::Distance, true},
        {31, "idf_emb_cityblock", "embedding", "[0,inf)", K::Distance, true},
        {32, "idf_emb_euclidean", "embedding", "[0,inf)", K::Distance, true},
        {33, "idf_emb_braycurtis", "embedding", "[0,inf)", K::Distance, true},
        {34, "q1_mean_vec_skewness", "embedding", "(-inf,inf)", K::Other, false},
        {35, "q1_mean_vec_kurtosis", "embedding", "(-inf,inf)", K::Other, false},
        {36, "q2_mean_vec_skewness", "embedding", "(-inf,inf)", K::Other, false},
        {37, "q2_mean_vec_kurtosis", "embedding", "(-inf,inf)", K::Other, false},
        {38, "graph_common_neighbors", "graph", "[0,inf)", K::Other, true},
        {39, "graph_min_degree", "graph", "[0,inf)", K::Other, true},
        {40, "graph_max_degree", "graph", "[0,inf)", K::Other, true},
        {41, "graph_neighbor_jaccard", "graph", "[0,1]", K::Similarity, true},
    }};
    return catalog;
}

void save_feature_catalog(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write feature catalog: " + path);
    out << "# " << kCatalogVersion << "\n";
    out << "# index\tname\tblock\trange\n";
    for (const auto& f : feature_catalog()) {
        out << f.index << "\t" << f.name << "\t" << f.block << "\t" << f.range << "\n";
    }
}

FeatureVector featurize_pair(const ProcessedPair& pair, const FeatureContext& ctx) {
    if (!ctx.idf || !ctx.table) {
        throw std::runtime_error("featurize_pair needs idf and embedding table");
    }
    FeatureVector out{};
    auto lex = lexical_features(pair.q1, pair.q2);
    std::copy(lex.begin(), lex.end(), out.begin());
    auto tf = tfidf_features(pair.q1, pair.q2, *ctx.idf);
    std::copy(tf.begin(), tf.end(), out.begin() + 17);
    out[21] = relaxed_wmd(pair.q1.tokens, pair.q2.tokens, *ctx.table);
    out[22] = relaxed_wmd(pair.q1.tokens_no_stop, pair.q2.tokens_no_stop, *ctx.table);
    auto emb = embedding_distance_features(pair.q1, pair.q2, *ctx.table, *ctx.idf);
    std::copy(emb.begin(), emb.end(), out.begin() + 23);
    if (ctx.graph) {
        auto g = graph_features(*ctx.graph, pair.q1.raw, pair.q2.raw);
        std::copy(g.begin(), g.end(), out.begin() + 38);
    }
    for (double v : out) {
        if (!std::isfinite(v)) throw std::runtime_error("non-finite feature value");
    }
    return out;
}

FeatureMatrix featurize_corpus(const std::vector<ProcessedPair>& pairs,
                               const FeatureContext& ctx,
                               bool parallel) {
    FeatureMatrix m;
    m.rows.resize(pairs.size());
    m.labels.resize(pairs.size());
    std::int64_t n = static_cast<std::int64_t>(pairs.size());
    if (parallel) {
#ifdef DQD_HAVE_OPENMP
#pragma omp parallel for schedule(dynamic, 16)
#endif
        for (std::int64_t i = 0; i < n; ++i) {
            m.rows[i] = featurize_pair(pairs[i], ctx);
            m.labels[i] = pairs[i].label;
        }
    } else {
        for (std::int64_t i = 0; i < n; ++i) {
            m.rows[i] = featurize_pair(pairs[i], ctx);
            m.labels[i] = pairs[i].label;
        }
    }
    return m;
}

void save_feature_matrix(const std::string& path, const FeatureMatrix& m,
                         const std::string& dataset_id, const std::string& split) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write feature matrix: " + path);
    out << "dqd-features-v1\t" << kCatalogVersion << "\t" << dataset_id << "\t"
        << split << "\t" << m.rows.size() << "\n";
    for (std::size_t i = 0; i < m.rows.size(); ++i) {
        out << m.labels[i];
        for (double v : m.rows[i]) out << " " << fmt17(v);
        out << "\n";
    }
}

FeatureMatrix load_feature_matrix(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open feature matrix: " + path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty feature matrix file");
    std::istringstream header(line);
    std::string magic, catalog;
    header >> magic >> catalog;
    if (magic != "dqd-features-v1") throw std::runtime_error("bad feature matrix header");
    if (catalog != kCatalogVersion) {
        throw std::runtime_error("feature catalog version mismatch: " + catalog);
    }
    FeatureMatrix m;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ss(line);
        int label;
        ss >> label;
        FeatureVector row{};
        for (auto& v : row) {
            if (!(ss >> v)) throw std::runtime_error("short feature row");
        }
        m.labels.push_back(label);
        m.rows.push_back(row);
    }
    return m;
}

}  // namespace dqd
