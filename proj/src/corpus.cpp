#include "dqd/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include "dqd/porter.hpp"
#include "dqd/rng.hpp"
#include "dqd/text.hpp"
#include "json.hpp"

namespace dqd {

using nlohmann::json;

std::string source_name(Source s) {
    switch (s) {
        case Source::Quora: return "quora";
        case Source::AskUbuntu: return "askubuntu";
        case Source::EnglishSE: return "english_se";
        case Source::Synthetic: return "synthetic";
    }
    return "synthetic";
}

std::optional<Source> source_from_name(const std::string& name) {
    if (name == "quora") return Source::Quora;
    if (name == "askubuntu") return Source::AskUbuntu;
    if (name == "english_se") return Source::EnglishSE;
    if (name == "synthetic") return Source::Synthetic;
    return std::nullopt;
}

namespace {

std::vector<std::string> split_tabs(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
        if (c == '\t') {
            fields.push_back(std::move(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    fields.push_back(std::move(cur));
    return fields;
}

std::string strip_quotes(const std::string& s) {
    if (s.size() >= 2 && s.front() == '"' && s.back() == '"') {
        return s.substr(1, s.size() - 2);
    }
    return s;
}

}  // namespace

std::vector<QuestionPair> load_quora_tsv(const std::string& path, LoadTally* tally) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open quora tsv: " + path);

    std::string line;
    if (!std::getline(in, line)) {
        throw std::runtime_error("quora tsv is empty (missing header): " + path);
    }
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::string expected = "id\tqid1\tqid2\tquestion1\tquestion2\tis_duplicate";
    if (line != expected) {
        throw std::runtime_error(
            "quora tsv header mismatch; expected columns: "
            "id, qid1, qid2, question1, question2, is_duplicate");
    }

    LoadTally local;
    std::vector<QuestionPair> pairs;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        ++local.rows_read;
        auto fields = split_tabs(line);
        if (fields.size() != 6) {
            ++local.skipped_malformed;
            continue;
        }
        const std::string& lab = fields[5];
        if (lab != "0" && lab != "1") {
            ++local.skipped_bad_label;
            continue;
        }
        QuestionPair p;
        p.q1_raw = strip_quotes(fields[3]);
        p.q2_raw = strip_quotes(fields[4]);
        if (p.q1_raw.empty() || p.q2_raw.empty()) {
            ++local.skipped_missing_text;
            continue;
        }
        try {
            p.id = std::stoll(fields[0]);
        } catch (const std::exception&) {
            ++local.skipped_malformed;
            continue;
        }
        p.label = lab == "1" ? 1 : 0;
        p.source = Source::Quora;
        pairs.push_back(std::move(p));
    }
    if (tally) *tally = local;
    return pairs;
}

namespace {

std::string xml_unescape(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    std::size_t i = 0;
    while (i < s.size()) {
        if (s[i] != '&') {
            out += s[i++];
            continue;
        }
        auto take = [&](const char* ent, char rep) {
            std::size_t n = std::strlen(ent);
            if (s.compare(i, n, ent) == 0) {
                out += rep;
                i += n;
                return true;
            }
            return false;
        };
        if (take("&amp;", '&') || take("&lt;", '<') || take("&gt;", '>') ||
            take("&quot;", '"') || take("&apos;", '\'') || take("&#xA;", '\n') ||
            take("&#xD;", '\r') || take("&#39;", '\'')) {
            continue;
        }
        out += s[i++];
    }
    return out;
}

// Pulls attr="value" out of a dump row element; the archive format keeps
// one element per line so no full XML parser is needed.
std::optional<std::string> xml_attr(const std::string& line, const std::string& name) {
    std::string needle = name + "=\"";
    auto pos = line.find(needle);
    if (pos == std::string::npos) return std::nullopt;
    pos += needle.size();
    auto end = line.find('"', pos);
    if (end == std::string::npos) return std::nullopt;
    return xml_unescape(line.substr(pos, end - pos));
}

}  // namespace

std::vector<QuestionPair> load_stackexchange(const std::string& posts_path,
                                             const std::string& postlinks_path,
                                             double negative_ratio,
                                             std::uint64_t seed,
                                             Source source,
                                             LoadTally* tally) {
    if (negative_ratio <= 0) throw std::runtime_error("negative_ratio must be positive");

    std::ifstream posts(posts_path);
    if (!posts) throw std::runtime_error("cannot open posts xml: " + posts_path);
    std::ifstream links(postlinks_path);
    if (!links) throw std::runtime_error("cannot open postlinks xml: " + postlinks_path);

    LoadTally local;
    std::unordered_map<std::int64_t, std::string> titles;
    std::vector<std::int64_t> question_ids;  // in file order, for determinism
    std::string line;
    while (std::getline(posts, line)) {
        if (line.find("<row") == std::string::npos) continue;
        ++local.rows_read;
        auto type = xml_attr(line, "PostTypeId");
        if (!type || *type != "1") continue;
        auto id = xml_attr(line, "Id");
        auto title = xml_attr(line, "Title");
        if (!id || !title || title->empty()) {
            ++local.skipped_missing_text;
            continue;
        }
        std::int64_t pid = std::stoll(*id);
        if (titles.emplace(pid, *title).second) question_ids.push_back(pid);
    }

    auto key_of = [](std::int64_t a, std::int64_t b) {
        if (a > b) std::swap(a, b);
        return std::make_pair(a, b);
    };
    std::set<std::pair<std::int64_t, std::int64_t>> linked;     // any link type
    std::set<std::pair<std::int64_t, std::int64_t>> dup_links;  // LinkTypeId=3
    std::vector<std::pair<std::int64_t, std::int64_t>> positives;
    while (std::getline(links, line)) {
        if (line.find("<row") == std::string::npos) continue;
        auto a = xml_attr(line, "PostId");
        auto b = xml_attr(line, "RelatedPostId");
        auto type = xml_attr(line, "LinkTypeId");
        if (!a || !b || !type) continue;
        std::int64_t pa = std::stoll(*a);
        std::int64_t pb = std::stoll(*b);
        linked.insert(key_of(pa, pb));
        if (*type != "3") continue;
        if (!titles.count(pa) || !titles.count(pb)) {
            ++local.skipped_malformed;  // link to a deleted or non-question post
            continue;
        }
        if (pa == pb) continue;
        if (dup_links.insert(key_of(pa, pb)).second) positives.push_back(key_of(pa, pb));
    }
    if (positives.empty()) {
        throw std::runtime_error("no duplicate links (LinkTypeId=3) found; dataset unusable");
    }

    std::vector<QuestionPair> pairs;
    std::int64_t next_id = 0;
    for (auto [a, b] : positives) {
        QuestionPair p;
        p.id = next_id++;
        p.q1_raw = titles[a];
        p.q2_raw = titles[b];
        p.label = 1;
        p.source = source;
        pairs.push_back(std::move(p));
    }

    std::size_t want = static_cast<std::size_t>(
        std::llround(negative_ratio * static_cast<double>(positives.size())));
    Rng rng(seed);
    std::set<std::pair<std::int64_t, std::int64_t>> used;
    std::size_t made = 0;
    std::size_t attempts = 0;
    const std::size_t max_attempts = want * 1000 + 1000;
    while (made < want && attempts < max_attempts && question_ids.size() >= 2) {
        ++attempts;
        std::int64_t a = question_ids[rng.next_below(question_ids.size())];
        std::int64_t b = question_ids[rng.next_below(question_ids.size())];
        if (a == b) continue;
        auto key = key_of(a, b);
        if (linked.count(key) || used.count(key)) continue;
        used.insert(key);
        QuestionPair p;
        p.id = next_id++;
        p.q1_raw = titles[a];
        p.q2_raw = titles[b];
        p.label = 0;
        p.source = source;
        pairs.push_back(std::move(p));
        ++made;
    }
    if (tally) *tally = local;
    return pairs;
}

ProcessedQuestion preprocess(const std::string& raw) {
    ProcessedQuestion q;
    q.raw = raw;
    q.expanded = expand_abbreviations(raw);
    q.tokens = tokenize(q.expanded);
    q.tokens_no_stop = remove_stopwords(q.tokens);
    q.lemmas.reserve(q.tokens_no_stop.size());
    for (const auto& t : q.tokens_no_stop) q.lemmas.push_back(lemmatize(t));
    q.stems.reserve(q.lemmas.size());
    for (const auto& l : q.lemmas) q.stems.push_back(porter_stem(l));
    return q;
}

ProcessedPair preprocess_pair(const QuestionPair& pair) {
    ProcessedPair p;
    p.id = pair.id;
    p.label = pair.label;
    p.source = pair.source;
    p.q1 = preprocess(pair.q1_raw);
    p.q2 = preprocess(pair.q2_raw);
    return p;
}

std::vector<ProcessedPair> filter_pairs(const std::vector<ProcessedPair>& pairs,
                                        FilterTally* tally) {
    FilterTally local;
    std::vector<ProcessedPair> kept;
    kept.reserve(pairs.size());
    for (const auto& p : pairs) {
        if (!is_english(p.q1.raw) || !is_english(p.q2.raw)) {
            ++local.dropped_non_english;
            continue;
        }
        if (p.q1.tokens.empty() || p.q2.tokens.empty()) {
            ++local.dropped_empty;
            continue;
        }
        kept.push_back(p);
    }
    local.kept = kept.size();
    if (tally) *tally = local;
    return kept;
}

DatasetSplit split_dataset(std::vector<ProcessedPair> pairs, std::uint64_t seed) {
    if (pairs.size() < 5) {
        throw std::runtime_error("split_dataset needs at least 5 pairs");
    }
    Rng rng(seed);
    rng.shuffle(pairs);
    std::size_t n = pairs.size();
    std::size_t cut1 = static_cast<std::size_t>(std::floor(0.6 * static_cast<double>(n)));
    std::size_t cut2 = static_cast<std::size_t>(std::floor(0.8 * static_cast<double>(n)));
    DatasetSplit split;
    split.seed = seed;
    split.train.assign(pairs.begin(), pairs.begin() + cut1);
    split.validation.assign(pairs.begin() + cut1, pairs.begin() + cut2);
    split.test.assign(pairs.begin() + cut2, pairs.end());
    return split;
}

DatasetStats dataset_stats(const std::vector<ProcessedPair>& pairs) {
    DatasetStats stats;
    stats.pair_count = pairs.size();
    std::size_t total = 0;
    std::size_t questions = 0;
    for (const auto& p : pairs) {
        for (const auto* q : {&p.q1, &p.q2}) {
            stats.max_wpq = std::max(stats.max_wpq, q->tokens.size());
            total += q->tokens.size();
            ++questions;
        }
    }
    stats.mean_wpq = questions ? static_cast<double>(total) / static_cast<double>(questions) : 0.0;
    return stats;
}

namespace {

constexpr const char* kCorpusFormat = "dqd-corpus-v1";

json stages_to_json(const ProcessedQuestion& q) {
    return json{{"raw", q.raw},
                {"expanded", q.expanded},
                {"tokens", q.tokens},
                {"tokens_no_stop", q.tokens_no_stop},
                {"lemmas", q.lemmas},
                {"stems", q.stems}};
}

ProcessedQuestion stages_from_json(const json& j) {
    ProcessedQuestion q;
    q.raw = j.at("raw").get<std::string>();
    q.expanded = j.at("expanded").get<std::string>();
    q.tokens = j.at("tokens").get<std::vector<std::string>>();
    q.tokens_no_stop = j.at("tokens_no_stop").get<std::vector<std::string>>();
    q.lemmas = j.at("lemmas").get<std::vector<std::string>>();
    q.stems = j.at("stems").get<std::vector<std::string>>();
    return q;
}

}  // namespace

void save_corpus_cache(const std::string& path, const std::vector<ProcessedPair>& pairs) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write corpus cache: " + path);
    out << json{{"format", kCorpusFormat}, {"pairs", pairs.size()}}.dump() << "\n";
    for (const auto& p : pairs) {
        json j{{"id", p.id},
               {"source", source_name(p.source)},
               {"label", p.label},
               {"q1_stages", stages_to_json(p.q1)},
               {"q2_stages", stages_to_json(p.q2)}};
        out << j.dump() << "\n";
    }
}

std::vector<ProcessedPair> load_corpus_cache(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open corpus cache: " + path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty corpus cache: " + path);
    json header = json::parse(line);
    if (header.value("format", "") != kCorpusFormat) {
        throw std::runtime_error("corpus cache format mismatch, expected " +
                                 std::string(kCorpusFormat));
    }
    std::vector<ProcessedPair> pairs;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        json j = json::parse(line);
        ProcessedPair p;
        p.id = j.at("id").get<std::int64_t>();
        p.label = j.at("label").get<int>();
        auto src = source_from_name(j.at("source").get<std::string>());
        if (!src) throw std::runtime_error("unknown source tag in corpus cache");
        p.source = *src;
        p.q1 = stages_from_json(j.at("q1_stages"));
        p.q2 = stages_from_json(j.at("q2_stages"));
        pairs.push_back(std::move(p));
    }
    return pairs;
}

}  // namespace dqd
