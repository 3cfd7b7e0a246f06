#include "dqd/text.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdint>
#include <unordered_map>
#include <unordered_set>

namespace dqd {

namespace {

inline bool is_alnum(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9');
}

inline bool is_alpha(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
}

inline char lower(char c) {
    return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
}

struct Abbrev {
    const char* pattern;
    const char* replacement;
    bool whole_word;  // suffix patterns attach to the preceding word
};

// Ordered longest-pattern-first so "can't" wins over "n't".
constexpr std::array<Abbrev, 10> kAbbrevs = {{
    {"what's", "what is", true},
    {"can't", "cannot", true},
    {"won't", "will not", true},
    {"it's", "it is", true},
    {"n't", " not", false},
    {"'re", " are", false},
    {"'ve", " have", false},
    {"'ll", " will", false},
    {"i'm", "i am", true},
    {"'d", " would", false},
}};

bool matches_at(const std::string& text, std::size_t pos, const Abbrev& a) {
    std::size_t n = 0;
    for (; a.pattern[n]; ++n) {
        if (pos + n >= text.size() || lower(text[pos + n]) != a.pattern[n]) return false;
    }
    // End boundary: the match must not continue into a word.
    if (pos + n < text.size() && is_alnum(text[pos + n])) return false;
    // Start boundary applies only to whole-word patterns; suffix patterns
    // like "n't" attach to the preceding word by design.
    if (a.whole_word && pos > 0 && is_alnum(text[pos - 1])) return false;
    return true;
}

}  // namespace

std::string expand_abbreviations(const std::string& text) {
    std::string out;
    out.reserve(text.size());
    std::size_t i = 0;
    while (i < text.size()) {
        bool replaced = false;
        // Patterns are kept longest-first per length; scan by length.
        std::size_t best_len = 0;
        const char* best_rep = nullptr;
        for (const auto& a : kAbbrevs) {
            std::size_t len = std::char_traits<char>::length(a.pattern);
            if (len > best_len && matches_at(text, i, a)) {
                best_len = len;
                best_rep = a.replacement;
            }
        }
        if (best_rep) {
            out += best_rep;
            i += best_len;
            replaced = true;
        }
        if (!replaced) {
            out += text[i];
            ++i;
        }
    }
    return out;
}

std::vector<std::string> tokenize(const std::string& text) {
    std::vector<std::string> tokens;
    std::string cur;
    for (char c : text) {
        if (is_alnum(c)) {
            cur += lower(c);
        } else if (!cur.empty()) {
            tokens.push_back(std::move(cur));
            cur.clear();
        }
    }
    if (!cur.empty()) tokens.push_back(std::move(cur));
    return tokens;
}

namespace {

// Non-ASCII codepoints that are punctuation or symbols, not letters.
bool codepoint_is_symbol(std::uint32_t cp) {
    if (cp >= 0xA0 && cp <= 0xBF) return true;       // Latin-1 signs
    if (cp == 0xD7 || cp == 0xF7) return true;       // multiply / divide
    if (cp >= 0x2000 && cp <= 0x206F) return true;   // general punctuation
    if (cp >= 0x20A0 && cp <= 0x20CF) return true;   // currency
    if (cp >= 0x2100 && cp <= 0x2BFF) return true;   // arrows, math, symbols
    if (cp >= 0x1F000) return true;                  // emoji planes
    return false;
}

}  // namespace

bool is_english(const std::string& text) {
    std::size_t i = 0;
    const auto n = text.size();
    while (i < n) {
        unsigned char c = text[i];
        if (c < 0x80) {
            ++i;
            continue;
        }
        std::uint32_t cp = 0;
        std::size_t len = 0;
        if ((c & 0xE0) == 0xC0) { cp = c & 0x1F; len = 2; }
        else if ((c & 0xF0) == 0xE0) { cp = c & 0x0F; len = 3; }
        else if ((c & 0xF8) == 0xF0) { cp = c & 0x07; len = 4; }
        else return false;  // malformed byte, reject
        if (i + len > n) return false;
        for (std::size_t k = 1; k < len; ++k) {
            unsigned char cc = text[i + k];
            if ((cc & 0xC0) != 0x80) return false;
            cp = (cp << 6) | (cc & 0x3F);
        }
        if (!codepoint_is_symbol(cp)) return false;  // non-ASCII letter
        i += len;
    }
    return true;
}

namespace {

// Classic 127-word English stopword list, embedded verbatim.
const std::unordered_set<std::string>& stopword_set() {
    static const std::unordered_set<std::string> set = {
        "i", "me", "my", "myself", "we", "our", "ours", "ourselves", "you",
        "your", "yours", "yourself", "yourselves", "he", "him", "his",
        "himself", "she", "her", "hers", "herself", "it", "its", "itself",
        "they", "them", "their", "theirs", "themselves", "what", "which",
        "who", "whom", "this", "that", "these", "those", "am", "is", "are",
        "was", "were", "be", "been", "being", "have", "has", "had", "having",
        "do", "does", "did", "doing", "a", "an", "the", "and", "but", "if",
        "or", "because", "as", "until", "while", "of", "at", "by", "for",
        "with", "about", "against", "between", "into", "through", "during",
        "before", "after", "above", "below", "to", "from", "up", "down",
        "in", "out", "on", "off", "over", "under", "again", "further",
        "then", "once", "here", "there", "when", "where", "why", "how",
        "all", "any", "both", "each", "few", "more", "most", "other",
        "some", "such", "no", "nor", "not", "only", "own", "same", "so",
        "than", "too", "very", "s", "t", "can", "will", "just", "don",
        "should", "now",
    };
    return set;
}

const std::unordered_map<std::string, std::string>& irregular_lemmas() {
    static const std::unordered_map<std::string, std::string> map = {
        {"am", "be"},       {"is", "be"},        {"are", "be"},
        {"was", "be"},      {"were", "be"},      {"been", "be"},
        {"has", "have"},    {"had", "have"},     {"does", "do"},
        {"did", "do"},      {"done", "do"},      {"went", "go"},
        {"gone", "go"},     {"said", "say"},     {"made", "make"},
        {"got", "get"},     {"saw", "see"},      {"seen", "see"},
        {"came", "come"},   {"took", "take"},    {"taken", "take"},
        {"knew", "know"},   {"known", "know"},   {"gave", "give"},
        {"given", "give"},  {"found", "find"},   {"thought", "think"},
        {"told", "tell"},   {"became", "become"},{"left", "leave"},
        {"felt", "feel"},   {"brought", "bring"},{"began", "begin"},
        {"begun", "begin"}, {"kept", "keep"},    {"held", "hold"},
        {"wrote", "write"}, {"written", "write"},{"stood", "stand"},
        {"heard", "hear"},  {"meant", "mean"},   {"met", "meet"},
        {"paid", "pay"},    {"ran", "run"},      {"sat", "sit"},
        {"spoke", "speak"}, {"led", "lead"},     {"grew", "grow"},
        {"grown", "grow"},  {"lost", "lose"},    {"fell", "fall"},
        {"fallen", "fall"}, {"sent", "send"},    {"built", "build"},
        {"drew", "draw"},   {"drawn", "draw"},   {"broke", "break"},
        {"broken", "break"},{"spent", "spend"},  {"wore", "wear"},
        {"worn", "wear"},   {"chose", "choose"}, {"chosen", "choose"},
        {"men", "man"},     {"women", "woman"},  {"children", "child"},
        {"feet", "foot"},   {"teeth", "tooth"},  {"geese", "goose"},
        {"mice", "mouse"},  {"people", "person"},{"oxen", "ox"},
        {"wives", "wife"},  {"knives", "knife"}, {"leaves", "leaf"},
        {"lives", "life"},  {"better", "good"},  {"best", "good"},
        {"worse", "bad"},   {"worst", "bad"},
    };
    return map;
}

inline bool is_vowel_char(char c) {
    return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u';
}

bool has_vowel(const std::string& s) {
    return std::any_of(s.begin(), s.end(), is_vowel_char);
}

// "runn" -> "run" but "fall" stays ("ll" and other sibilant doubles kept).
void undo_doubling(std::string& s) {
    std::size_t n = s.size();
    if (n < 3) return;
    char c = s[n - 1];
    if (c != s[n - 2] || is_vowel_char(c)) return;
    if (c == 'l' || c == 's' || c == 'z') return;
    s.pop_back();
}

}  // namespace

bool is_stopword(const std::string& token) {
    return stopword_set().count(token) > 0;
}

std::vector<std::string> remove_stopwords(const std::vector<std::string>& tokens) {
    std::vector<std::string> out;
    out.reserve(tokens.size());
    for (const auto& t : tokens) {
        if (!is_stopword(t)) out.push_back(t);
    }
    return out;
}

std::string lemmatize(const std::string& token) {
    if (token.size() <= 2) return token;
    auto it = irregular_lemmas().find(token);
    if (it != irregular_lemmas().end()) return it->second;

    auto ends_with = [&](const char* suf) {
        std::size_t n = std::char_traits<char>::length(suf);
        return token.size() > n && token.compare(token.size() - n, n, suf) == 0;
    };

    if (ends_with("ies") && token.size() > 4) {
        return token.substr(0, token.size() - 3) + "y";
    }
    if (ends_with("ing") && token.size() > 4) {
        std::string stem = token.substr(0, token.size() - 3);
        if (has_vowel(stem)) {
            undo_doubling(stem);
            return stem;
        }
        return token;
    }
    if (ends_with("ed") && token.size() > 3) {
        std::string stem = token.substr(0, token.size() - 2);
        if (has_vowel(stem)) {
            undo_doubling(stem);
            return stem;
        }
        return token;
    }
    if ((ends_with("ses") || ends_with("xes") || ends_with("zes") ||
         ends_with("ches") || ends_with("shes"))) {
        return token.substr(0, token.size() - 2);
    }
    if (ends_with("s") && !ends_with("ss") && !ends_with("us") && !ends_with("is")) {
        return token.substr(0, token.size() - 1);
    }
    return token;
}

}  // namespace dqd
