#include "dqd/porter.hpp"

#include <cstring>
#include <vector>

namespace dqd {

namespace {

bool is_consonant(const std::string& s, std::size_t i) {
    char c = s[i];
    switch (c) {
        case 'a': case 'e': case 'i': case 'o': case 'u':
            return false;
        case 'y':
            return i == 0 ? true : !is_consonant(s, i - 1);
        default:
            return true;
    }
}

// m = number of VC sequences in [C](VC)^m[V].
int measure(const std::string& s) {
    int m = 0;
    std::size_t i = 0;
    std::size_t n = s.size();
    while (i < n && is_consonant(s, i)) ++i;
    while (i < n) {
        while (i < n && !is_consonant(s, i)) ++i;
        if (i >= n) break;
        ++m;
        while (i < n && is_consonant(s, i)) ++i;
    }
    return m;
}

bool contains_vowel(const std::string& s) {
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (!is_consonant(s, i)) return true;
    }
    return false;
}

bool ends_double_consonant(const std::string& s) {
    std::size_t n = s.size();
    return n >= 2 && s[n - 1] == s[n - 2] && is_consonant(s, n - 1);
}

// *o: stem ends cvc where the final c is not w, x or y.
bool ends_cvc(const std::string& s) {
    std::size_t n = s.size();
    if (n < 3) return false;
    if (!is_consonant(s, n - 3) || is_consonant(s, n - 2) || !is_consonant(s, n - 1)) {
        return false;
    }
    char c = s[n - 1];
    return c != 'w' && c != 'x' && c != 'y';
}

bool ends_with(const std::string& s, const char* suf) {
    std::size_t n = std::strlen(suf);
    return s.size() >= n && s.compare(s.size() - n, n, suf) == 0;
}

std::string stem_of(const std::string& s, const char* suf) {
    return s.substr(0, s.size() - std::strlen(suf));
}

struct Rule {
    const char* suffix;
    const char* replacement;
    int min_measure;  // condition: m(stem) > min_measure
};

// Within one step only the rule with the longest matching suffix is
// considered; if its measure condition fails, nothing happens.
bool apply_rule_list(std::string& w, const std::vector<Rule>& rules) {
    const Rule* best = nullptr;
    std::size_t best_len = 0;
    for (const auto& r : rules) {
        std::size_t len = std::strlen(r.suffix);
        if (len > best_len && ends_with(w, r.suffix)) {
            best = &r;
            best_len = len;
        }
    }
    if (!best) return false;
    std::string stem = stem_of(w, best->suffix);
    if (measure(stem) > best->min_measure) {
        w = stem + best->replacement;
        return true;
    }
    return false;
}

void step1a(std::string& w) {
    if (ends_with(w, "sses")) {
        w.resize(w.size() - 2);
    } else if (ends_with(w, "ies")) {
        w.resize(w.size() - 2);
    } else if (ends_with(w, "ss")) {
        // unchanged
    } else if (ends_with(w, "s")) {
        w.pop_back();
    }
}

void step1b(std::string& w) {
    if (ends_with(w, "eed")) {
        std::string stem = stem_of(w, "eed");
        if (measure(stem) > 0) w.pop_back();
        return;
    }
    bool fired = false;
    if (ends_with(w, "ed")) {
        std::string stem = stem_of(w, "ed");
        if (contains_vowel(stem)) {
            w = stem;
            fired = true;
        }
    } else if (ends_with(w, "ing")) {
        std::string stem = stem_of(w, "ing");
        if (contains_vowel(stem)) {
            w = stem;
            fired = true;
        }
    }
    if (!fired) return;

    if (ends_with(w, "at") || ends_with(w, "bl") || ends_with(w, "iz")) {
        w += 'e';
    } else if (ends_double_consonant(w)) {
        char c = w.back();
        if (c != 'l' && c != 's' && c != 'z') w.pop_back();
    } else if (measure(w) == 1 && ends_cvc(w)) {
        w += 'e';
    }
}

void step1c(std::string& w) {
    if (ends_with(w, "y")) {
        std::string stem = stem_of(w, "y");
        if (contains_vowel(stem)) w.back() = 'i';
    }
}

void step2(std::string& w) {
    static const std::vector<Rule> rules = {
        {"ational", "ate", 0}, {"tional", "tion", 0}, {"enci", "ence", 0},
        {"anci", "ance", 0},   {"izer", "ize", 0},    {"abli", "able", 0},
        {"alli", "al", 0},     {"entli", "ent", 0},   {"eli", "e", 0},
        {"ousli", "ous", 0},   {"ization", "ize", 0}, {"ation", "ate", 0},
        {"ator", "ate", 0},    {"alism", "al", 0},    {"iveness", "ive", 0},
        {"fulness", "ful", 0}, {"ousness", "ous", 0}, {"aliti", "al", 0},
        {"iviti", "ive", 0},   {"biliti", "ble", 0},
    };
    apply_rule_list(w, rules);
}

void step3(std::string& w) {
    static const std::vector<Rule> rules = {
        {"icate", "ic", 0}, {"ative", "", 0}, {"alize", "al", 0},
        {"iciti", "ic", 0}, {"ical", "ic", 0}, {"ful", "", 0},
        {"ness", "", 0},
    };
    apply_rule_list(w, rules);
}

void step4(std::string& w) {
    static const std::vector<Rule> rules = {
        {"al", "", 1},    {"ance", "", 1}, {"ence", "", 1}, {"er", "", 1},
        {"ic", "", 1},    {"able", "", 1}, {"ible", "", 1}, {"ant", "", 1},
        {"ement", "", 1}, {"ment", "", 1}, {"ent", "", 1},  {"ou", "", 1},
        {"ism", "", 1},   {"ate", "", 1},  {"iti", "", 1},  {"ous", "", 1},
        {"ive", "", 1},   {"ize", "", 1},
    };
    // "ion" needs the stem to end in s or t; handled apart from the table
    // but still under longest-suffix selection.
    const Rule* best = nullptr;
    std::size_t best_len = 0;
    for (const auto& r : rules) {
        std::size_t len = std::strlen(r.suffix);
        if (len > best_len && ends_with(w, r.suffix)) {
            best = &r;
            best_len = len;
        }
    }
    bool ion = ends_with(w, "ion") && 3 > best_len;
    if (ion) {
        std::string stem = stem_of(w, "ion");
        if (!stem.empty() && (stem.back() == 's' || stem.back() == 't') &&
            measure(stem) > 1) {
            w = stem;
        }
        return;
    }
    if (best) {
        std::string stem = stem_of(w, best->suffix);
        if (measure(stem) > best->min_measure) w = stem;
    }
}

void step5a(std::string& w) {
    if (!ends_with(w, "e")) return;
    std::string stem = stem_of(w, "e");
    int m = measure(stem);
    if (m > 1 || (m == 1 && !ends_cvc(stem))) w = stem;
}

void step5b(std::string& w) {
    if (measure(w) > 1 && ends_double_consonant(w) && w.back() == 'l') {
        w.pop_back();
    }
}

}  // namespace

std::string porter_stem(const std::string& word) {
    if (word.size() <= 2) return word;
    std::string w = word;
    step1a(w);
    step1b(w);
    step1c(w);
    step2(w);
    step3(w);
    step4(w);
    step5a(w);
    step5b(w);
    return w;
}

}  // namespace dqd
