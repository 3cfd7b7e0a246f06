#pragma once

#include <string>
#include <vector>

namespace dqd {

// Replaces contracted forms ("what's" -> "what is") left-to-right,
// longest-match-first, case-insensitive, at word boundaries only.
std::string expand_abbreviations(const std::string& text);

// Lowercase, split on any character that is not an ASCII letter or digit.
std::vector<std::string> tokenize(const std::string& text);

// False iff the text contains an alphabetic character outside ASCII.
bool is_english(const std::string& text);

bool is_stopword(const std::string& token);
std::vector<std::string> remove_stopwords(const std::vector<std::string>& tokens);

// Irregular-form table plus plural / -ing / -ed suffix rules.
std::string lemmatize(const std::string& token);

}  // namespace dqd
