#pragma once

#include <string>

namespace dqd {

// Porter (1980) stemmer, the original five-step algorithm.
// Expects a lowercase ASCII token.
std::string porter_stem(const std::string& word);

}  // namespace dqd
