#pragma once

#include <string>
#include <vector>

#include "dqd/embeddings.hpp"

namespace dqd {

// Relaxed word mover's distance: max of the two one-sided greedy
// assignments, a lower bound on the exact transport cost. Bag weights are
// normalized token counts; ground distance is Euclidean between word
// vectors. Tokens absent from the table are dropped; if either side loses
// every token the distance is defined as 0.
double relaxed_wmd(const std::vector<std::string>& tokens1,
                   const std::vector<std::string>& tokens2,
                   const EmbeddingTable& table);

// Exact word mover's distance for small inputs (<= 8 unique in-table
// tokens per side), solved as a transportation problem. Test oracle for
// relaxed_wmd.
double exact_wmd_small(const std::vector<std::string>& tokens1,
                       const std::vector<std::string>& tokens2,
                       const EmbeddingTable& table);

}  // namespace dqd
