#pragma once

#include <stdexcept>
#include <string>

namespace dqd {

// Inputs parsed fine but contradict each other (duplicate result cells,
// catalog mismatches between a model and the feature extractor, ...).
// The CLI maps this to exit code 3; plain runtime errors map to 2.
struct DataError : std::runtime_error {
    explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace dqd
