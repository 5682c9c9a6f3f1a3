#pragma once

#include <cstdint>
#include <vector>

#include "g2t/dataset.hpp"

namespace g2t {

/// Random 4-node graphs with 2 or 3 labelled edges over a small entity pool.
/// The target lists each edge as "src relation dst" in label order and ends
/// with ".", so it is 7 or 10 tokens and does not depend on node order.
std::vector<Example> synthetic_corpus(std::size_t count, std::uint64_t seed);

/// The target rule applied to an arbitrary graph.
std::vector<std::string> synthetic_target(const LabeledGraph& graph);

}  // namespace g2t
