#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "g2t/config.hpp"
#include "g2t/dataset.hpp"
#include "g2t/gradcheck.hpp"

namespace g2t {

/// Model-level gradient checks run by `g2t gradcheck` and the acceptance binary.
struct ModelGradCheckCase {
    std::string name;
    ModelConfig config;
};

/// 2-layer residual GCN, 2-layer dense GCN with copy, BiLSTM baseline; hidden = embed = 4.
std::vector<ModelGradCheckCase> default_gradcheck_cases();

/// 3-node graph (precededBy with A0 Aenir, A1 Castle) and a 4-token target.
Example gradcheck_example();

struct ModelGradCheckResult {
    std::string name;
    GradCheckReport report;
    std::size_t scalars = 0;
    double seconds = 0.0;
};

/// Builds the model with `seed`, redraws every parameter from U(-1, 1) so that
/// biases and label embeddings are exercised, then checks the loss of `example`
/// (or the default example) with dropout off.
ModelGradCheckResult run_model_gradcheck(const ModelGradCheckCase& c, std::uint64_t seed,
                                         const GradCheckOptions& options = {});
ModelGradCheckResult run_model_gradcheck(const ModelGradCheckCase& c, const Example& example, std::uint64_t seed,
                                         const GradCheckOptions& options = {});

}  // namespace g2t
