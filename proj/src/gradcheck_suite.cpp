#include "g2t/gradcheck_suite.hpp"

#include <chrono>

#include "g2t/model.hpp"
#include "g2t/random.hpp"

namespace g2t {

std::vector<ModelGradCheckCase> default_gradcheck_cases() {
    ModelConfig base;
    base.gcn_layers = 2;
    base.hidden = 4;
    base.embed_dim = 4;
    base.dropout = 0.0;

    ModelConfig residual = base;
    residual.skip = SkipKind::residual;
    ModelConfig dense = base;
    dense.skip = SkipKind::dense;
    dense.copy = true;
    ModelConfig bilstm = base;
    bilstm.encoder = EncoderKind::bilstm;
    return {{"gcn-residual", residual}, {"gcn-dense-copy", dense}, {"bilstm", bilstm}};
}

Example gradcheck_example() {
    LabeledGraph g("gradcheck", {{"Aenir", {}}, {"precededBy", {}}, {"Castle", {}}},
                   {{1, 0, "A0"}, {1, 2, "A1"}});
    return {g, {"Aenir", "follows", "Castle", "."}, {}};
}

ModelGradCheckResult run_model_gradcheck(const ModelGradCheckCase& c, std::uint64_t seed,
                                         const GradCheckOptions& options) {
    return run_model_gradcheck(c, gradcheck_example(), seed, options);
}

ModelGradCheckResult run_model_gradcheck(const ModelGradCheckCase& c, const Example& example, std::uint64_t seed,
                                         const GradCheckOptions& options) {
    const auto start = std::chrono::steady_clock::now();
    Model model(c.config, Vocabularies::build({example}), seed);
    Rng draw = Rng(seed).stream("gradcheck");
    for (auto& p : model.params().parameters())
        for (double& x : p.tensor.mutable_values()) x = draw.uniform(-1.0, 1.0);
    const auto prepared = model.prepare(example);
    auto loss = [&] {
        Rng rng(seed);
        return model.loss(prepared, false, rng).steps;
    };
    ModelGradCheckResult r;
    r.name = c.name;
    r.report = grad_check(loss, model.params(), options);
    r.scalars = model.params().scalar_count();
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return r;
}

}  // namespace g2t
