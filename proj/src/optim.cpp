#include "g2t/optim.hpp"

#include <cmath>

#include "g2t/error.hpp"

namespace g2t {

void adam_step(AdamState& state, ParameterStore& params) {
    const auto& cfg = state.config;
    ++state.step;
    const double t = static_cast<double>(state.step);
    const double bc1 = 1.0 - std::pow(cfg.beta1, t);
    const double bc2 = 1.0 - std::pow(cfg.beta2, t);
    for (auto& p : params.parameters()) {
        auto& value = p.tensor.mutable_values();
        auto& grad = p.tensor.mutable_grad();
        auto& m = state.first_moment[p.name];
        auto& v = state.second_moment[p.name];
        if (m.empty()) m.assign(value.size(), 0.0);
        if (v.empty()) v.assign(value.size(), 0.0);
        if (m.size() != value.size() || v.size() != value.size())
            throw ContractViolation("adam_step: moment shape mismatch for " + p.name);
        for (std::size_t i = 0; i < value.size(); ++i) {
            const double g = grad[i];
            m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * g;
            v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * g * g;
            const double m_hat = m[i] / bc1;
            const double v_hat = v[i] / bc2;
            value[i] -= cfg.lr * m_hat / (std::sqrt(v_hat) + cfg.epsilon);
        }
        p.tensor.zero_grad();
    }
}

double global_grad_norm(const ParameterStore& params) {
    double sq = 0.0;
    for (const auto& p : params.parameters())
        for (double g : p.tensor.grad()) sq += g * g;
    return std::sqrt(sq);
}

double clip_grad_norm(ParameterStore& params, double max_norm) {
    const double norm = global_grad_norm(params);
    if (norm > max_norm && norm > 0.0) {
        const double scale = max_norm / norm;
        for (auto& p : params.parameters())
            for (double& g : p.tensor.mutable_grad()) g *= scale;
    }
    return norm;
}

}  // namespace g2t
