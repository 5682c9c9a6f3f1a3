#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "g2t/parameters.hpp"

namespace g2t {

struct AdamConfig {
    double lr = 0.001;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

struct AdamState {
    AdamConfig config;
    std::uint64_t step = 0;
    std::map<std::string, std::vector<double>> first_moment;
    std::map<std::string, std::vector<double>> second_moment;
};

/// One bias-corrected Adam update over every parameter, then zeroes the grads.
/// Throws ContractViolation if stored moments do not match a parameter's size.
void adam_step(AdamState& state, ParameterStore& params);

double global_grad_norm(const ParameterStore& params);
/// Rescales all gradients so their global L2 norm is at most max_norm.
/// Returns the norm before clipping.
double clip_grad_norm(ParameterStore& params, double max_norm);

}  // namespace g2t
