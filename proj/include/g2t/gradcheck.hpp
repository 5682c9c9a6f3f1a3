#pragma once

#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "g2t/parameters.hpp"

namespace g2t {

struct GradCheckOptions {
    double epsilon = 1e-5;
    double tolerance = 1e-4;
    /// Test hook: mutates the analytic gradient of a parameter before comparison.
    std::function<void(std::string_view name, std::vector<double>& grad)> corrupt;
};

struct ParameterCheck {
    std::string name;
    double max_rel_error = 0.0;
    std::size_t worst_index = 0;
    double worst_analytic = 0.0;
    double worst_numeric = 0.0;
    std::size_t compared = 0;
    /// components whose +/- perturbations land on different sides of a kink
    std::size_t non_comparable = 0;
};

struct GradCheckReport {
    std::vector<ParameterCheck> parameters;
    double max_rel_error = 0.0;
    std::string worst_parameter;
    double tolerance = 0.0;

    bool passed() const { return max_rel_error < tolerance; }
};

/// Compares backward() gradients of f = sum of the entries of `loss_fn()`
/// against central differences (f(x+e) - f(x-e)) / 2e for every component of
/// every parameter. Returning per-term losses instead of their total gives the
/// same f with less rounding in the difference.
/// Relative error uses max(|analytic|, |numeric|, 1e-8) as denominator.
/// `loss_fn` must be deterministic. Throws NumericalError on non-finite values.
GradCheckReport grad_check(const std::function<Tensor()>& loss_fn, ParameterStore& params,
                           const GradCheckOptions& options = {});

}  // namespace g2t
