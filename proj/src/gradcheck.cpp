#include "g2t/gradcheck.hpp"

#include <algorithm>
#include <cmath>

#include "g2t/error.hpp"

namespace g2t {

namespace {

struct Probe {
    std::vector<double> values;
    std::vector<bool> kinks;
};

Probe evaluate(const std::function<Tensor()>& loss_fn) {
    NoGradGuard no_grad;
    KinkRecorder recorder;
    auto values = loss_fn().values();
    return {std::move(values), recorder.pattern()};
}

// f(+) - f(-) for f = sum of entries, taken entry by entry: the entries are
// smaller than their total, so less of the difference is lost to rounding.
double difference(const Probe& plus, const Probe& minus) {
    double d = 0.0;
    for (std::size_t k = 0; k < plus.values.size(); ++k) d += plus.values[k] - minus.values[k];
    return d;
}

}  // namespace

GradCheckReport grad_check(const std::function<Tensor()>& loss_fn, ParameterStore& params,
                           const GradCheckOptions& options) {
    params.zero_grad();
    const Tensor loss = sum(loss_fn());
    if (!std::isfinite(loss.item())) throw NumericalError("grad_check: loss is not finite");
    backward(loss);

    GradCheckReport report;
    report.tolerance = options.tolerance;
    for (auto& p : params.parameters()) {
        std::vector<double> analytic = p.tensor.grad();
        if (options.corrupt) options.corrupt(p.name, analytic);
        ParameterCheck check{p.name};
        auto& values = p.tensor.mutable_values();
        for (std::size_t i = 0; i < values.size(); ++i) {
            const double original = values[i];
            values[i] = original + options.epsilon;
            const auto plus = evaluate(loss_fn);
            values[i] = original - options.epsilon;
            const auto minus = evaluate(loss_fn);
            values[i] = original;

            const double numeric = difference(plus, minus) / (2.0 * options.epsilon);
            if (!std::isfinite(analytic[i]) || !std::isfinite(numeric))
                throw NumericalError("grad_check: non-finite gradient for " + p.name + "[" + std::to_string(i) + "]");
            if (plus.kinks != minus.kinks) {
                ++check.non_comparable;
                continue;
            }
            const double denom = std::max({std::abs(analytic[i]), std::abs(numeric), 1e-8});
            const double rel = std::abs(analytic[i] - numeric) / denom;
            ++check.compared;
            if (rel > check.max_rel_error) {
                check.max_rel_error = rel;
                check.worst_index = i;
                check.worst_analytic = analytic[i];
                check.worst_numeric = numeric;
            }
        }
        if (check.max_rel_error > report.max_rel_error || report.worst_parameter.empty()) {
            if (check.max_rel_error >= report.max_rel_error) {
                report.max_rel_error = check.max_rel_error;
                report.worst_parameter = check.name;
            }
        }
        report.parameters.push_back(std::move(check));
    }
    params.zero_grad();
    return report;
}

}  // namespace g2t
