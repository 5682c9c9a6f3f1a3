#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <vector>

namespace g2t {

class Rng;

namespace detail {
struct TensorNode;
}

/// Dense row-major rank-2 array taking part in reverse-mode differentiation.
/// Copies are shallow handles; a Tensor produced by an op keeps its inputs alive
/// until backward() releases the recorded graph.
class Tensor {
  public:
    Tensor() = default;

    static Tensor zeros(std::size_t rows, std::size_t cols, bool requires_grad = false);
    static Tensor from(std::size_t rows, std::size_t cols, std::vector<double> values, bool requires_grad = false);
    static Tensor row(std::vector<double> values, bool requires_grad = false);
    static Tensor scalar(double v, bool requires_grad = false);

    bool defined() const { return node_ != nullptr; }
    std::size_t rows() const;
    std::size_t cols() const;
    std::size_t size() const;
    std::vector<std::size_t> shape() const { return {rows(), cols()}; }

    const std::vector<double>& values() const;
    /// In-place write access, for parameters and test fixtures.
    std::vector<double>& mutable_values();
    double at(std::size_t r, std::size_t c) const;
    double item() const;

    bool requires_grad() const;
    /// Zero-filled until a backward pass reaches this tensor.
    const std::vector<double>& grad() const;
    std::vector<double>& mutable_grad();
    void zero_grad();

    detail::TensorNode* node() const { return node_.get(); }
    const std::shared_ptr<detail::TensorNode>& node_ptr() const { return node_; }

  private:
    explicit Tensor(std::shared_ptr<detail::TensorNode> node) : node_(std::move(node)) {}
    std::shared_ptr<detail::TensorNode> node_;

    friend Tensor make_tensor(std::shared_ptr<detail::TensorNode>);
};

namespace detail {

using BackwardFn = std::function<void(TensorNode& self)>;

struct TensorNode {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> value;
    std::vector<double> grad;
    bool requires_grad = false;
    bool leaf = true;
    bool consumed = false;
    std::vector<std::shared_ptr<TensorNode>> parents;
    BackwardFn backward;

    std::vector<double>& ensure_grad() {
        if (grad.size() != value.size()) grad.assign(value.size(), 0.0);
        return grad;
    }
};

}  // namespace detail

Tensor make_tensor(std::shared_ptr<detail::TensorNode> node);

/// Propagates d(loss)/d(x) into every tensor the scalar `loss` depends on.
/// Leaf gradients accumulate; the recorded graph is released afterwards, so a
/// second call on the same loss throws ContractViolation.
void backward(const Tensor& loss);

/// Disables graph recording on this thread while alive.
class NoGradGuard {
  public:
    NoGradGuard();
    ~NoGradGuard();
    NoGradGuard(const NoGradGuard&) = delete;
    NoGradGuard& operator=(const NoGradGuard&) = delete;

  private:
    bool previous_;
};

bool grad_enabled();

/// While installed, non-smooth ops append one bit per element (which side of
/// the kink the input fell on). Used by grad_check to spot kink crossings.
class KinkRecorder {
  public:
    KinkRecorder();
    ~KinkRecorder();
    KinkRecorder(const KinkRecorder&) = delete;
    KinkRecorder& operator=(const KinkRecorder&) = delete;

    const std::vector<bool>& pattern() const { return pattern_; }

  private:
    std::vector<bool> pattern_;
    KinkRecorder* previous_;

    friend void record_kink(bool);
};

void record_kink(bool positive_side);
bool kink_recording();

// ---- ops ------------------------------------------------------------------
// Binary elementwise ops accept b with the same shape as a, or 1 x cols
// (row broadcast), rows x 1 (column broadcast), or 1 x 1.

Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
/// alpha * a + beta
Tensor affine(const Tensor& a, double alpha, double beta);
Tensor matmul(const Tensor& a, const Tensor& b);
Tensor transpose(const Tensor& a);

Tensor relu(const Tensor& a);
Tensor sigmoid(const Tensor& a);
Tensor tanh(const Tensor& a);
Tensor exp(const Tensor& a);
Tensor log(const Tensor& a);
/// log(max(a, floor)); values at or below the floor get zero gradient and bump
/// clamp_count().
Tensor log_clamped(const Tensor& a, double floor);
std::size_t clamp_count();

Tensor concat_cols(std::span<const Tensor> parts);
Tensor concat_rows(std::span<const Tensor> parts);
Tensor slice_cols(const Tensor& a, std::size_t start, std::size_t len);
Tensor slice_rows(const Tensor& a, std::size_t start, std::size_t len);

/// out[i] = table[index[i]]
Tensor gather_rows(const Tensor& table, std::span<const std::size_t> index);
/// out[target[i]] += src[i], out has `out_rows` rows.
Tensor scatter_add_rows(const Tensor& src, std::span<const std::size_t> target, std::size_t out_rows);
/// out[r][target[c]] += src[r][c], out has `out_cols` columns.
Tensor scatter_add_cols(const Tensor& src, std::span<const std::size_t> target, std::size_t out_cols);

/// Row-wise softmax. `mask` (one flag per column, true = keep) is optional;
/// masked columns get exactly zero probability.
Tensor softmax_rows(const Tensor& a, const std::vector<bool>& mask = {});
Tensor log_softmax_rows(const Tensor& a);

Tensor sum(const Tensor& a);
/// out[r] = a[r][col[r]], rows x 1.
Tensor pick(const Tensor& a, std::span<const std::size_t> col);

/// Inverted dropout; identity when !training or rate == 0. Throws for rate
/// outside [0, 1).
Tensor dropout(const Tensor& a, double rate, bool training, Rng& rng);

}  // namespace g2t
