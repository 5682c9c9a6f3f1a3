#include "g2t/tensor.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <string>
#include <unordered_set>

#include "g2t/error.hpp"
#include "g2t/random.hpp"

namespace g2t {

using detail::TensorNode;
using NodePtr = std::shared_ptr<TensorNode>;

namespace {

thread_local bool t_grad_enabled = true;
thread_local KinkRecorder* t_kink = nullptr;
std::atomic<std::size_t> g_clamp_count{0};

// out (M x N) += a (M x K) * b (K x N), accumulating over k in ascending order.
// Every output row is computed from its own input row alone, so a row's result
// does not depend on its position or on the other rows (blocked BLAS kernels
// do not guarantee that).
void gemm_accumulate(const double* a, const double* b, double* out, std::size_t M, std::size_t K, std::size_t N) {
    for (std::size_t i = 0; i < M; ++i) {
        double* o = out + i * N;
        const double* ai = a + i * K;
        for (std::size_t k = 0; k < K; ++k) {
            const double aik = ai[k];
            const double* bk = b + k * N;
            for (std::size_t j = 0; j < N; ++j) o[j] += aik * bk[j];
        }
    }
}

std::vector<double> transposed(const std::vector<double>& v, std::size_t rows, std::size_t cols) {
    std::vector<double> out(v.size());
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c) out[c * rows + r] = v[r * cols + c];
    return out;
}

std::string shape_str(const TensorNode& n) { return std::to_string(n.rows) + "x" + std::to_string(n.cols); }

const NodePtr& need(const Tensor& t, const char* op) {
    if (!t.defined()) throw ContractViolation(std::string(op) + ": undefined tensor");
    return t.node_ptr();
}

// Creates an op result; records parents/backward only when some input needs a gradient.
Tensor result(std::size_t rows, std::size_t cols, std::vector<double> value, std::vector<NodePtr> parents,
              detail::BackwardFn fn) {
    if (value.size() != rows * cols || rows == 0 || cols == 0)
        throw ContractViolation("internal: op result of " + std::to_string(value.size()) + " values for shape " +
                                std::to_string(rows) + "x" + std::to_string(cols));
    auto node = std::make_shared<TensorNode>();
    node->rows = rows;
    node->cols = cols;
    node->value = std::move(value);
    node->leaf = false;
    const bool needs = t_grad_enabled && std::any_of(parents.begin(), parents.end(), [](const NodePtr& p) {
                           return p->requires_grad;
                       });
    if (needs) {
        node->requires_grad = true;
        node->parents = std::move(parents);
        node->backward = std::move(fn);
    }
    return make_tensor(std::move(node));
}

enum class Broadcast { same, row, col, scalar };

Broadcast broadcast_kind(const TensorNode& a, const TensorNode& b, const char* op) {
    if (b.rows == a.rows && b.cols == a.cols) return Broadcast::same;
    if (b.rows == 1 && b.cols == 1) return Broadcast::scalar;
    if (b.rows == 1 && b.cols == a.cols) return Broadcast::row;
    if (b.cols == 1 && b.rows == a.rows) return Broadcast::col;
    throw ContractViolation(std::string(op) + ": cannot broadcast " + shape_str(b) + " onto " + shape_str(a));
}

inline std::size_t bindex(Broadcast k, std::size_t r, std::size_t c, std::size_t cols) {
    switch (k) {
        case Broadcast::same: return r * cols + c;
        case Broadcast::row: return c;
        case Broadcast::col: return r;
        case Broadcast::scalar: return 0;
    }
    return 0;
}

template <typename Fwd, typename DA, typename DB>
Tensor binary(const Tensor& ta, const Tensor& tb, const char* name, Fwd fwd, DA da, DB db) {
    const auto& a = need(ta, name);
    const auto& b = need(tb, name);
    const auto kind = broadcast_kind(*a, *b, name);
    const std::size_t R = a->rows, C = a->cols;
    std::vector<double> out(R * C);
    for (std::size_t r = 0; r < R; ++r)
        for (std::size_t c = 0; c < C; ++c)
            out[r * C + c] = fwd(a->value[r * C + c], b->value[bindex(kind, r, c, C)]);
    return result(R, C, std::move(out), {a, b}, [kind, R, C, da, db](TensorNode& self) {
        auto& pa = *self.parents[0];
        auto& pb = *self.parents[1];
        for (std::size_t r = 0; r < R; ++r) {
            for (std::size_t c = 0; c < C; ++c) {
                const std::size_t i = r * C + c;
                const std::size_t j = bindex(kind, r, c, C);
                const double g = self.grad[i];
                if (pa.requires_grad) pa.ensure_grad()[i] += g * da(pa.value[i], pb.value[j], self.value[i]);
                if (pb.requires_grad) pb.ensure_grad()[j] += g * db(pa.value[i], pb.value[j], self.value[i]);
            }
        }
    });
}

template <typename Fwd, typename Deriv>
Tensor unary(const Tensor& ta, const char* name, Fwd fwd, Deriv deriv) {
    const auto& a = need(ta, name);
    std::vector<double> out(a->value.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = fwd(a->value[i]);
    return result(a->rows, a->cols, std::move(out), {a}, [deriv](TensorNode& self) {
        auto& p = *self.parents[0];
        auto& g = p.ensure_grad();
        for (std::size_t i = 0; i < self.grad.size(); ++i) g[i] += self.grad[i] * deriv(p.value[i], self.value[i]);
    });
}

}  // namespace

// ---- Tensor ---------------------------------------------------------------

Tensor make_tensor(std::shared_ptr<TensorNode> node) { return Tensor(std::move(node)); }

Tensor Tensor::zeros(std::size_t rows, std::size_t cols, bool requires_grad) {
    return from(rows, cols, std::vector<double>(rows * cols, 0.0), requires_grad);
}

Tensor Tensor::from(std::size_t rows, std::size_t cols, std::vector<double> values, bool requires_grad) {
    if (rows == 0 || cols == 0) throw ContractViolation("tensor dimensions must be positive");
    if (values.size() != rows * cols)
        throw ContractViolation("tensor value count " + std::to_string(values.size()) + " does not match shape " +
                                std::to_string(rows) + "x" + std::to_string(cols));
    auto node = std::make_shared<TensorNode>();
    node->rows = rows;
    node->cols = cols;
    node->value = std::move(values);
    node->requires_grad = requires_grad;
    if (requires_grad) node->grad.assign(node->value.size(), 0.0);
    return Tensor(std::move(node));
}

Tensor Tensor::row(std::vector<double> values, bool requires_grad) {
    const auto n = values.size();
    return from(1, n, std::move(values), requires_grad);
}

Tensor Tensor::scalar(double v, bool requires_grad) { return from(1, 1, {v}, requires_grad); }

std::size_t Tensor::rows() const { return node_->rows; }
std::size_t Tensor::cols() const { return node_->cols; }
std::size_t Tensor::size() const { return node_->value.size(); }
const std::vector<double>& Tensor::values() const { return node_->value; }
std::vector<double>& Tensor::mutable_values() { return node_->value; }
double Tensor::at(std::size_t r, std::size_t c) const {
    if (r >= rows() || c >= cols()) throw ContractViolation("tensor index out of range");
    return node_->value[r * cols() + c];
}
double Tensor::item() const {
    if (size() != 1) throw ContractViolation("item() on a tensor of shape " + shape_str(*node_));
    return node_->value[0];
}
bool Tensor::requires_grad() const { return node_->requires_grad; }
const std::vector<double>& Tensor::grad() const { return node_->ensure_grad(); }
std::vector<double>& Tensor::mutable_grad() { return node_->ensure_grad(); }
void Tensor::zero_grad() { node_->grad.assign(node_->value.size(), 0.0); }

// ---- graph control --------------------------------------------------------

void backward(const Tensor& loss) {
    const auto& root = need(loss, "backward");
    if (root->value.size() != 1)
        throw ContractViolation("backward: loss must be scalar, got shape " + shape_str(*root));
    if (root->consumed) throw ContractViolation("backward: graph already consumed; rebuild the forward pass");
    root->consumed = true;
    if (!root->requires_grad) return;

    // iterative post-order DFS over interior nodes
    std::vector<TensorNode*> order;
    std::unordered_set<TensorNode*> seen;
    std::vector<std::pair<TensorNode*, std::size_t>> stack{{root.get(), 0}};
    seen.insert(root.get());
    while (!stack.empty()) {
        auto& [node, next] = stack.back();
        if (next < node->parents.size()) {
            TensorNode* p = node->parents[next++].get();
            if (p->requires_grad && !p->leaf && seen.insert(p).second) stack.emplace_back(p, 0);
        } else {
            order.push_back(node);
            stack.pop_back();
        }
    }
    root->ensure_grad()[0] = 1.0;
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        TensorNode* node = *it;
        node->ensure_grad();
        if (node->backward) node->backward(*node);
    }
    for (TensorNode* node : order) {
        node->backward = nullptr;
        node->parents.clear();
        node->grad.clear();
        node->consumed = true;
    }
}

NoGradGuard::NoGradGuard() : previous_(t_grad_enabled) { t_grad_enabled = false; }
NoGradGuard::~NoGradGuard() { t_grad_enabled = previous_; }
bool grad_enabled() { return t_grad_enabled; }

KinkRecorder::KinkRecorder() : previous_(t_kink) { t_kink = this; }
KinkRecorder::~KinkRecorder() { t_kink = previous_; }
void record_kink(bool positive_side) {
    if (t_kink) t_kink->pattern_.push_back(positive_side);
}
bool kink_recording() { return t_kink != nullptr; }

// ---- elementwise ----------------------------------------------------------

Tensor add(const Tensor& a, const Tensor& b) {
    return binary(
        a, b, "add", [](double x, double y) { return x + y; }, [](double, double, double) { return 1.0; },
        [](double, double, double) { return 1.0; });
}

Tensor sub(const Tensor& a, const Tensor& b) {
    return binary(
        a, b, "sub", [](double x, double y) { return x - y; }, [](double, double, double) { return 1.0; },
        [](double, double, double) { return -1.0; });
}

Tensor mul(const Tensor& a, const Tensor& b) {
    return binary(
        a, b, "mul", [](double x, double y) { return x * y; }, [](double, double y, double) { return y; },
        [](double x, double, double) { return x; });
}

Tensor affine(const Tensor& a, double alpha, double beta) {
    return unary(
        a, "affine", [=](double x) { return alpha * x + beta; }, [=](double, double) { return alpha; });
}

Tensor relu(const Tensor& a) {
    const auto& n = need(a, "relu");
    if (kink_recording())
        for (double x : n->value) record_kink(x > 0.0);
    return unary(
        a, "relu", [](double x) { return x > 0.0 ? x : 0.0; }, [](double x, double) { return x > 0.0 ? 1.0 : 0.0; });
}

Tensor sigmoid(const Tensor& a) {
    return unary(
        a, "sigmoid",
        [](double x) {
            if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
            const double e = std::exp(x);
            return e / (1.0 + e);
        },
        [](double, double y) { return y * (1.0 - y); });
}

Tensor tanh(const Tensor& a) {
    return unary(
        a, "tanh", [](double x) { return std::tanh(x); }, [](double, double y) { return 1.0 - y * y; });
}

Tensor exp(const Tensor& a) {
    return unary(
        a, "exp", [](double x) { return std::exp(x); }, [](double, double y) { return y; });
}

Tensor log(const Tensor& a) {
    return unary(
        a, "log", [](double x) { return std::log(x); }, [](double x, double) { return 1.0 / x; });
}

Tensor log_clamped(const Tensor& a, double floor) {
    const auto& n = need(a, "log_clamped");
    for (double x : n->value) {
        if (!(x > floor)) g_clamp_count.fetch_add(1, std::memory_order_relaxed);
        if (kink_recording()) record_kink(x > floor);
    }
    return unary(
        a, "log_clamped", [floor](double x) { return std::log(x > floor ? x : floor); },
        [floor](double x, double) { return x > floor ? 1.0 / x : 0.0; });
}

std::size_t clamp_count() { return g_clamp_count.load(); }

// ---- linear algebra -------------------------------------------------------

Tensor matmul(const Tensor& ta, const Tensor& tb) {
    const auto& a = need(ta, "matmul");
    const auto& b = need(tb, "matmul");
    if (a->cols != b->rows)
        throw ContractViolation("matmul: shape mismatch " + shape_str(*a) + " * " + shape_str(*b));
    const std::size_t M = a->rows, K = a->cols, N = b->cols;
    std::vector<double> out(M * N, 0.0);
    gemm_accumulate(a->value.data(), b->value.data(), out.data(), M, K, N);
    return result(M, N, std::move(out), {a, b}, [M, K, N](TensorNode& self) {
        auto& pa = *self.parents[0];
        auto& pb = *self.parents[1];
        if (pa.requires_grad)
            gemm_accumulate(self.grad.data(), transposed(pb.value, K, N).data(), pa.ensure_grad().data(), M, N, K);
        if (pb.requires_grad)
            gemm_accumulate(transposed(pa.value, M, K).data(), self.grad.data(), pb.ensure_grad().data(), K, M, N);
    });
}

Tensor transpose(const Tensor& ta) {
    const auto& a = need(ta, "transpose");
    const std::size_t R = a->rows, C = a->cols;
    std::vector<double> out(R * C);
    for (std::size_t r = 0; r < R; ++r)
        for (std::size_t c = 0; c < C; ++c) out[c * R + r] = a->value[r * C + c];
    return result(C, R, std::move(out), {a}, [R, C](TensorNode& self) {
        auto& g = self.parents[0]->ensure_grad();
        for (std::size_t r = 0; r < R; ++r)
            for (std::size_t c = 0; c < C; ++c) g[r * C + c] += self.grad[c * R + r];
    });
}

// ---- structural -----------------------------------------------------------

Tensor concat_cols(std::span<const Tensor> parts) {
    if (parts.empty()) throw ContractViolation("concat_cols: no inputs");
    const std::size_t R = need(parts[0], "concat_cols")->rows;
    std::vector<NodePtr> ps;
    std::vector<std::size_t> offsets;
    std::size_t C = 0;
    for (const auto& p : parts) {
        const auto& n = need(p, "concat_cols");
        if (n->rows != R) throw ContractViolation("concat_cols: row mismatch " + shape_str(*n));
        offsets.push_back(C);
        C += n->cols;
        ps.push_back(n);
    }
    std::vector<double> out(R * C);
    for (std::size_t k = 0; k < ps.size(); ++k)
        for (std::size_t r = 0; r < R; ++r)
            std::copy_n(ps[k]->value.begin() + std::ptrdiff_t(r * ps[k]->cols), ps[k]->cols,
                        out.begin() + std::ptrdiff_t(r * C + offsets[k]));
    return result(R, C, std::move(out), std::move(ps), [offsets, R, C](TensorNode& self) {
        for (std::size_t k = 0; k < self.parents.size(); ++k) {
            auto& p = *self.parents[k];
            if (!p.requires_grad) continue;
            auto& g = p.ensure_grad();
            for (std::size_t r = 0; r < R; ++r)
                for (std::size_t c = 0; c < p.cols; ++c) g[r * p.cols + c] += self.grad[r * C + offsets[k] + c];
        }
    });
}

Tensor concat_rows(std::span<const Tensor> parts) {
    if (parts.empty()) throw ContractViolation("concat_rows: no inputs");
    const std::size_t C = need(parts[0], "concat_rows")->cols;
    std::vector<NodePtr> ps;
    std::vector<std::size_t> offsets;
    std::vector<double> out;
    for (const auto& p : parts) {
        const auto& n = need(p, "concat_rows");
        if (n->cols != C) throw ContractViolation("concat_rows: column mismatch " + shape_str(*n));
        offsets.push_back(out.size());
        out.insert(out.end(), n->value.begin(), n->value.end());
        ps.push_back(n);
    }
    const std::size_t R = out.size() / C;
    return result(R, C, std::move(out), std::move(ps), [offsets](TensorNode& self) {
        for (std::size_t k = 0; k < self.parents.size(); ++k) {
            auto& p = *self.parents[k];
            if (!p.requires_grad) continue;
            auto& g = p.ensure_grad();
            for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[offsets[k] + i];
        }
    });
}

Tensor slice_cols(const Tensor& ta, std::size_t start, std::size_t len) {
    const auto& a = need(ta, "slice_cols");
    if (len == 0 || start + len > a->cols) throw ContractViolation("slice_cols: range out of bounds");
    const std::size_t R = a->rows, C = a->cols;
    std::vector<double> out(R * len);
    for (std::size_t r = 0; r < R; ++r)
        for (std::size_t c = 0; c < len; ++c) out[r * len + c] = a->value[r * C + start + c];
    return result(R, len, std::move(out), {a}, [R, C, start, len](TensorNode& self) {
        auto& g = self.parents[0]->ensure_grad();
        for (std::size_t r = 0; r < R; ++r)
            for (std::size_t c = 0; c < len; ++c) g[r * C + start + c] += self.grad[r * len + c];
    });
}

Tensor slice_rows(const Tensor& ta, std::size_t start, std::size_t len) {
    const auto& a = need(ta, "slice_rows");
    if (len == 0 || start + len > a->rows) throw ContractViolation("slice_rows: range out of bounds");
    const std::size_t C = a->cols;
    std::vector<double> out(a->value.begin() + std::ptrdiff_t(start * C),
                            a->value.begin() + std::ptrdiff_t((start + len) * C));
    return result(len, C, std::move(out), {a}, [start, C](TensorNode& self) {
        auto& g = self.parents[0]->ensure_grad();
        for (std::size_t i = 0; i < self.grad.size(); ++i) g[start * C + i] += self.grad[i];
    });
}

Tensor gather_rows(const Tensor& ttable, std::span<const std::size_t> index) {
    const auto& t = need(ttable, "gather_rows");
    if (index.empty()) throw ContractViolation("gather_rows: empty index");
    const std::size_t C = t->cols;
    std::vector<double> out(index.size() * C);
    for (std::size_t i = 0; i < index.size(); ++i) {
        if (index[i] >= t->rows)
            throw ContractViolation("gather_rows: index " + std::to_string(index[i]) + " out of range " +
                                    shape_str(*t));
        std::copy_n(t->value.begin() + std::ptrdiff_t(index[i] * C), C, out.begin() + std::ptrdiff_t(i * C));
    }
    std::vector<std::size_t> idx(index.begin(), index.end());
    return result(index.size(), C, std::move(out), {t}, [idx = std::move(idx), C](TensorNode& self) {
        auto& g = self.parents[0]->ensure_grad();
        for (std::size_t i = 0; i < idx.size(); ++i)
            for (std::size_t c = 0; c < C; ++c) g[idx[i] * C + c] += self.grad[i * C + c];
    });
}

Tensor scatter_add_rows(const Tensor& tsrc, std::span<const std::size_t> target, std::size_t out_rows) {
    const auto& s = need(tsrc, "scatter_add_rows");
    if (target.size() != s->rows) throw ContractViolation("scatter_add_rows: one target per source row required");
    const std::size_t C = s->cols;
    std::vector<double> out(out_rows * C, 0.0);
    for (std::size_t i = 0; i < target.size(); ++i) {
        if (target[i] >= out_rows) throw ContractViolation("scatter_add_rows: target out of range");
        for (std::size_t c = 0; c < C; ++c) out[target[i] * C + c] += s->value[i * C + c];
    }
    std::vector<std::size_t> tgt(target.begin(), target.end());
    return result(out_rows, C, std::move(out), {s}, [tgt = std::move(tgt), C](TensorNode& self) {
        auto& g = self.parents[0]->ensure_grad();
        for (std::size_t i = 0; i < tgt.size(); ++i)
            for (std::size_t c = 0; c < C; ++c) g[i * C + c] += self.grad[tgt[i] * C + c];
    });
}

Tensor scatter_add_cols(const Tensor& tsrc, std::span<const std::size_t> target, std::size_t out_cols) {
    const auto& s = need(tsrc, "scatter_add_cols");
    if (target.size() != s->cols) throw ContractViolation("scatter_add_cols: one target per source column required");
    const std::size_t R = s->rows, C = s->cols;
    std::vector<double> out(R * out_cols, 0.0);
    for (std::size_t c = 0; c < C; ++c)
        if (target[c] >= out_cols) throw ContractViolation("scatter_add_cols: target out of range");
    for (std::size_t r = 0; r < R; ++r)
        for (std::size_t c = 0; c < C; ++c) out[r * out_cols + target[c]] += s->value[r * C + c];
    std::vector<std::size_t> tgt(target.begin(), target.end());
    return result(R, out_cols, std::move(out), {s}, [tgt = std::move(tgt), R, C, out_cols](TensorNode& self) {
        auto& g = self.parents[0]->ensure_grad();
        for (std::size_t r = 0; r < R; ++r)
            for (std::size_t c = 0; c < C; ++c) g[r * C + c] += self.grad[r * out_cols + tgt[c]];
    });
}

// ---- reductions / normalisation ------------------------------------------

Tensor softmax_rows(const Tensor& ta, const std::vector<bool>& mask) {
    const auto& a = need(ta, "softmax_rows");
    const std::size_t R = a->rows, C = a->cols;
    if (!mask.empty() && mask.size() != C) throw ContractViolation("softmax_rows: mask length mismatch");
    if (!mask.empty() && std::none_of(mask.begin(), mask.end(), [](bool m) { return m; }))
        throw ContractViolation("softmax_rows: all positions masked");
    std::vector<double> out(R * C, 0.0);
    for (std::size_t r = 0; r < R; ++r) {
        double mx = -std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < C; ++c)
            if (mask.empty() || mask[c]) mx = std::max(mx, a->value[r * C + c]);
        double z = 0.0;
        for (std::size_t c = 0; c < C; ++c) {
            if (!mask.empty() && !mask[c]) continue;
            out[r * C + c] = std::exp(a->value[r * C + c] - mx);
            z += out[r * C + c];
        }
        for (std::size_t c = 0; c < C; ++c) out[r * C + c] /= z;
    }
    return result(R, C, std::move(out), {a}, [R, C](TensorNode& self) {
        auto& g = self.parents[0]->ensure_grad();
        for (std::size_t r = 0; r < R; ++r) {
            double dot = 0.0;
            for (std::size_t c = 0; c < C; ++c) dot += self.grad[r * C + c] * self.value[r * C + c];
            for (std::size_t c = 0; c < C; ++c)
                g[r * C + c] += self.value[r * C + c] * (self.grad[r * C + c] - dot);
        }
    });
}

Tensor log_softmax_rows(const Tensor& ta) {
    const auto& a = need(ta, "log_softmax_rows");
    const std::size_t R = a->rows, C = a->cols;
    std::vector<double> out(R * C);
    for (std::size_t r = 0; r < R; ++r) {
        double mx = -std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < C; ++c) mx = std::max(mx, a->value[r * C + c]);
        double z = 0.0;
        for (std::size_t c = 0; c < C; ++c) z += std::exp(a->value[r * C + c] - mx);
        const double lz = mx + std::log(z);
        for (std::size_t c = 0; c < C; ++c) out[r * C + c] = a->value[r * C + c] - lz;
    }
    return result(R, C, std::move(out), {a}, [R, C](TensorNode& self) {
        auto& g = self.parents[0]->ensure_grad();
        for (std::size_t r = 0; r < R; ++r) {
            double gs = 0.0;
            for (std::size_t c = 0; c < C; ++c) gs += self.grad[r * C + c];
            for (std::size_t c = 0; c < C; ++c)
                g[r * C + c] += self.grad[r * C + c] - std::exp(self.value[r * C + c]) * gs;
        }
    });
}

Tensor sum(const Tensor& ta) {
    const auto& a = need(ta, "sum");
    double s = 0.0;
    for (double x : a->value) s += x;
    return result(1, 1, {s}, {a}, [](TensorNode& self) {
        auto& g = self.parents[0]->ensure_grad();
        for (double& x : g) x += self.grad[0];
    });
}

Tensor pick(const Tensor& ta, std::span<const std::size_t> col) {
    const auto& a = need(ta, "pick");
    if (col.size() != a->rows) throw ContractViolation("pick: one column index per row required");
    const std::size_t C = a->cols;
    std::vector<double> out(col.size());
    for (std::size_t r = 0; r < col.size(); ++r) {
        if (col[r] >= C) throw ContractViolation("pick: column " + std::to_string(col[r]) + " out of range");
        out[r] = a->value[r * C + col[r]];
    }
    std::vector<std::size_t> cs(col.begin(), col.end());
    const std::size_t n = cs.size();
    return result(n, 1, std::move(out), {a}, [cs = std::move(cs), C](TensorNode& self) {
        auto& g = self.parents[0]->ensure_grad();
        for (std::size_t r = 0; r < cs.size(); ++r) g[r * C + cs[r]] += self.grad[r];
    });
}

Tensor dropout(const Tensor& ta, double rate, bool training, Rng& rng) {
    need(ta, "dropout");
    if (!(rate >= 0.0 && rate < 1.0))
        throw ContractViolation("dropout: rate must be in [0, 1), got " + std::to_string(rate));
    if (!training || rate == 0.0) return ta;
    const double keep_scale = 1.0 / (1.0 - rate);
    std::vector<double> mask(ta.size());
    for (double& m : mask) m = rng.uniform() < rate ? 0.0 : keep_scale;
    return mul(ta, Tensor::from(ta.rows(), ta.cols(), std::move(mask)));
}

}  // namespace g2t
