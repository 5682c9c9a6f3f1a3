#include "g2t/encoders.hpp"

#include "g2t/error.hpp"
#include "g2t/parameters.hpp"
#include "g2t/random.hpp"

namespace g2t {

namespace {

constexpr std::array<EdgeDirection, 3> kDirections = {EdgeDirection::in, EdgeDirection::out, EdgeDirection::loop};

std::size_t slot(EdgeDirection d) { return static_cast<std::size_t>(d); }

}  // namespace

GraphIndex index_graph(const LabeledGraph& g, const Vocabulary& labels, bool strict) {
    GraphIndex idx;
    idx.nodes = g.node_count();
    auto label_row = [&](const std::string& label) {
        auto found = labels.find(label);
        if (found) return *found;
        if (strict) throw DataError("unknown edge label '" + label + "' in graph " + g.id());
        return labels.unk_index();
    };
    for (std::size_t v = 0; v < idx.nodes; ++v) {
        for (const auto& entry : neighbourhood(g, v)) {
            auto& block = idx.blocks[slot(entry.direction)];
            block.src.push_back(entry.node);
            block.dst.push_back(v);
            block.label.push_back(label_row(entry.label));
        }
    }
    return idx;
}

GcnLayerParams GcnLayerParams::create(ParameterStore& store, const std::string& prefix, std::size_t input_width,
                                      std::size_t d, std::size_t labels, Rng& rng) {
    GcnLayerParams p;
    for (auto dir : kDirections) {
        const std::string tag(to_string(dir));
        const auto s = slot(dir);
        p.W[s] = store.add(prefix + ".W_" + tag, input_width, d, Init::glorot, rng);
        p.b[s] = store.add(prefix + ".b_" + tag, dir == EdgeDirection::loop ? 1 : labels, d, Init::zeros, rng);
        p.gate_w[s] = store.add(prefix + ".gate_w_" + tag, input_width, 1, Init::glorot, rng);
        p.gate_b[s] = store.add(prefix + ".gate_b_" + tag, 1, 1, Init::zeros, rng);
    }
    return p;
}

Tensor gcn_layer(const Tensor& H, const GraphIndex& g, const GcnLayerParams& p, GateOverride gates) {
    if (H.rows() != g.nodes)
        throw ContractViolation("gcn_layer: " + std::to_string(H.rows()) + " state rows for " +
                                std::to_string(g.nodes) + " nodes");
    if (H.cols() != p.input_width())
        throw ContractViolation("gcn_layer: input width " + std::to_string(H.cols()) + ", layer expects " +
                                std::to_string(p.input_width()));
    Tensor total;
    for (auto dir : kDirections) {
        const auto s = slot(dir);
        const auto& block = g.blocks[s];
        if (block.src.empty()) continue;
        Tensor projected = matmul(H, p.W[s]);
        Tensor bias = dir == EdgeDirection::loop ? p.b[s] : gather_rows(p.b[s], block.label);
        Tensor message = add(gather_rows(projected, block.src), bias);
        Tensor gate = gates.value ? Tensor::zeros(block.src.size(), 1)
                                  : gather_rows(sigmoid(add(matmul(H, p.gate_w[s]), p.gate_b[s])), block.src);
        if (gates.value) std::fill(gate.mutable_values().begin(), gate.mutable_values().end(), *gates.value);
        Tensor contribution = scatter_add_rows(mul(message, gate), block.dst, g.nodes);
        total = total.defined() ? add(total, contribution) : contribution;
    }
    if (!total.defined()) total = Tensor::zeros(g.nodes, p.width());
    return relu(total);
}

std::size_t gcn_output_width(std::size_t input_width, std::size_t d, std::size_t layers, SkipKind skip) {
    if (skip == SkipKind::dense) return input_width + layers * d;
    return d;
}

EncoderOutput gcn_encode(const Tensor& embeddings, const GraphIndex& g, const std::vector<GcnLayerParams>& layers,
                         const GcnEncodeOptions& opts, Rng& rng) {
    if (layers.empty()) throw ConfigError("gcn_encode needs at least one layer");
    Tensor h = embeddings;
    for (std::size_t k = 0; k < layers.size(); ++k) {
        if (k > 0) h = dropout(h, opts.dropout, opts.training, rng);
        Tensor out = gcn_layer(h, g, layers[k], opts.gates);
        switch (opts.skip) {
            case SkipKind::none: h = out; break;
            case SkipKind::residual:
                if (out.cols() != h.cols())
                    throw ConfigError("residual skip at layer " + std::to_string(k) + ": input width " +
                                      std::to_string(h.cols()) + " != layer width " + std::to_string(out.cols()));
                h = add(out, h);
                break;
            case SkipKind::dense: {
                const std::array<Tensor, 2> parts = {out, h};
                h = concat_cols(parts);
                break;
            }
        }
    }
    return {h, std::vector<bool>(g.nodes, true)};
}

Tensor compose_sr_node(const Tensor& lemma, const std::vector<Tensor>& features, std::size_t feature_dim) {
    Tensor sum_f = Tensor::zeros(1, feature_dim);
    for (const auto& f : features) {
        if (f.rows() != 1 || f.cols() != feature_dim)
            throw ContractViolation("feature vector of width " + std::to_string(f.cols()) + ", expected " +
                                    std::to_string(feature_dim));
        sum_f = add(sum_f, f);
    }
    const std::array<Tensor, 2> parts = {lemma, sum_f};
    return concat_cols(parts);
}

Tensor compose_nodes(const Tensor& lemma_table, const std::vector<std::size_t>& lemmas, const Tensor& feature_table,
                     const std::vector<std::vector<std::size_t>>& features) {
    const std::size_t n = lemmas.size();
    if (features.size() != n) throw ContractViolation("compose_nodes: feature list per node required");
    std::vector<std::size_t> rows;
    std::vector<std::size_t> owner;
    for (std::size_t v = 0; v < n; ++v)
        for (auto f : features[v]) {
            rows.push_back(f);
            owner.push_back(v);
        }
    Tensor summed = rows.empty() ? Tensor::zeros(n, feature_table.cols())
                                 : scatter_add_rows(gather_rows(feature_table, rows), owner, n);
    const std::array<Tensor, 2> parts = {gather_rows(lemma_table, lemmas), summed};
    return concat_cols(parts);
}

LstmParams LstmParams::create(ParameterStore& store, const std::string& prefix, std::size_t input,
                              std::size_t hidden, Rng& rng) {
    LstmParams p;
    p.Wx = store.add(prefix + ".Wx", input, 4 * hidden, Init::glorot, rng);
    p.Wh = store.add(prefix + ".Wh", hidden, 4 * hidden, Init::glorot, rng);
    p.b = store.add(prefix + ".b", 1, 4 * hidden, Init::zeros, rng);
    return p;
}

LstmState lstm_step(const Tensor& x, const LstmState& prev, const LstmParams& p) {
    const std::size_t h = p.hidden();
    Tensor z = add(add(matmul(x, p.Wx), matmul(prev.h, p.Wh)), p.b);
    Tensor i = sigmoid(slice_cols(z, 0, h));
    Tensor f = sigmoid(slice_cols(z, h, h));
    Tensor g = tanh(slice_cols(z, 2 * h, h));
    Tensor o = sigmoid(slice_cols(z, 3 * h, h));
    Tensor c = add(mul(f, prev.c), mul(i, g));
    return {mul(o, tanh(c)), c};
}

Tensor bilstm_states(const Tensor& embeddings, const LstmParams& forward, const LstmParams& backward) {
    const std::size_t T = embeddings.rows();
    if (T == 0) throw ContractViolation("bilstm_encode: empty sequence");
    const std::size_t h = forward.hidden();
    std::vector<Tensor> fwd(T), bwd(T);
    LstmState s{Tensor::zeros(1, h), Tensor::zeros(1, h)};
    for (std::size_t t = 0; t < T; ++t) {
        s = lstm_step(slice_rows(embeddings, t, 1), s, forward);
        fwd[t] = s.h;
    }
    s = {Tensor::zeros(1, backward.hidden()), Tensor::zeros(1, backward.hidden())};
    for (std::size_t t = T; t-- > 0;) {
        s = lstm_step(slice_rows(embeddings, t, 1), s, backward);
        bwd[t] = s.h;
    }
    const std::array<Tensor, 2> halves = {concat_rows(fwd), concat_rows(bwd)};
    return concat_cols(halves);
}

EncoderOutput bilstm_encode(const Tensor& embeddings, const LstmParams& forward, const LstmParams& backward,
                            const Tensor& projection) {
    Tensor states = matmul(bilstm_states(embeddings, forward, backward), projection);
    return {states, std::vector<bool>(embeddings.rows(), true)};
}

}  // namespace g2t
