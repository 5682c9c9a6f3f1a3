#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "g2t/config.hpp"
#include "g2t/graph.hpp"
#include "g2t/tensor.hpp"
#include "g2t/vocab.hpp"

namespace g2t {

class ParameterStore;
class Rng;

/// Neighbourhood lists of a graph in index form, one block per direction.
/// Entry i sends a message from node src[i] to node dst[i] using label row label[i].
struct GraphIndex {
    struct Block {
        std::vector<std::size_t> src;
        std::vector<std::size_t> dst;
        std::vector<std::size_t> label;
    };
    std::size_t nodes = 0;
    std::array<Block, 3> blocks;  // indexed by EdgeDirection

    const Block& block(EdgeDirection d) const { return blocks[static_cast<std::size_t>(d)]; }
};

/// Unknown labels map to the <unk> row, or throw DataError when `strict`.
GraphIndex index_graph(const LabeledGraph& g, const Vocabulary& labels, bool strict = false);

struct EncoderOutput {
    Tensor states;           // n x width
    std::vector<bool> mask;  // true = real position
};

struct GcnLayerParams {
    std::array<Tensor, 3> W;       // input_width x d, per direction
    std::array<Tensor, 3> b;       // in/out: labels x d; loop: 1 x d (the "self" row)
    std::array<Tensor, 3> gate_w;  // input_width x 1
    std::array<Tensor, 3> gate_b;  // 1 x 1

    std::size_t input_width() const { return W[0].rows(); }
    std::size_t width() const { return W[0].cols(); }

    static GcnLayerParams create(ParameterStore& store, const std::string& prefix, std::size_t input_width,
                                 std::size_t d, std::size_t labels, Rng& rng);
};

/// Test hook: replaces every gate by a constant.
struct GateOverride {
    std::optional<double> value;
};

Tensor gcn_layer(const Tensor& H, const GraphIndex& g, const GcnLayerParams& p, GateOverride gates = {});

struct GcnEncodeOptions {
    SkipKind skip = SkipKind::none;
    double dropout = 0.0;
    bool training = false;
    GateOverride gates;
};

/// Stacks one layer per entry of `layers`. Throws ConfigError when residual
/// widths disagree.
EncoderOutput gcn_encode(const Tensor& embeddings, const GraphIndex& g, const std::vector<GcnLayerParams>& layers,
                         const GcnEncodeOptions& opts, Rng& rng);

/// Width of the skip-combined output after `layers` layers of width d on an
/// input of width `input_width`.
std::size_t gcn_output_width(std::size_t input_width, std::size_t d, std::size_t layers, SkipKind skip);

/// [lemma ; sum(features)], zero block when there are no features.
Tensor compose_sr_node(const Tensor& lemma, const std::vector<Tensor>& features, std::size_t feature_dim);

/// Batched compose_sr_node over all nodes: rows of `lemma_table` picked by
/// `lemmas`, feature rows of `feature_table` summed per node.
Tensor compose_nodes(const Tensor& lemma_table, const std::vector<std::size_t>& lemmas, const Tensor& feature_table,
                     const std::vector<std::vector<std::size_t>>& features);

struct LstmParams {
    Tensor Wx;  // input x 4h, gate order i f g o
    Tensor Wh;  // h x 4h
    Tensor b;   // 1 x 4h

    std::size_t hidden() const { return Wh.rows(); }

    static LstmParams create(ParameterStore& store, const std::string& prefix, std::size_t input, std::size_t hidden,
                             Rng& rng);
};

struct LstmState {
    Tensor h;  // 1 x h
    Tensor c;  // 1 x h
};

LstmState lstm_step(const Tensor& x, const LstmState& prev, const LstmParams& p);

/// Raw bidirectional states, T x 2h: [forward_t ; backward_t].
Tensor bilstm_states(const Tensor& embeddings, const LstmParams& forward, const LstmParams& backward);

/// bilstm_states followed by the bias-free 2h -> h projection.
EncoderOutput bilstm_encode(const Tensor& embeddings, const LstmParams& forward, const LstmParams& backward,
                            const Tensor& projection);

}  // namespace g2t
