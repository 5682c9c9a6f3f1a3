#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "g2t/config.hpp"
#include "g2t/encoders.hpp"
#include "g2t/tensor.hpp"
#include "g2t/vocab.hpp"

namespace g2t {

class ParameterStore;
class Rng;

struct DecoderParams {
    Tensor embedding;  // V x e
    LstmParams lstm;   // input e (+ h with input feeding)
    Tensor W_a;        // h x enc_width; undefined for dot attention
    Tensor W_c, b_c;   // (h + enc_width) x h
    Tensor W_o, b_o;   // h x V
    Tensor W_init, b_init;  // enc_width x h, initial hidden state from the mean encoder state
    Tensor w_gen, b_gen;    // (h + enc_width + e) x 1, copy only

    static DecoderParams create(ParameterStore& store, const ModelConfig& config, std::size_t vocab_size,
                                std::size_t enc_width, Rng& rng);
    std::size_t vocab_size() const { return W_o.cols(); }
    std::size_t hidden() const { return lstm.hidden(); }
};

struct DecoderOptions {
    bool input_feeding = true;
    bool copy = false;
    double dropout = 0.0;
    bool training = false;
};

struct DecoderState {
    LstmState lstm;
    Tensor attentional;  // 1 x h, fed back when input feeding is on
};

struct AttentionResult {
    Tensor context;  // 1 x enc_width
    Tensor weights;  // 1 x n, zero on masked positions
};

/// Luong attention. `W_a` undefined selects the dot score. Throws
/// ContractViolation when every position is masked.
AttentionResult attend(const Tensor& query, const Tensor& enc, const std::vector<bool>& mask, const Tensor& W_a);

/// Source side of the copy distribution: extended id of every encoder
/// position; ids >= V name source-only tokens.
struct CopySource {
    std::vector<std::size_t> ids;
    std::size_t extended_size = 0;
};

struct StepResult {
    Tensor logits;        // 1 x V
    Tensor distribution;  // 1 x V, or 1 x extended_size with copy
    Tensor p_gen;         // 1 x 1, copy only
    DecoderState state;
    AttentionResult attention;
};

DecoderState initial_state(const DecoderParams& p, const EncoderOutput& enc);

/// One step: recurrence on [embedding(prev) ; previous attentional vector],
/// attention, tanh hidden layer over [h ; c], softmax output. `copy` is
/// required when opts.copy is set.
StepResult decode_step(const DecoderParams& p, const DecoderOptions& opts, const DecoderState& state,
                       std::size_t prev_token, const EncoderOutput& enc, const CopySource* copy, Rng& rng);

/// p_gen * vocab + (1 - p_gen) * attention mass scattered onto source ids.
Tensor copy_mix(const Tensor& vocab_dist, const Tensor& attention, const std::vector<std::size_t>& source_ids,
                const Tensor& p_gen, std::size_t extended_size);

/// Highest-probability id, lowest id on ties, never PAD or BOS.
std::size_t argmax_token(const std::vector<double>& dist);

struct EmbeddingCoverage {
    std::size_t covered = 0;
    std::size_t vocab_size = 0;
    std::size_t dim = 0;
    double fraction() const { return vocab_size ? static_cast<double>(covered) / vocab_size : 0.0; }
};

/// Copies vectors for in-vocabulary tokens into the rows of `table`; other
/// rows keep their current values. Throws DataError on ragged vectors or a
/// width different from the table's.
EmbeddingCoverage load_pretrained_embeddings(const std::filesystem::path& path, const Vocabulary& vocab,
                                             Tensor& table);

}  // namespace g2t
