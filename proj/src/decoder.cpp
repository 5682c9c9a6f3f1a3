#include "g2t/decoder.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>

#include "g2t/dataset.hpp"
#include "g2t/error.hpp"
#include "g2t/parameters.hpp"
#include "g2t/random.hpp"

namespace g2t {

DecoderParams DecoderParams::create(ParameterStore& store, const ModelConfig& c, std::size_t vocab_size,
                                    std::size_t enc_width, Rng& rng) {
    const std::size_t h = c.hidden;
    const std::size_t e = c.embed_dim;
    DecoderParams p;
    p.embedding = store.add("decoder.embedding", vocab_size, e, Init::glorot, rng);
    p.lstm = LstmParams::create(store, "decoder.lstm", c.input_feeding ? e + h : e, h, rng);
    if (c.attention == AttentionKind::general) p.W_a = store.add("decoder.attn.W", h, enc_width, Init::glorot, rng);
    p.W_c = store.add("decoder.combine.W", h + enc_width, h, Init::glorot, rng);
    p.b_c = store.add("decoder.combine.b", 1, h, Init::zeros, rng);
    p.W_o = store.add("decoder.out.W", h, vocab_size, Init::glorot, rng);
    p.b_o = store.add("decoder.out.b", 1, vocab_size, Init::zeros, rng);
    p.W_init = store.add("decoder.init.W", enc_width, h, Init::glorot, rng);
    p.b_init = store.add("decoder.init.b", 1, h, Init::zeros, rng);
    if (c.copy) {
        p.w_gen = store.add("decoder.copy.w", h + enc_width + e, 1, Init::glorot, rng);
        p.b_gen = store.add("decoder.copy.b", 1, 1, Init::zeros, rng);
    }
    return p;
}

AttentionResult attend(const Tensor& query, const Tensor& enc, const std::vector<bool>& mask, const Tensor& W_a) {
    if (enc.rows() == 0) throw ContractViolation("attend: no encoder states");
    Tensor projected = W_a.defined() ? matmul(query, W_a) : query;
    if (projected.cols() != enc.cols())
        throw ContractViolation("attend: query width " + std::to_string(projected.cols()) + " vs encoder width " +
                                std::to_string(enc.cols()));
    Tensor scores = matmul(projected, transpose(enc));
    Tensor weights = softmax_rows(scores, mask);
    return {matmul(weights, enc), weights};
}

DecoderState initial_state(const DecoderParams& p, const EncoderOutput& enc) {
    const std::size_t n = enc.states.rows();
    std::vector<double> w(n, 0.0);
    const auto real = static_cast<double>(std::count(enc.mask.begin(), enc.mask.end(), true));
    if (real == 0) throw ContractViolation("initial_state: every encoder position is masked");
    for (std::size_t i = 0; i < n; ++i) w[i] = enc.mask[i] ? 1.0 / real : 0.0;
    Tensor mean = matmul(Tensor::from(1, n, std::move(w)), enc.states);
    const std::size_t h = p.hidden();
    return {{tanh(add(matmul(mean, p.W_init), p.b_init)), Tensor::zeros(1, h)}, Tensor::zeros(1, h)};
}

StepResult decode_step(const DecoderParams& p, const DecoderOptions& opts, const DecoderState& state,
                       std::size_t prev_token, const EncoderOutput& enc, const CopySource* copy, Rng& rng) {
    if (prev_token >= p.embedding.rows())
        throw ContractViolation("decode_step: token id " + std::to_string(prev_token) + " outside vocabulary of " +
                                std::to_string(p.embedding.rows()));
    const std::size_t idx[] = {prev_token};
    Tensor emb = dropout(gather_rows(p.embedding, idx), opts.dropout, opts.training, rng);
    Tensor input = emb;
    if (opts.input_feeding) {
        const std::array<Tensor, 2> parts = {emb, state.attentional};
        input = concat_cols(parts);
    }
    StepResult r;
    r.state.lstm = lstm_step(input, state.lstm, p.lstm);
    const Tensor& h = r.state.lstm.h;
    r.attention = attend(h, enc.states, enc.mask, p.W_a);
    const std::array<Tensor, 2> hc = {h, r.attention.context};
    r.state.attentional = tanh(add(matmul(concat_cols(hc), p.W_c), p.b_c));
    Tensor out = dropout(r.state.attentional, opts.dropout, opts.training, rng);
    r.logits = add(matmul(out, p.W_o), p.b_o);
    r.distribution = softmax_rows(r.logits);
    if (opts.copy) {
        if (!copy) throw ContractViolation("decode_step: copy enabled without a copy source");
        const std::array<Tensor, 3> gen_in = {h, r.attention.context, emb};
        r.p_gen = sigmoid(add(matmul(concat_cols(gen_in), p.w_gen), p.b_gen));
        r.distribution = copy_mix(r.distribution, r.attention.weights, copy->ids, r.p_gen, copy->extended_size);
    }
    return r;
}

Tensor copy_mix(const Tensor& vocab_dist, const Tensor& attention, const std::vector<std::size_t>& source_ids,
                const Tensor& p_gen, std::size_t extended_size) {
    const std::size_t V = vocab_dist.cols();
    if (extended_size < V) throw ContractViolation("copy_mix: extended size smaller than vocabulary");
    if (attention.cols() != source_ids.size()) throw ContractViolation("copy_mix: one source id per attention weight");
    Tensor generated = vocab_dist;
    if (extended_size > V) {
        const std::array<Tensor, 2> parts = {vocab_dist, Tensor::zeros(1, extended_size - V)};
        generated = concat_cols(parts);
    }
    Tensor copied = scatter_add_cols(attention, source_ids, extended_size);
    return add(mul(generated, p_gen), mul(copied, affine(p_gen, -1.0, 1.0)));
}

std::size_t argmax_token(const std::vector<double>& dist) {
    std::size_t best = Vocabulary::kEos;
    for (std::size_t i = 0; i < dist.size(); ++i) {
        if (i == Vocabulary::kPad || i == Vocabulary::kBos) continue;
        if (dist[i] > dist[best] || (dist[i] == dist[best] && i < best)) best = i;
    }
    return best;
}

EmbeddingCoverage load_pretrained_embeddings(const std::filesystem::path& path, const Vocabulary& vocab,
                                             Tensor& table) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open embeddings " + path.string());
    if (table.rows() != vocab.size())
        throw ContractViolation("embedding table has " + std::to_string(table.rows()) + " rows for a vocabulary of " +
                                std::to_string(vocab.size()));
    EmbeddingCoverage report;
    report.vocab_size = vocab.size();
    report.dim = table.cols();
    std::vector<bool> seen(vocab.size(), false);
    auto& values = table.mutable_values();
    std::string line;
    std::size_t line_no = 0;
    std::size_t file_dim = 0;
    std::vector<double> vec;
    while (std::getline(in, line)) {
        ++line_no;
        const auto fields = split_tokens(line);
        if (fields.empty()) continue;
        vec.clear();
        for (std::size_t i = 1; i < fields.size(); ++i) {
            double x = 0;
            const auto& f = fields[i];
            auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), x);
            if (ec != std::errc() || ptr != f.data() + f.size())
                throw ParseError(path.string() + ":" + std::to_string(line_no) + ": bad number '" + f + "'", line_no, i);
            vec.push_back(x);
        }
        if (file_dim == 0) {
            file_dim = vec.size();
            if (file_dim != table.cols())
                throw DataError(path.string() + ": embedding dimension " + std::to_string(file_dim) +
                                " does not match configured " + std::to_string(table.cols()));
        } else if (vec.size() != file_dim) {
            throw DataError(path.string() + ":" + std::to_string(line_no) + ": vector of length " +
                            std::to_string(vec.size()) + ", expected " + std::to_string(file_dim));
        }
        auto id = vocab.find(fields[0]);
        if (!id || seen[*id]) continue;
        seen[*id] = true;
        ++report.covered;
        std::copy(vec.begin(), vec.end(), values.begin() + static_cast<std::ptrdiff_t>(*id * file_dim));
    }
    return report;
}

}  // namespace g2t
