#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "g2t/config.hpp"
#include "g2t/dataset.hpp"
#include "g2t/decoder.hpp"
#include "g2t/encoders.hpp"
#include "g2t/parameters.hpp"
#include "g2t/vocab.hpp"

namespace g2t {

struct Vocabularies {
    Vocabulary source = Vocabulary::tokens();  // node labels, edge labels, linearised tokens
    Vocabulary target = Vocabulary::tokens();
    Vocabulary labels = Vocabulary::labels();
    Vocabulary features = Vocabulary::from_tokens({"<unk>"});

    static Vocabularies build(const std::vector<Example>& train, std::size_t min_count = 1);

    nlohmann::json to_json() const;
    static Vocabularies from_json(const nlohmann::json& j);
    /// name -> fingerprint for each vocabulary.
    nlohmann::json fingerprints() const;
};

/// An example mapped to ids for one model.
struct PreparedExample {
    std::string id;
    GraphIndex graph;                                   // gcn only
    std::vector<std::size_t> source_ids;                // per encoder position
    std::vector<std::vector<std::size_t>> features;     // gcn with features only
    CopySource copy;                                    // copy only
    std::vector<std::string> extra_tokens;              // ids V, V+1, ... of the extended vocabulary
    std::vector<std::size_t> target_ids;                // gold ids ending with EOS
    std::vector<std::string> target_tokens;
};

struct LossResult {
    Tensor total;  // 1 x 1, -sum log p over unmasked steps
    Tensor steps;  // steps x 1, -log p per step (zero where masked)
    std::size_t tokens = 0;
    std::size_t correct = 0;  // teacher-forced argmax hits
};

class Model {
  public:
    Model(ModelConfig config, Vocabularies vocab, std::uint64_t seed);

    const ModelConfig& config() const { return config_; }
    const Vocabularies& vocab() const { return vocab_; }
    std::uint64_t seed() const { return seed_; }
    ParameterStore& params() { return params_; }
    const ParameterStore& params() const { return params_; }
    DecoderParams& decoder() { return decoder_; }
    Tensor& source_embedding() { return source_embedding_; }

    /// The baseline uses ex.linearised when present, otherwise linearises the
    /// graph with a seed derived from the model seed and example id.
    PreparedExample prepare(const Example& ex) const;

    EncoderOutput encode(const PreparedExample& ex, bool training, Rng& rng) const;

    /// Teacher-forced NLL. Steps beyond the target up to `padded_steps` are
    /// run with PAD input and masked out of the sum.
    LossResult loss(const PreparedExample& ex, bool training, Rng& rng, std::size_t padded_steps = 0) const;

    /// -log p(gold) per step, read off decode_step distributions.
    std::vector<double> stepwise_nll(const PreparedExample& ex) const;

    /// When `attention` is given it receives one row of encoder weights per step, EOS step included.
    std::vector<std::string> greedy_decode(const PreparedExample& ex, std::size_t max_len,
                                           std::vector<std::vector<double>>* attention = nullptr) const;
    /// Width 1 is greedy. No length normalisation.
    std::vector<std::string> beam_decode(const PreparedExample& ex, std::size_t max_len, std::size_t width) const;

    nlohmann::json metadata() const;

  private:
    DecoderOptions decoder_options(bool training) const;
    std::string token_string(std::size_t id, const PreparedExample& ex) const;

    ModelConfig config_;
    Vocabularies vocab_;
    std::uint64_t seed_;
    ParameterStore params_;
    Tensor source_embedding_;
    Tensor feature_embedding_;
    std::vector<GcnLayerParams> gcn_;
    LstmParams fwd_, bwd_;
    Tensor projection_;
    DecoderParams decoder_;
};

void save_model(const std::filesystem::path& path, const Model& model, nlohmann::json extra = {});
Model load_model(const std::filesystem::path& path);

}  // namespace g2t
