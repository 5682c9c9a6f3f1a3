#include "g2t/model.hpp"

#include <algorithm>
#include <cmath>

#include "g2t/error.hpp"
#include "g2t/ingestion.hpp"
#include "g2t/random.hpp"

namespace g2t {

namespace {

constexpr double kProbabilityFloor = 1e-12;

std::size_t gcn_input_width(const ModelConfig& c, std::size_t layer) {
    if (c.skip == SkipKind::dense) return c.embed_dim + layer * c.hidden;
    return layer == 0 ? c.embed_dim : c.hidden;
}

}  // namespace

Vocabularies Vocabularies::build(const std::vector<Example>& train, std::size_t min_count) {
    Vocabularies v;
    std::vector<std::vector<std::string>> source, target, labels, features;
    for (const auto& ex : train) {
        auto& s = source.emplace_back();
        auto& l = labels.emplace_back();
        auto& f = features.emplace_back();
        for (const auto& n : ex.graph.nodes()) {
            s.push_back(n.label);
            f.insert(f.end(), n.features.begin(), n.features.end());
        }
        for (const auto& e : ex.graph.edges()) {
            s.push_back(e.label);
            l.push_back(e.label);
        }
        s.insert(s.end(), ex.linearised.begin(), ex.linearised.end());
        target.push_back(ex.target);
    }
    v.source.extend(source, min_count);
    v.target.extend(target, min_count);
    v.labels.extend(labels);
    v.features.extend(features);
    return v;
}

nlohmann::json Vocabularies::to_json() const {
    return {{"source", source.all()}, {"target", target.all()}, {"labels", labels.all()}, {"features", features.all()}};
}

Vocabularies Vocabularies::from_json(const nlohmann::json& j) {
    Vocabularies v;
    v.source = Vocabulary::from_tokens(j.at("source").get<std::vector<std::string>>());
    v.target = Vocabulary::from_tokens(j.at("target").get<std::vector<std::string>>());
    v.labels = Vocabulary::from_tokens(j.at("labels").get<std::vector<std::string>>());
    v.features = Vocabulary::from_tokens(j.at("features").get<std::vector<std::string>>());
    return v;
}

nlohmann::json Vocabularies::fingerprints() const {
    return {{"source", source.fingerprint()},
            {"target", target.fingerprint()},
            {"labels", labels.fingerprint()},
            {"features", features.fingerprint()}};
}

Model::Model(ModelConfig config, Vocabularies vocab, std::uint64_t seed)
    : config_(std::move(config)), vocab_(std::move(vocab)), seed_(seed) {
    validate(config_);
    Rng rng = Rng(seed_).stream("init");
    const auto& c = config_;
    if (c.encoder == EncoderKind::gcn) {
        source_embedding_ =
            params_.add("encoder.embedding", vocab_.source.size(), c.embed_dim - c.feature_dim, Init::glorot, rng);
        if (c.feature_dim > 0)
            feature_embedding_ =
                params_.add("encoder.features", vocab_.features.size(), c.feature_dim, Init::glorot, rng);
        for (std::size_t k = 0; k < c.gcn_layers; ++k)
            gcn_.push_back(GcnLayerParams::create(params_, "encoder.gcn" + std::to_string(k), gcn_input_width(c, k),
                                                  c.hidden, vocab_.labels.size(), rng));
    } else {
        source_embedding_ = params_.add("encoder.embedding", vocab_.source.size(), c.embed_dim, Init::glorot, rng);
        fwd_ = LstmParams::create(params_, "encoder.fwd", c.embed_dim, c.hidden, rng);
        bwd_ = LstmParams::create(params_, "encoder.bwd", c.embed_dim, c.hidden, rng);
        projection_ = params_.add("encoder.proj", 2 * c.hidden, c.hidden, Init::glorot, rng);
    }
    decoder_ = DecoderParams::create(params_, c, vocab_.target.size(), c.encoder_width(), rng);
}

DecoderOptions Model::decoder_options(bool training) const {
    return {config_.input_feeding, config_.copy, config_.dropout, training};
}

PreparedExample Model::prepare(const Example& ex) const {
    PreparedExample p;
    p.id = ex.id();
    std::vector<std::string> source_tokens;
    if (config_.encoder == EncoderKind::gcn) {
        p.graph = index_graph(ex.graph, vocab_.labels, config_.strict_labels);
        for (const auto& n : ex.graph.nodes()) {
            source_tokens.push_back(n.label);
            auto& f = p.features.emplace_back();
            if (config_.feature_dim > 0)
                for (const auto& feat : n.features) f.push_back(vocab_.features.index(feat));
        }
    } else {
        source_tokens = ex.linearised.empty() ? linearise(ex.graph, example_seed(seed_, ex.id())) : ex.linearised;
    }
    if (source_tokens.empty()) throw DataError("example " + ex.id() + " has no source tokens");
    for (const auto& t : source_tokens) p.source_ids.push_back(vocab_.source.index(t));

    const std::size_t V = vocab_.target.size();
    auto extended_id = [&](const std::string& t) -> std::optional<std::size_t> {
        if (auto id = vocab_.target.find(t)) return *id;
        auto it = std::find(p.extra_tokens.begin(), p.extra_tokens.end(), t);
        if (it == p.extra_tokens.end()) return std::nullopt;
        return V + static_cast<std::size_t>(it - p.extra_tokens.begin());
    };
    if (config_.copy) {
        for (const auto& t : source_tokens) {
            auto id = extended_id(t);
            if (!id) {
                p.extra_tokens.push_back(t);
                id = V + p.extra_tokens.size() - 1;
            }
            p.copy.ids.push_back(*id);
        }
        p.copy.extended_size = V + p.extra_tokens.size();
    }
    p.target_tokens = ex.target;
    for (const auto& t : ex.target) p.target_ids.push_back(extended_id(t).value_or(vocab_.target.unk_index()));
    p.target_ids.push_back(Vocabulary::kEos);
    return p;
}

EncoderOutput Model::encode(const PreparedExample& ex, bool training, Rng& rng) const {
    if (config_.encoder == EncoderKind::gcn) {
        Tensor emb = config_.feature_dim > 0
                         ? compose_nodes(source_embedding_, ex.source_ids, feature_embedding_, ex.features)
                         : gather_rows(source_embedding_, ex.source_ids);
        GcnEncodeOptions opts;
        opts.skip = config_.skip;
        opts.dropout = config_.dropout;
        opts.training = training;
        return gcn_encode(emb, ex.graph, gcn_, opts, rng);
    }
    return bilstm_encode(gather_rows(source_embedding_, ex.source_ids), fwd_, bwd_, projection_);
}

LossResult Model::loss(const PreparedExample& ex, bool training, Rng& rng, std::size_t padded_steps) const {
    const auto enc = encode(ex, training, rng);
    const auto opts = decoder_options(training);
    const std::size_t T = ex.target_ids.size();
    const std::size_t steps = std::max(T, padded_steps);
    const std::size_t V = vocab_.target.size();
    DecoderState state = initial_state(decoder_, enc);
    std::size_t prev = Vocabulary::kBos;
    std::vector<Tensor> terms;
    LossResult result;
    for (std::size_t t = 0; t < steps; ++t) {
        const bool real = t < T;
        const std::size_t gold = real ? ex.target_ids[t] : Vocabulary::kPad;
        auto r = decode_step(decoder_, opts, state, prev, enc, &ex.copy, rng);
        const std::size_t idx[] = {gold};
        Tensor term = config_.copy ? log_clamped(pick(r.distribution, idx), kProbabilityFloor)
                                   : pick(log_softmax_rows(r.logits), idx);
        if (!real) term = affine(term, 0.0, 0.0);
        terms.push_back(term);
        if (real) {
            ++result.tokens;
            if (argmax_token(r.distribution.values()) == gold) ++result.correct;
        }
        prev = gold < V ? gold : vocab_.target.unk_index();
        state = r.state;
    }
    result.steps = affine(concat_rows(terms), -1.0, 0.0);
    result.total = sum(result.steps);
    return result;
}

std::vector<double> Model::stepwise_nll(const PreparedExample& ex) const {
    NoGradGuard guard;
    Rng rng(0);
    const auto enc = encode(ex, false, rng);
    const auto opts = decoder_options(false);
    const std::size_t V = vocab_.target.size();
    DecoderState state = initial_state(decoder_, enc);
    std::size_t prev = Vocabulary::kBos;
    std::vector<double> out;
    for (auto gold : ex.target_ids) {
        auto r = decode_step(decoder_, opts, state, prev, enc, &ex.copy, rng);
        out.push_back(-std::log(std::max(r.distribution.values()[gold], kProbabilityFloor)));
        prev = gold < V ? gold : vocab_.target.unk_index();
        state = r.state;
    }
    return out;
}

std::string Model::token_string(std::size_t id, const PreparedExample& ex) const {
    const std::size_t V = vocab_.target.size();
    return id < V ? vocab_.target.token(id) : ex.extra_tokens.at(id - V);
}

std::vector<std::string> Model::greedy_decode(const PreparedExample& ex, std::size_t max_len,
                                              std::vector<std::vector<double>>* attention) const {
    NoGradGuard guard;
    Rng rng(0);
    const auto enc = encode(ex, false, rng);
    const auto opts = decoder_options(false);
    const std::size_t V = vocab_.target.size();
    DecoderState state = initial_state(decoder_, enc);
    std::size_t prev = Vocabulary::kBos;
    std::vector<std::string> out;
    for (std::size_t t = 0; t < max_len; ++t) {
        auto r = decode_step(decoder_, opts, state, prev, enc, &ex.copy, rng);
        const std::size_t tok = argmax_token(r.distribution.values());
        if (attention) attention->push_back(r.attention.weights.values());
        if (tok == Vocabulary::kEos) break;
        out.push_back(token_string(tok, ex));
        prev = tok < V ? tok : vocab_.target.unk_index();
        state = r.state;
    }
    return out;
}

std::vector<std::string> Model::beam_decode(const PreparedExample& ex, std::size_t max_len, std::size_t width) const {
    if (width <= 1) return greedy_decode(ex, max_len);
    NoGradGuard guard;
    Rng rng(0);
    const auto enc = encode(ex, false, rng);
    const auto opts = decoder_options(false);
    const std::size_t V = vocab_.target.size();
    struct Hyp {
        double score = 0.0;
        std::vector<std::size_t> tokens;
        DecoderState state;
    };
    auto better = [](const Hyp& a, const Hyp& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.tokens < b.tokens;
    };
    std::vector<Hyp> live{{0.0, {}, initial_state(decoder_, enc)}};
    std::vector<Hyp> finished;
    for (std::size_t t = 0; t < max_len && !live.empty() && finished.size() < width; ++t) {
        std::vector<Hyp> expanded;
        for (const auto& h : live) {
            const std::size_t prev = h.tokens.empty() ? Vocabulary::kBos
                                     : h.tokens.back() < V ? h.tokens.back()
                                                           : vocab_.target.unk_index();
            auto r = decode_step(decoder_, opts, h.state, prev, enc, &ex.copy, rng);
            const auto& dist = r.distribution.values();
            std::vector<std::size_t> ids;
            for (std::size_t i = 0; i < dist.size(); ++i)
                if (i != Vocabulary::kPad && i != Vocabulary::kBos) ids.push_back(i);
            const std::size_t keep = std::min(width, ids.size());
            std::partial_sort(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(keep), ids.end(),
                              [&](std::size_t a, std::size_t b) { return dist[a] > dist[b] || (dist[a] == dist[b] && a < b); });
            for (std::size_t k = 0; k < keep; ++k) {
                Hyp next{h.score + std::log(std::max(dist[ids[k]], kProbabilityFloor)), h.tokens, r.state};
                next.tokens.push_back(ids[k]);
                expanded.push_back(std::move(next));
            }
        }
        std::sort(expanded.begin(), expanded.end(), better);
        live.clear();
        for (auto& h : expanded) {
            if (live.size() + finished.size() >= width) break;
            if (h.tokens.back() == Vocabulary::kEos) {
                h.tokens.pop_back();
                finished.push_back(std::move(h));
            } else {
                live.push_back(std::move(h));
            }
        }
    }
    finished.insert(finished.end(), live.begin(), live.end());
    const auto best = std::min_element(finished.begin(), finished.end(), better);
    std::vector<std::string> out;
    for (auto id : best->tokens) out.push_back(token_string(id, ex));
    return out;
}

nlohmann::json Model::metadata() const {
    return {{"config", to_json(config_)},
            {"seed", seed_},
            {"vocab", vocab_.to_json()},
            {"vocab_fingerprints", vocab_.fingerprints()}};
}

void save_model(const std::filesystem::path& path, const Model& model, nlohmann::json extra) {
    nlohmann::json meta = model.metadata();
    if (!extra.is_null()) meta["extra"] = std::move(extra);
    save_checkpoint(path, model.params(), meta);
}

Model load_model(const std::filesystem::path& path) {
    const auto meta = read_checkpoint_metadata(path);
    Model model(model_config_from_json(meta.at("config")), Vocabularies::from_json(meta.at("vocab")),
                meta.at("seed").get<std::uint64_t>());
    load_checkpoint(path, model.params());
    return model;
}

}  // namespace g2t
