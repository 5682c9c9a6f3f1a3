#include "g2t/config.hpp"

#include "g2t/error.hpp"

namespace g2t {

std::string_view to_string(EncoderKind k) { return k == EncoderKind::gcn ? "gcn" : "bilstm"; }

std::string_view to_string(SkipKind k) {
    switch (k) {
        case SkipKind::none: return "none";
        case SkipKind::residual: return "residual";
        case SkipKind::dense: return "dense";
    }
    return "?";
}

std::string_view to_string(AttentionKind k) { return k == AttentionKind::general ? "general" : "dot"; }

EncoderKind parse_encoder_kind(std::string_view s) {
    if (s == "gcn") return EncoderKind::gcn;
    if (s == "bilstm") return EncoderKind::bilstm;
    throw ConfigError("unknown encoder '" + std::string(s) + "' (expected gcn|bilstm)");
}

SkipKind parse_skip_kind(std::string_view s) {
    if (s == "none") return SkipKind::none;
    if (s == "residual" || s == "res") return SkipKind::residual;
    if (s == "dense" || s == "den") return SkipKind::dense;
    throw ConfigError("unknown skip '" + std::string(s) + "' (expected none|residual|dense)");
}

AttentionKind parse_attention_kind(std::string_view s) {
    if (s == "general") return AttentionKind::general;
    if (s == "dot") return AttentionKind::dot;
    throw ConfigError("unknown attention '" + std::string(s) + "' (expected general|dot)");
}

std::size_t ModelConfig::encoder_width() const {
    if (encoder == EncoderKind::bilstm) return hidden;
    if (skip == SkipKind::dense) return embed_dim + gcn_layers * hidden;
    return hidden;
}

void validate(const ModelConfig& c) {
    if (c.hidden == 0 || c.embed_dim == 0) throw ConfigError("hidden and embed_dim must be positive");
    if (!(c.dropout >= 0.0 && c.dropout < 1.0)) throw ConfigError("dropout must be in [0, 1)");
    if (c.encoder == EncoderKind::gcn) {
        if (c.gcn_layers < 1) throw ConfigError("gcn_layers must be >= 1");
        if (c.skip == SkipKind::residual && c.embed_dim != c.hidden)
            throw ConfigError("residual skip connections need embed_dim == hidden (got " +
                              std::to_string(c.embed_dim) + " vs " + std::to_string(c.hidden) + ")");
        if (c.feature_dim >= c.embed_dim)
            throw ConfigError("feature_dim must be smaller than embed_dim (lemma block would be empty)");
    }
    if (c.attention == AttentionKind::dot && c.encoder_width() != c.hidden)
        throw ConfigError("dot attention needs encoder width == hidden (got " + std::to_string(c.encoder_width()) +
                          "); use general attention");
}

nlohmann::json to_json(const ModelConfig& c) {
    return {{"encoder", to_string(c.encoder)},
            {"gcn_layers", c.gcn_layers},
            {"skip", to_string(c.skip)},
            {"hidden", c.hidden},
            {"embed_dim", c.embed_dim},
            {"feature_dim", c.feature_dim},
            {"copy", c.copy},
            {"attention", to_string(c.attention)},
            {"input_feeding", c.input_feeding},
            {"dropout", c.dropout},
            {"strict_labels", c.strict_labels}};
}

ModelConfig model_config_from_json(const nlohmann::json& j, ModelConfig c) {
    if (j.contains("encoder")) c.encoder = parse_encoder_kind(j.at("encoder").get<std::string>());
    if (j.contains("gcn_layers")) c.gcn_layers = j.at("gcn_layers").get<std::size_t>();
    if (j.contains("skip")) c.skip = parse_skip_kind(j.at("skip").get<std::string>());
    if (j.contains("hidden")) c.hidden = j.at("hidden").get<std::size_t>();
    if (j.contains("embed_dim")) c.embed_dim = j.at("embed_dim").get<std::size_t>();
    if (j.contains("feature_dim")) c.feature_dim = j.at("feature_dim").get<std::size_t>();
    if (j.contains("copy")) c.copy = j.at("copy").get<bool>();
    if (j.contains("attention")) c.attention = parse_attention_kind(j.at("attention").get<std::string>());
    if (j.contains("input_feeding")) c.input_feeding = j.at("input_feeding").get<bool>();
    if (j.contains("dropout")) c.dropout = j.at("dropout").get<double>();
    if (j.contains("strict_labels")) c.strict_labels = j.at("strict_labels").get<bool>();
    return c;
}

}  // namespace g2t
