#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

namespace g2t {

enum class EncoderKind { gcn, bilstm };
enum class SkipKind { none, residual, dense };
enum class AttentionKind { general, dot };

std::string_view to_string(EncoderKind k);
std::string_view to_string(SkipKind k);
std::string_view to_string(AttentionKind k);
EncoderKind parse_encoder_kind(std::string_view s);
SkipKind parse_skip_kind(std::string_view s);
AttentionKind parse_attention_kind(std::string_view s);

struct ModelConfig {
    EncoderKind encoder = EncoderKind::gcn;
    std::size_t gcn_layers = 1;
    SkipKind skip = SkipKind::none;
    std::size_t hidden = 256;
    std::size_t embed_dim = 256;
    /// Width of the summed node-feature block; 0 disables node features.
    std::size_t feature_dim = 0;
    bool copy = false;
    AttentionKind attention = AttentionKind::general;
    bool input_feeding = true;
    double dropout = 0.3;
    /// Unknown edge labels are an error instead of mapping to <unk>.
    bool strict_labels = false;

    /// Width of the encoder states handed to the decoder.
    std::size_t encoder_width() const;
};

/// Throws ConfigError describing the first inconsistency.
void validate(const ModelConfig& config);

nlohmann::json to_json(const ModelConfig& config);
/// Missing keys keep their defaults.
ModelConfig model_config_from_json(const nlohmann::json& j, ModelConfig base = {});

}  // namespace g2t
