#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "g2t/tensor.hpp"

namespace g2t {

class Rng;

struct Parameter {
    std::string name;
    Tensor tensor;
};

enum class Init {
    glorot,  // U[-a, a], a = sqrt(6 / (fan_in + fan_out))
    zeros,
};

/// Named trainable tensors in registration order.
class ParameterStore {
  public:
    Tensor add(const std::string& name, std::size_t rows, std::size_t cols, Init init, Rng& rng);
    const Tensor& get(const std::string& name) const;
    Tensor& get(const std::string& name);
    bool contains(const std::string& name) const { return index_.count(name) != 0; }

    const std::vector<Parameter>& parameters() const { return params_; }
    std::vector<Parameter>& parameters() { return params_; }
    std::size_t scalar_count() const;
    void zero_grad();

    /// Deep copy of all values (gradients are not copied).
    ParameterStore clone() const;
    void copy_values_from(const ParameterStore& other);

  private:
    std::vector<Parameter> params_;
    std::map<std::string, std::size_t> index_;
};

/// Binary checkpoint: magic, JSON metadata, then every parameter as raw
/// little-endian doubles. Round-trips bit-exactly.
void save_checkpoint(const std::filesystem::path& path, const ParameterStore& params, const nlohmann::json& metadata);
nlohmann::json read_checkpoint_metadata(const std::filesystem::path& path);
/// Loads values into an already-built store; names and shapes must match exactly.
nlohmann::json load_checkpoint(const std::filesystem::path& path, ParameterStore& params);

}  // namespace g2t
