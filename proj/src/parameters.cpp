#include "g2t/parameters.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "g2t/error.hpp"
#include "g2t/random.hpp"

namespace g2t {

static_assert(std::endian::native == std::endian::little, "checkpoint format assumes a little-endian host");

Tensor ParameterStore::add(const std::string& name, std::size_t rows, std::size_t cols, Init init, Rng& rng) {
    if (contains(name)) throw ContractViolation("duplicate parameter name " + name);
    std::vector<double> values(rows * cols, 0.0);
    if (init == Init::glorot) {
        const double a = std::sqrt(6.0 / static_cast<double>(rows + cols));
        for (double& v : values) v = rng.uniform(-a, a);
    }
    auto t = Tensor::from(rows, cols, std::move(values), true);
    index_[name] = params_.size();
    params_.push_back({name, t});
    return t;
}

const Tensor& ParameterStore::get(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) throw ContractViolation("unknown parameter " + name);
    return params_[it->second].tensor;
}

Tensor& ParameterStore::get(const std::string& name) {
    auto it = index_.find(name);
    if (it == index_.end()) throw ContractViolation("unknown parameter " + name);
    return params_[it->second].tensor;
}

std::size_t ParameterStore::scalar_count() const {
    std::size_t n = 0;
    for (const auto& p : params_) n += p.tensor.size();
    return n;
}

void ParameterStore::zero_grad() {
    for (auto& p : params_) p.tensor.zero_grad();
}

ParameterStore ParameterStore::clone() const {
    ParameterStore out;
    for (const auto& p : params_) {
        out.index_[p.name] = out.params_.size();
        out.params_.push_back({p.name, Tensor::from(p.tensor.rows(), p.tensor.cols(), p.tensor.values(), true)});
    }
    return out;
}

void ParameterStore::copy_values_from(const ParameterStore& other) {
    for (auto& p : params_) {
        const auto& src = other.get(p.name);
        if (src.rows() != p.tensor.rows() || src.cols() != p.tensor.cols())
            throw ContractViolation("copy_values_from: shape mismatch for " + p.name);
        p.tensor.mutable_values() = src.values();
    }
}

namespace {

constexpr char kMagic[8] = {'G', '2', 'T', 'C', 'K', 'P', 'T', '1'};

template <typename T>
void put(std::ostream& out, T v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <typename T>
T get_raw(std::istream& in, const std::filesystem::path& path) {
    T v{};
    if (!in.read(reinterpret_cast<char*>(&v), sizeof v)) throw DataError("truncated checkpoint " + path.string());
    return v;
}

std::string get_string(std::istream& in, std::uint64_t len, const std::filesystem::path& path) {
    std::string s(len, '\0');
    if (len && !in.read(s.data(), static_cast<std::streamsize>(len)))
        throw DataError("truncated checkpoint " + path.string());
    return s;
}

std::ifstream open_checked(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open checkpoint " + path.string());
    char magic[8];
    if (!in.read(magic, 8) || std::memcmp(magic, kMagic, 8) != 0)
        throw DataError("not a checkpoint file: " + path.string());
    return in;
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const ParameterStore& params, const nlohmann::json& metadata) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write checkpoint " + path.string());
    out.write(kMagic, 8);
    const auto meta = metadata.dump();
    put<std::uint64_t>(out, meta.size());
    out.write(meta.data(), static_cast<std::streamsize>(meta.size()));
    put<std::uint64_t>(out, params.parameters().size());
    for (const auto& p : params.parameters()) {
        put<std::uint32_t>(out, static_cast<std::uint32_t>(p.name.size()));
        out.write(p.name.data(), static_cast<std::streamsize>(p.name.size()));
        put<std::uint64_t>(out, p.tensor.rows());
        put<std::uint64_t>(out, p.tensor.cols());
        out.write(reinterpret_cast<const char*>(p.tensor.values().data()),
                  static_cast<std::streamsize>(p.tensor.size() * sizeof(double)));
    }
    if (!out) throw DataError("failed writing checkpoint " + path.string());
}

nlohmann::json read_checkpoint_metadata(const std::filesystem::path& path) {
    auto in = open_checked(path);
    const auto len = get_raw<std::uint64_t>(in, path);
    return nlohmann::json::parse(get_string(in, len, path));
}

nlohmann::json load_checkpoint(const std::filesystem::path& path, ParameterStore& params) {
    auto in = open_checked(path);
    const auto meta_len = get_raw<std::uint64_t>(in, path);
    auto meta = nlohmann::json::parse(get_string(in, meta_len, path));
    const auto count = get_raw<std::uint64_t>(in, path);
    if (count != params.parameters().size())
        throw DataError("checkpoint has " + std::to_string(count) + " parameters, model expects " +
                        std::to_string(params.parameters().size()));
    for (std::uint64_t i = 0; i < count; ++i) {
        const auto name = get_string(in, get_raw<std::uint32_t>(in, path), path);
        if (!params.contains(name)) throw DataError("checkpoint parameter " + name + " not in model");
        auto& t = params.get(name);
        const auto rows = get_raw<std::uint64_t>(in, path);
        const auto cols = get_raw<std::uint64_t>(in, path);
        if (rows != t.rows() || cols != t.cols())
            throw DataError("checkpoint shape mismatch for " + name + ": " + std::to_string(rows) + "x" +
                            std::to_string(cols));
        auto& v = t.mutable_values();
        if (!in.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(v.size() * sizeof(double))))
            throw DataError("truncated checkpoint " + path.string());
    }
    return meta;
}

}  // namespace g2t
