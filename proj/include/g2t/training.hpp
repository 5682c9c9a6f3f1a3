#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "g2t/config.hpp"
#include "g2t/dataset.hpp"
#include "g2t/metrics.hpp"
#include "g2t/model.hpp"

namespace g2t {

struct TrainConfig {
    std::size_t epochs_max = 30;
    std::size_t batch_size = 64;
    double lr = 0.001;
    std::uint64_t seed = 1;
    /// Epochs without dev-BLEU improvement before stopping; 0 disables early stopping.
    std::size_t patience = 5;
    std::size_t dev_max_len = 60;
    /// Batches per length-sorted window; 0 sorts the whole epoch.
    std::size_t sort_window = 20;
    /// Global gradient-norm clip; 0 disables.
    double clip_norm = 0.0;
    bool save_epoch_checkpoints = true;
    ModelConfig model;

    nlohmann::json to_json() const;
    static TrainConfig from_json(const nlohmann::json& j, TrainConfig base);
    static TrainConfig from_json(const nlohmann::json& j);
};

/// Throws ConfigError.
void validate(const TrainConfig& config);

struct Batch {
    std::vector<std::size_t> examples;  // indices into the prepared split
    std::vector<std::string> ids;
    std::vector<std::vector<std::size_t>> targets;  // padded with PAD to `steps`
    std::vector<std::vector<bool>> mask;            // true on real tokens (EOS included)
    std::size_t steps = 0;
    std::size_t tokens = 0;
};

Batch make_batch(const std::vector<PreparedExample>& prepared, const std::vector<std::size_t>& indices);

/// Shuffles, sorts by length inside windows of `window` batches, cuts into
/// batches of at most `batch_size` and shuffles the batch order.
std::vector<std::vector<std::size_t>> make_batches(const std::vector<std::size_t>& lengths, std::size_t batch_size,
                                                   std::size_t window, Rng& rng);

struct NllResult {
    Tensor sum;   // 1 x 1
    Tensor mean;  // sum / tokens
    std::size_t tokens = 0;
    std::size_t clamped = 0;  // gold probabilities floored at 1e-12
};

/// -sum log p(gold) over unmasked rows of `distributions` (steps x V).
NllResult nll_loss(const Tensor& distributions, const std::vector<std::size_t>& targets,
                   const std::vector<bool>& mask);

/// Stops after `patience` consecutive epochs without a strictly higher score.
class EarlyStopper {
  public:
    explicit EarlyStopper(std::size_t patience) : patience_(patience) {}
    /// Returns true when training should stop after this epoch.
    bool update(std::size_t epoch, double score);
    bool improved() const { return improved_; }
    std::size_t best_epoch() const { return best_epoch_; }
    double best_score() const { return best_score_; }

  private:
    std::size_t patience_;
    std::size_t best_epoch_ = 0;
    double best_score_ = -1.0;
    std::size_t stale_ = 0;
    bool improved_ = false;
};

struct EpochRecord {
    std::size_t epoch = 0;
    double train_loss = 0.0;  // summed NLL over the epoch
    double train_loss_per_token = 0.0;
    double train_accuracy = 0.0;  // teacher-forced
    double dev_bleu = 0.0;
    double lr = 0.0;
    double seconds = 0.0;

    nlohmann::json to_json() const;
    static EpochRecord from_json(const nlohmann::json& j);
};

struct TrainResult {
    std::vector<EpochRecord> log;
    std::size_t best_epoch = 0;
    double best_dev_bleu = 0.0;
    bool stopped_early = false;
};

struct TrainHooks {
    /// Replaces dev-set BLEU (tests use it to script score sequences).
    std::function<double(const Model&, std::size_t epoch)> dev_scorer;
    /// Return true to stop after this epoch.
    std::function<bool(const EpochRecord&)> stop_when;
    /// Checkpoints and log go here when set.
    std::optional<std::filesystem::path> run_dir;
    std::ostream* progress = nullptr;
};

/// Trains `model` in place; on return it holds the parameters of the best
/// epoch. Throws NumericalError naming the batch on a non-finite loss.
TrainResult train(Model& model, const TrainConfig& config, const std::vector<Example>& train_set,
                  const std::vector<Example>& dev_set, const TrainHooks& hooks = {});

/// Greedy (or beam) outputs in input order.
std::vector<Tokens> generate(const Model& model, const std::vector<Example>& examples, std::size_t max_len,
                             std::size_t beam = 1);
BleuReport evaluate_bleu(const Model& model, const std::vector<Example>& examples, std::size_t max_len,
                         bool smooth = false);

struct RunStats {
    std::vector<double> values;
    double mean = 0.0;
    double stddev = 0.0;
    /// Single run: stddev reported as 0 but not meaningful.
    bool degenerate = false;

    nlohmann::json to_json() const;
};

RunStats summarize(const std::vector<double>& values);

struct MultiRunResult {
    RunStats test_bleu;
    std::vector<TrainResult> runs;
    std::vector<std::uint64_t> seeds;
};

struct MultiRunOptions {
    std::size_t runs = 3;
    /// Defaults to base seed + run index.
    std::vector<std::uint64_t> seeds;
    /// Run k writes to run_root/run{k}.
    std::optional<std::filesystem::path> run_root;
    /// Called on each freshly built model before training (e.g. pretrained embeddings).
    std::function<void(Model&)> init;
    std::ostream* progress = nullptr;
};

/// Trains one model per seed and scores each best model on `test_set` with
/// unsmoothed corpus BLEU.
MultiRunResult multi_run(const TrainConfig& config, const Vocabularies& vocab, const std::vector<Example>& train_set,
                         const std::vector<Example>& dev_set, const std::vector<Example>& test_set,
                         const MultiRunOptions& options = {});

}  // namespace g2t
