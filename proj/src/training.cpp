#include "g2t/training.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <numeric>

#include "g2t/error.hpp"
#include "g2t/optim.hpp"
#include "g2t/random.hpp"

namespace g2t {

namespace fs = std::filesystem;

nlohmann::json TrainConfig::to_json() const {
    return {{"epochs_max", epochs_max},
            {"batch_size", batch_size},
            {"lr", lr},
            {"seed", seed},
            {"patience", patience},
            {"dev_max_len", dev_max_len},
            {"sort_window", sort_window},
            {"clip_norm", clip_norm},
            {"save_epoch_checkpoints", save_epoch_checkpoints},
            {"model", g2t::to_json(model)}};
}

TrainConfig TrainConfig::from_json(const nlohmann::json& j, TrainConfig c) {
    if (j.contains("epochs_max")) c.epochs_max = j.at("epochs_max").get<std::size_t>();
    if (j.contains("batch_size")) c.batch_size = j.at("batch_size").get<std::size_t>();
    if (j.contains("lr")) c.lr = j.at("lr").get<double>();
    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("patience")) c.patience = j.at("patience").get<std::size_t>();
    if (j.contains("dev_max_len")) c.dev_max_len = j.at("dev_max_len").get<std::size_t>();
    if (j.contains("sort_window")) c.sort_window = j.at("sort_window").get<std::size_t>();
    if (j.contains("clip_norm")) c.clip_norm = j.at("clip_norm").get<double>();
    if (j.contains("save_epoch_checkpoints")) c.save_epoch_checkpoints = j.at("save_epoch_checkpoints").get<bool>();
    if (j.contains("model")) c.model = model_config_from_json(j.at("model"), c.model);
    return c;
}

TrainConfig TrainConfig::from_json(const nlohmann::json& j) { return from_json(j, TrainConfig{}); }

void validate(const TrainConfig& c) {
    if (c.epochs_max == 0) throw ConfigError("epochs_max must be positive");
    if (c.batch_size == 0) throw ConfigError("batch_size must be positive");
    if (!(c.lr > 0.0)) throw ConfigError("lr must be positive");
    if (c.dev_max_len == 0) throw ConfigError("dev_max_len must be positive");
    if (c.clip_norm < 0.0) throw ConfigError("clip_norm must be >= 0");
    validate(c.model);
}

Batch make_batch(const std::vector<PreparedExample>& prepared, const std::vector<std::size_t>& indices) {
    Batch b;
    b.examples = indices;
    for (auto i : indices) b.steps = std::max(b.steps, prepared.at(i).target_ids.size());
    for (auto i : indices) {
        const auto& t = prepared[i].target_ids;
        b.ids.push_back(prepared[i].id);
        auto& row = b.targets.emplace_back(t);
        row.resize(b.steps, Vocabulary::kPad);
        auto& m = b.mask.emplace_back(b.steps, false);
        std::fill(m.begin(), m.begin() + static_cast<std::ptrdiff_t>(t.size()), true);
        b.tokens += t.size();
    }
    return b;
}

std::vector<std::vector<std::size_t>> make_batches(const std::vector<std::size_t>& lengths, std::size_t batch_size,
                                                   std::size_t window, Rng& rng) {
    if (batch_size == 0) throw ContractViolation("make_batches: batch_size must be positive");
    std::vector<std::size_t> order(lengths.size());
    std::iota(order.begin(), order.end(), 0);
    rng.shuffle(order);
    const std::size_t span = window == 0 ? order.size() : window * batch_size;
    for (std::size_t start = 0; start < order.size(); start += span) {
        const auto first = order.begin() + static_cast<std::ptrdiff_t>(start);
        const auto last = order.begin() + static_cast<std::ptrdiff_t>(std::min(order.size(), start + span));
        std::stable_sort(first, last, [&](std::size_t a, std::size_t b) { return lengths[a] < lengths[b]; });
    }
    std::vector<std::vector<std::size_t>> batches;
    for (std::size_t start = 0; start < order.size(); start += batch_size)
        batches.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(start),
                             order.begin() + static_cast<std::ptrdiff_t>(std::min(order.size(), start + batch_size)));
    rng.shuffle(batches);
    return batches;
}

NllResult nll_loss(const Tensor& distributions, const std::vector<std::size_t>& targets,
                   const std::vector<bool>& mask) {
    if (targets.size() != distributions.rows() || mask.size() != targets.size())
        throw ContractViolation("nll_loss: one target and mask flag per distribution row");
    const std::size_t before = clamp_count();
    std::vector<double> weights(targets.size());
    NllResult r;
    for (std::size_t t = 0; t < targets.size(); ++t) {
        if (targets[t] >= distributions.cols())
            throw ContractViolation("nll_loss: target " + std::to_string(targets[t]) + " outside distribution");
        weights[t] = mask[t] ? -1.0 : 0.0;
        if (mask[t]) ++r.tokens;
    }
    Tensor logp = log_clamped(pick(distributions, targets), 1e-12);
    r.clamped = clamp_count() - before;
    r.sum = sum(mul(logp, Tensor::from(targets.size(), 1, weights)));
    r.mean = affine(r.sum, r.tokens ? 1.0 / static_cast<double>(r.tokens) : 0.0, 0.0);
    return r;
}

bool EarlyStopper::update(std::size_t epoch, double score) {
    improved_ = score > best_score_;
    if (improved_) {
        best_score_ = score;
        best_epoch_ = epoch;
        stale_ = 0;
    } else {
        ++stale_;
    }
    return patience_ > 0 && stale_ >= patience_;
}

nlohmann::json EpochRecord::to_json() const {
    return {{"epoch", epoch},
            {"train_loss", train_loss},
            {"train_loss_per_token", train_loss_per_token},
            {"train_accuracy", train_accuracy},
            {"dev_bleu", dev_bleu},
            {"lr", lr},
            {"seconds", seconds}};
}

EpochRecord EpochRecord::from_json(const nlohmann::json& j) {
    EpochRecord r;
    r.epoch = j.at("epoch").get<std::size_t>();
    r.train_loss = j.at("train_loss").get<double>();
    r.train_loss_per_token = j.value("train_loss_per_token", 0.0);
    r.train_accuracy = j.value("train_accuracy", 0.0);
    r.dev_bleu = j.at("dev_bleu").get<double>();
    r.lr = j.at("lr").get<double>();
    r.seconds = j.value("seconds", 0.0);
    return r;
}

std::vector<Tokens> generate(const Model& model, const std::vector<Example>& examples, std::size_t max_len,
                             std::size_t beam) {
    std::vector<Tokens> out;
    out.reserve(examples.size());
    for (const auto& ex : examples) out.push_back(model.beam_decode(model.prepare(ex), max_len, beam));
    return out;
}

BleuReport evaluate_bleu(const Model& model, const std::vector<Example>& examples, std::size_t max_len, bool smooth) {
    std::vector<Tokens> refs;
    for (const auto& ex : examples) refs.push_back(ex.target);
    BleuOptions opts;
    opts.smooth = smooth;
    return corpus_bleu(generate(model, examples, max_len), refs, opts);
}

TrainResult train(Model& model, const TrainConfig& config, const std::vector<Example>& train_set,
                  const std::vector<Example>& dev_set, const TrainHooks& hooks) {
    validate(config);
    if (train_set.empty()) throw DataError("training split is empty");
    if (dev_set.empty() && !hooks.dev_scorer) throw DataError("dev split is empty");

    std::vector<PreparedExample> prepared;
    std::vector<std::size_t> lengths;
    for (const auto& ex : train_set) {
        prepared.push_back(model.prepare(ex));
        lengths.push_back(prepared.back().target_ids.size());
    }

    std::ofstream log_file;
    if (hooks.run_dir) {
        fs::create_directories(*hooks.run_dir);
        log_file.open(*hooks.run_dir / "log.jsonl", std::ios::trunc);
        if (!log_file) throw DataError("cannot write " + (*hooks.run_dir / "log.jsonl").string());
        log_file << nlohmann::json{{"header",
                                    {{"config", config.to_json()},
                                     {"dev_bleu", "corpus BLEU, floor-smoothed, on greedy output tokens before "
                                                  "relexicalisation"}}}}
                        .dump()
                 << '\n';
    }

    AdamState adam;
    adam.config.lr = config.lr;
    const Rng root(config.seed);
    EarlyStopper stopper(config.patience);
    ParameterStore best = model.params().clone();
    TrainResult result;

    for (std::size_t epoch = 1; epoch <= config.epochs_max; ++epoch) {
        const auto start = std::chrono::steady_clock::now();
        Rng shuffle = root.stream("shuffle").stream(epoch);
        const Rng dropout_root = root.stream("dropout").stream(epoch);
        const auto batches = make_batches(lengths, config.batch_size, config.sort_window, shuffle);

        double epoch_loss = 0.0;
        std::size_t epoch_tokens = 0, epoch_correct = 0;
        for (std::size_t bi = 0; bi < batches.size(); ++bi) {
            const Batch batch = make_batch(prepared, batches[bi]);
            const double scale = 1.0 / static_cast<double>(batch.tokens);
            double batch_loss = 0.0;
            model.params().zero_grad();
            for (auto i : batch.examples) {
                Rng rng = dropout_root.stream(fnv1a64(prepared[i].id));
                auto loss = model.loss(prepared[i], true, rng, batch.steps);
                const double value = loss.total.item();
                if (!std::isfinite(value)) {
                    std::string ids;
                    for (const auto& id : batch.ids) ids += (ids.empty() ? "" : ",") + id;
                    throw NumericalError("non-finite loss in epoch " + std::to_string(epoch) + ", batch " +
                                         std::to_string(bi) + " (examples " + ids + ", first bad " + prepared[i].id +
                                         ")");
                }
                batch_loss += value;
                epoch_correct += loss.correct;
                backward(affine(loss.total, scale, 0.0));
            }
            if (config.clip_norm > 0.0) clip_grad_norm(model.params(), config.clip_norm);
            adam_step(adam, model.params());
            epoch_loss += batch_loss;
            epoch_tokens += batch.tokens;
        }

        EpochRecord record;
        record.epoch = epoch;
        record.train_loss = epoch_loss;
        record.train_loss_per_token = epoch_loss / static_cast<double>(epoch_tokens);
        record.train_accuracy = static_cast<double>(epoch_correct) / static_cast<double>(epoch_tokens);
        record.lr = config.lr;
        record.dev_bleu = hooks.dev_scorer ? hooks.dev_scorer(model, epoch)
                                           : evaluate_bleu(model, dev_set, config.dev_max_len, true).bleu;
        record.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        result.log.push_back(record);

        const bool stop = stopper.update(epoch, record.dev_bleu);
        if (stopper.improved()) best.copy_values_from(model.params());
        if (hooks.run_dir) {
            log_file << record.to_json().dump() << '\n' << std::flush;
            const nlohmann::json extra = {{"epoch", epoch}, {"dev_bleu", record.dev_bleu}};
            if (config.save_epoch_checkpoints)
                save_model(*hooks.run_dir / ("epoch" + std::to_string(epoch) + ".ckpt"), model, extra);
            if (stopper.improved()) save_model(*hooks.run_dir / "best.ckpt", model, extra);
        }
        if (hooks.progress)
            *hooks.progress << "epoch " << epoch << " loss/token " << record.train_loss_per_token << " acc "
                            << record.train_accuracy << " dev_bleu " << record.dev_bleu << " (" << record.seconds
                            << " s)\n";
        if (stop) {
            result.stopped_early = true;
            break;
        }
        if (hooks.stop_when && hooks.stop_when(record)) break;
    }
    model.params().copy_values_from(best);
    result.best_epoch = stopper.best_epoch();
    result.best_dev_bleu = stopper.best_score();
    return result;
}

nlohmann::json RunStats::to_json() const {
    return {{"values", values}, {"mean", mean}, {"stddev", stddev}, {"degenerate", degenerate}};
}

RunStats summarize(const std::vector<double>& values) {
    if (values.empty()) throw ContractViolation("summarize: no values");
    RunStats s;
    s.values = values;
    const double n = static_cast<double>(values.size());
    s.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
    if (values.size() == 1) {
        s.degenerate = true;
        return s;
    }
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.stddev = std::sqrt(ss / (n - 1.0));
    return s;
}

MultiRunResult multi_run(const TrainConfig& config, const Vocabularies& vocab, const std::vector<Example>& train_set,
                         const std::vector<Example>& dev_set, const std::vector<Example>& test_set,
                         const MultiRunOptions& options) {
    const std::size_t n_runs = options.runs;
    if (n_runs == 0) throw ConfigError("runs must be >= 1");
    std::vector<std::uint64_t> seeds = options.seeds;
    if (seeds.empty())
        for (std::size_t k = 0; k < n_runs; ++k) seeds.push_back(config.seed + k);
    if (seeds.size() != n_runs) throw ConfigError("one seed per run required");
    if (test_set.empty()) throw DataError("test split is empty");
    MultiRunResult out;
    out.seeds = seeds;
    std::vector<double> scores;
    for (std::size_t k = 0; k < n_runs; ++k) {
        TrainConfig run_config = config;
        run_config.seed = seeds[k];
        Model model(run_config.model, vocab, seeds[k]);
        if (options.init) options.init(model);
        TrainHooks hooks;
        hooks.progress = options.progress;
        if (options.run_root) hooks.run_dir = *options.run_root / ("run" + std::to_string(k));
        out.runs.push_back(train(model, run_config, train_set, dev_set, hooks));
        scores.push_back(evaluate_bleu(model, test_set, run_config.dev_max_len, false).bleu);
        if (hooks.run_dir) {
            std::ofstream(*hooks.run_dir / "test.json")
                << nlohmann::json{{"seed", seeds[k]}, {"test_bleu", scores.back()}}.dump() << '\n';
        }
        if (options.progress)
            *options.progress << "run " << k << " seed " << seeds[k] << " test BLEU " << scores.back() << '\n';
    }
    out.test_bleu = summarize(scores);
    return out;
}

}  // namespace g2t
