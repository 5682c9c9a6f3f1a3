#include "g2t/cli.hpp"

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "g2t/error.hpp"
#include "g2t/gradcheck_suite.hpp"
#include "g2t/manifest.hpp"
#include "g2t/metrics.hpp"
#include "g2t/preprocess.hpp"
#include "g2t/training.hpp"

namespace g2t {

namespace fs = std::filesystem;

namespace {

struct Globals {
    std::uint64_t seed = 1;
    std::string data_root;

    fs::path input(const std::string& p) const {
        fs::path path(p);
        if (data_root.empty() || path.is_absolute()) return path;
        return fs::path(data_root) / path;
    }
};

// Flags shared by train and ablate. Defaults are the TrainConfig defaults.
struct TrainFlags {
    TrainConfig config;
    std::string encoder = "gcn";
    std::string skip = "none";
    std::string attention = "general";
    std::optional<std::size_t> embed;
    bool no_input_feeding = false;
    bool clip = false;
    bool no_epoch_checkpoints = false;
    std::string pretrained;
    std::size_t min_count = 1;

    void add(CLI::App* cmd) {
        auto& m = config.model;
        cmd->add_option("--encoder", encoder, "gcn | bilstm")->capture_default_str();
        cmd->add_option("--layers", m.gcn_layers, "GCN layers")->capture_default_str();
        cmd->add_option("--skip", skip, "none | residual | dense")->capture_default_str();
        cmd->add_option("--hidden", m.hidden, "hidden size")->capture_default_str();
        cmd->add_option("--embed", embed, "embedding size (default: --hidden)");
        cmd->add_option("--feature-dim", m.feature_dim, "width of node-feature embeddings (SR11)")
            ->capture_default_str();
        cmd->add_flag("--copy", m.copy, "copy mechanism");
        cmd->add_option("--attention", attention, "general | dot")->capture_default_str();
        cmd->add_flag("--no-input-feeding", no_input_feeding, "do not feed the attentional vector back");
        cmd->add_option("--dropout", m.dropout, "dropout rate")->capture_default_str();
        cmd->add_flag("--strict-labels", m.strict_labels, "unknown edge labels are errors");
        cmd->add_option("--epochs", config.epochs_max, "maximum epochs")->capture_default_str();
        cmd->add_option("--batch-size", config.batch_size)->capture_default_str();
        cmd->add_option("--lr", config.lr, "Adam learning rate")->capture_default_str();
        cmd->add_option("--patience", config.patience, "early-stopping patience, 0 disables")->capture_default_str();
        cmd->add_option("--dev-max-len", config.dev_max_len, "decoding limit for dev BLEU")->capture_default_str();
        cmd->add_option("--sort-window", config.sort_window, "batches per length-sorted window")
            ->capture_default_str();
        cmd->add_flag("--clip", clip, "clip gradients to global norm 5");
        cmd->add_option("--clip-norm", config.clip_norm, "clip gradients to this global norm");
        cmd->add_flag("--no-epoch-checkpoints", no_epoch_checkpoints, "keep only best.ckpt");
        cmd->add_option("--pretrained", pretrained, "word vectors: token then values, one per line");
        cmd->add_option("--min-count", min_count, "vocabulary frequency cut-off when no vocab.json")
            ->capture_default_str();
    }

    TrainConfig resolve(std::uint64_t seed) const {
        TrainConfig c = config;
        c.seed = seed;
        c.model.encoder = parse_encoder_kind(encoder);
        c.model.skip = parse_skip_kind(skip);
        c.model.attention = parse_attention_kind(attention);
        c.model.embed_dim = embed.value_or(c.model.hidden);
        c.model.input_feeding = !no_input_feeding;
        if (clip && c.clip_norm == 0.0) c.clip_norm = 5.0;
        c.save_epoch_checkpoints = !no_epoch_checkpoints;
        validate(c);
        return c;
    }
};

struct Data {
    std::vector<Example> train, dev, test;
    Vocabularies vocab;
    std::vector<fs::path> files;
};

Data load_data(const fs::path& dir, std::size_t min_count) {
    Data d;
    auto split = [&](const char* name, std::vector<Example>& into) {
        const fs::path p = dir / (std::string(name) + ".jsonl");
        if (!fs::exists(p)) return;
        into = read_jsonl(p);
        d.files.push_back(p);
    };
    split("train", d.train);
    split("dev", d.dev);
    split("test", d.test);
    if (d.train.empty()) throw DataError((dir / "train.jsonl").string() + ": missing or empty");
    const fs::path vp = dir / "vocab.json";
    if (fs::exists(vp)) {
        std::ifstream in(vp);
        d.vocab = Vocabularies::from_json(nlohmann::json::parse(in));
        d.files.push_back(vp);
    } else {
        d.vocab = Vocabularies::build(d.train, min_count);
    }
    return d;
}

std::vector<fs::path> files_under(const fs::path& dir) {
    std::vector<fs::path> out;
    for (const auto& e : fs::recursive_directory_iterator(dir)) {
        const auto name = e.path().filename().string();
        if (e.is_regular_file() && name != "manifest.jsonl" && name != OutputLock::kFileName) out.push_back(e.path());
    }
    std::sort(out.begin(), out.end());
    return out;
}

RunManifest manifest_for(const std::string& command, std::uint64_t seed, nlohmann::json config) {
    RunManifest m;
    m.command = command;
    m.tool_version = std::string(kToolVersion);
    m.seed = seed;
    m.config = std::move(config);
    return m;
}

std::function<void(Model&)> pretrained_init(const std::string& path, std::ostream& out) {
    if (path.empty()) return {};
    return [path, &out](Model& m) {
        const auto src = load_pretrained_embeddings(path, m.vocab().source, m.source_embedding());
        const auto tgt = load_pretrained_embeddings(path, m.vocab().target, m.decoder().embedding);
        out << "pretrained embeddings: source coverage " << src.fraction() << ", target coverage " << tgt.fraction()
            << '\n';
    };
}

std::string mean_std(const RunStats& s) {
    std::ostringstream o;
    o << std::fixed << std::setprecision(4) << s.mean << " +- " << s.stddev;
    if (s.degenerate) o << " (single run)";
    return o.str();
}

// ---- commands -------------------------------------------------------------

struct PreprocessArgs {
    std::string task = "webnlg";
    std::string in;
    std::string out;
    std::string split = "train";
    std::string categories;
    bool split_entities = false;
    bool lowercase = false;
    bool linearise = false;
    bool no_edge_labels = false;
    std::size_t max_target_len = kMaxTargetLength;
    std::size_t min_count = 1;
    std::size_t count = 20;
    std::size_t dev_count = 5;
    std::size_t test_count = 5;
};

int cmd_preprocess(const PreprocessArgs& a, const Globals& g, std::ostream& out, std::ostream& err) {
    PreprocessOptions o;
    o.task = parse_task(a.task);
    if (o.task != Task::synthetic && a.in.empty()) throw ConfigError("--in is required for task " + a.task);
    if (!a.in.empty()) o.input = g.input(a.in);
    o.split = a.split;
    o.out = a.out;
    if (!a.categories.empty()) o.categories = g.input(a.categories);
    o.split_entities = a.split_entities;
    o.lowercase = a.lowercase;
    o.linearise = a.linearise;
    o.edge_labels = !a.no_edge_labels;
    o.seed = g.seed;
    o.max_target_len = a.max_target_len;
    o.min_count = a.min_count;
    o.synthetic_train = a.count;
    o.synthetic_dev = a.dev_count;
    o.synthetic_test = a.test_count;

    OutputLock lock(o.out);
    const auto report = preprocess(o);
    std::vector<fs::path> inputs;
    if (o.task != Task::synthetic) {
        if (fs::is_directory(o.input)) {
            for (const char* s : {"train.txt", "dev.txt", "test.txt"})
                if (fs::exists(o.input / s)) inputs.push_back(o.input / s);
        } else {
            inputs.push_back(o.input);
        }
    }
    if (o.categories) inputs.push_back(*o.categories);
    nlohmann::json cfg = {{"task", a.task},
                          {"split", a.split},
                          {"split_entities", a.split_entities},
                          {"lowercase", a.lowercase},
                          {"linearise", a.linearise},
                          {"edge_labels", !a.no_edge_labels},
                          {"max_target_len", a.max_target_len},
                          {"min_count", a.min_count}};
    if (o.task == Task::synthetic) cfg["counts"] = {a.count, a.dev_count, a.test_count};
    append_manifest(o.out, manifest_for("preprocess", g.seed, cfg), inputs, report.artifacts);
    for (const auto& w : report.warnings) err << "warning: " << w << '\n';
    out << report.to_json().dump(2) << '\n';
    return kExitOk;
}

struct TrainArgs {
    TrainFlags flags;
    std::string data;
    std::string out;
    std::size_t runs = 1;
};

int cmd_train(const TrainArgs& a, const Globals& g, std::ostream& out) {
    const TrainConfig config = a.flags.resolve(g.seed);
    const fs::path out_dir = a.out;
    OutputLock lock(out_dir);
    Data data = load_data(g.input(a.data), a.flags.min_count);
    {
        std::ofstream cfg(out_dir / "config.json", std::ios::trunc);
        cfg << config.to_json().dump(2) << '\n';
    }
    auto init = pretrained_init(a.flags.pretrained, out);
    std::vector<fs::path> inputs = data.files;
    if (!a.flags.pretrained.empty()) inputs.push_back(g.input(a.flags.pretrained));

    nlohmann::json summary;
    if (a.runs > 1 || !data.test.empty()) {
        MultiRunOptions opts;
        opts.runs = a.runs;
        opts.run_root = out_dir;
        opts.init = init;
        opts.progress = &out;
        const auto r = multi_run(config, data.vocab, data.train, data.dev, data.test, opts);
        out << "test BLEU over " << a.runs << " run(s): " << mean_std(r.test_bleu) << '\n';
        summary = {{"test_bleu", r.test_bleu.to_json()}, {"seeds", r.seeds}};
        nlohmann::json runs = nlohmann::json::array();
        for (const auto& run : r.runs)
            runs.push_back({{"best_epoch", run.best_epoch}, {"best_dev_bleu", run.best_dev_bleu},
                            {"epochs", run.log.size()}, {"stopped_early", run.stopped_early}});
        summary["runs"] = runs;
    } else {
        Model model(config.model, data.vocab, config.seed);
        if (init) init(model);
        TrainHooks hooks;
        hooks.run_dir = out_dir / "run0";
        hooks.progress = &out;
        const auto r = train(model, config, data.train, data.dev, hooks);
        out << "best dev BLEU " << r.best_dev_bleu << " at epoch " << r.best_epoch << '\n';
        summary = {{"best_epoch", r.best_epoch}, {"best_dev_bleu", r.best_dev_bleu}, {"epochs", r.log.size()}};
    }
    {
        std::ofstream s(out_dir / "summary.json", std::ios::trunc);
        s << summary.dump(2) << '\n';
    }
    append_manifest(out_dir, manifest_for("train", g.seed, config.to_json()), inputs, files_under(out_dir));
    return kExitOk;
}

struct GenerateArgs {
    std::string model;
    std::string in;
    std::string out;
    std::string relex;
    std::string vocab;
    std::string attention;
    std::size_t max_len = 60;
    std::size_t beam = 1;
};

void check_vocab(const fs::path& vocab_path, const Model& model) {
    std::ifstream in(vocab_path);
    if (!in) throw DataError("cannot read " + vocab_path.string());
    const auto expected = Vocabularies::from_json(nlohmann::json::parse(in)).fingerprints();
    const auto actual = model.vocab().fingerprints();
    for (const auto& [name, hash] : expected.items())
        if (!actual.contains(name) || actual.at(name) != hash)
            throw DataError("vocabulary mismatch: " + name + " vocabulary hash " + hash.get<std::string>() + " in " +
                            vocab_path.string() + ", " +
                            (actual.contains(name) ? actual.at(name).get<std::string>() : std::string("none")) +
                            " in the checkpoint");
}

int cmd_generate(const GenerateArgs& a, const Globals& g) {
    const fs::path model_path = g.input(a.model);
    const fs::path in_path = g.input(a.in);
    const fs::path out_path = a.out;
    const fs::path out_dir = out_path.has_parent_path() ? out_path.parent_path() : fs::path(".");
    if (a.max_len == 0) throw ConfigError("--max-len must be positive");
    OutputLock lock(out_dir);

    const Model model = load_model(model_path);
    std::vector<fs::path> inputs = {model_path, in_path};
    fs::path vocab_path = a.vocab.empty() ? in_path.parent_path() / "vocab.json" : g.input(a.vocab);
    if (!a.vocab.empty() || fs::exists(vocab_path)) {
        check_vocab(vocab_path, model);
        inputs.push_back(vocab_path);
    }
    std::map<std::string, RelexTable> relex;
    fs::path relex_path =
        a.relex.empty() ? in_path.parent_path() / (in_path.stem().string() + ".relex.json") : g.input(a.relex);
    if (!a.relex.empty() || fs::exists(relex_path)) {
        relex = read_relex_tables(relex_path);
        inputs.push_back(relex_path);
    }

    const auto examples = read_jsonl(in_path);
    std::ofstream out(out_path, std::ios::trunc);
    if (!out) throw DataError("cannot write " + out_path.string());
    nlohmann::json sidecar = nlohmann::json::array();
    for (const auto& ex : examples) {
        const auto prepared = model.prepare(ex);
        std::vector<std::string> tokens;
        if (!a.attention.empty()) {
            std::vector<std::vector<double>> weights;
            tokens = model.greedy_decode(prepared, a.max_len, &weights);
            std::vector<std::string> source;
            for (auto id : prepared.source_ids) source.push_back(model.vocab().source.token(id));
            sidecar.push_back({{"id", ex.id()}, {"source", source}, {"output", tokens}, {"attention", weights}});
        } else {
            tokens = model.beam_decode(prepared, a.max_len, a.beam);
        }
        if (auto it = relex.find(ex.id()); it != relex.end()) tokens = relexicalise(tokens, it->second);
        out << join_tokens(tokens) << '\n';
    }
    out.close();
    std::vector<fs::path> artifacts = {out_path};
    if (!a.attention.empty()) {
        std::ofstream s(a.attention, std::ios::trunc);
        s << sidecar.dump() << '\n';
        artifacts.emplace_back(a.attention);
    }
    const nlohmann::json cfg = {{"max_len", a.max_len}, {"beam", a.attention.empty() ? a.beam : 1}};
    append_manifest(out_dir, manifest_for("generate", g.seed, cfg), inputs, artifacts);
    return kExitOk;
}

struct EvaluateArgs {
    std::string hyp;
    std::vector<std::string> refs;
    bool smooth = false;
    std::size_t max_n = 4;
};

std::vector<Tokens> read_token_lines(const fs::path& p) {
    std::ifstream in(p);
    if (!in) throw DataError("cannot read " + p.string());
    std::vector<Tokens> out;
    for (std::string line; std::getline(in, line);) out.push_back(split_tokens(line));
    return out;
}

int cmd_evaluate(const EvaluateArgs& a, const Globals& g, std::ostream& out) {
    const auto hyps = read_token_lines(g.input(a.hyp));
    std::vector<std::vector<Tokens>> refs(hyps.size());
    for (const auto& r : a.refs) {
        const auto lines = read_token_lines(g.input(r));
        if (lines.size() != hyps.size())
            throw DataError(r + ": " + std::to_string(lines.size()) + " lines, hypotheses have " +
                            std::to_string(hyps.size()));
        for (std::size_t i = 0; i < lines.size(); ++i) refs[i].push_back(lines[i]);
    }
    BleuOptions opts;
    opts.smooth = a.smooth;
    opts.max_n = a.max_n;
    out << corpus_bleu(hyps, refs, opts).to_json().dump(2) << '\n';
    return kExitOk;
}

struct AblateArgs {
    TrainFlags flags;
    std::string data;
    std::string out;
    std::string layers = "1-7";
    std::string skips = "none,residual,dense";
    std::size_t runs = 3;
    bool sizes_only = false;
};

std::vector<std::size_t> parse_layers(const std::string& spec) {
    std::vector<std::size_t> out;
    std::stringstream ss(spec);
    for (std::string part; std::getline(ss, part, ',');) {
        const auto dash = part.find('-');
        try {
            if (dash == std::string::npos) {
                out.push_back(std::stoul(part));
            } else {
                const auto lo = std::stoul(part.substr(0, dash)), hi = std::stoul(part.substr(dash + 1));
                if (lo > hi) throw ConfigError("bad layer range '" + part + "'");
                for (auto l = lo; l <= hi; ++l) out.push_back(l);
            }
        } catch (const std::logic_error& e) {
            if (dynamic_cast<const ConfigError*>(&e)) throw;
            throw ConfigError("bad layer list '" + spec + "'");
        }
    }
    if (out.empty() || std::find(out.begin(), out.end(), 0) != out.end())
        throw ConfigError("layer counts must be positive");
    return out;
}

int cmd_ablate(const AblateArgs& a, const Globals& g, std::ostream& out) {
    TrainConfig base = a.flags.resolve(g.seed);
    if (base.model.encoder != EncoderKind::gcn) throw ConfigError("ablate runs over GCN encoders only");
    const auto layers = parse_layers(a.layers);
    std::vector<SkipKind> skips;
    {
        std::stringstream ss(a.skips);
        for (std::string s; std::getline(ss, s, ',');) skips.push_back(parse_skip_kind(s));
    }
    if (!a.sizes_only && a.out.empty()) throw ConfigError("--out is required unless --sizes-only");
    std::optional<OutputLock> lock;
    if (!a.out.empty()) lock.emplace(a.out);
    Data data = load_data(g.input(a.data), a.flags.min_count);
    auto init = pretrained_init(a.flags.pretrained, out);

    nlohmann::json rows = nlohmann::json::array();
    out << std::left << std::setw(4) << "L";
    for (auto s : skips) out << std::setw(22) << ("BLEU " + std::string(to_string(s)));
    for (auto s : skips) out << std::setw(14) << ("SIZE " + std::string(to_string(s)));
    out << '\n';
    for (auto L : layers) {
        nlohmann::json row = {{"layers", L}};
        std::ostringstream bleu_cells, size_cells;
        for (auto skip : skips) {
            const std::string key(to_string(skip));
            // one layer has nothing to skip over
            if (L == 1 && skip != SkipKind::none) {
                bleu_cells << std::setw(22) << "-";
                size_cells << std::setw(14) << "-";
                continue;
            }
            TrainConfig c = base;
            c.model.gcn_layers = L;
            c.model.skip = skip;
            if (skip == SkipKind::residual) c.model.embed_dim = c.model.hidden;
            validate(c);
            const std::size_t params = Model(c.model, data.vocab, c.seed).params().scalar_count();
            nlohmann::json cell = {{"parameters", params}};
            if (!a.sizes_only) {
                MultiRunOptions opts;
                opts.runs = a.runs;
                opts.run_root = fs::path(a.out) / ("L" + std::to_string(L) + "-" + key);
                opts.init = init;
                const auto r = multi_run(c, data.vocab, data.train, data.dev, data.test, opts);
                cell["test_bleu"] = r.test_bleu.to_json();
                bleu_cells << std::setw(22) << mean_std(r.test_bleu);
            } else {
                bleu_cells << std::setw(22) << "n/a";
            }
            size_cells << std::setw(14) << params;
            row[key] = cell;
        }
        out << std::setw(4) << L << bleu_cells.str() << size_cells.str() << '\n';
        rows.push_back(row);
    }
    if (!a.out.empty()) {
        const fs::path table = fs::path(a.out) / "ablation.json";
        std::ofstream(table, std::ios::trunc) << rows.dump(2) << '\n';
        nlohmann::json cfg = base.to_json();
        cfg["layers"] = a.layers;
        cfg["skips"] = a.skips;
        cfg["runs"] = a.runs;
        cfg["sizes_only"] = a.sizes_only;
        append_manifest(a.out, manifest_for("ablate", g.seed, cfg), data.files, files_under(a.out));
    }
    return kExitOk;
}

struct GradcheckArgs {
    std::string which = "all";
    double epsilon = 1e-5;
    double tolerance = 1e-4;
    std::string corrupt;
};

int cmd_gradcheck(const GradcheckArgs& a, const Globals& g, std::ostream& out) {
    std::vector<ModelGradCheckCase> cases;
    for (auto& c : default_gradcheck_cases())
        if (a.which == "all" || a.which == c.name) cases.push_back(c);
    if (cases.empty()) throw ConfigError("unknown gradcheck case '" + a.which + "'");
    GradCheckOptions opts;
    opts.epsilon = a.epsilon;
    opts.tolerance = a.tolerance;
    bool corrupted = false;
    if (!a.corrupt.empty()) {
        opts.corrupt = [&](std::string_view name, std::vector<double>& grad) {
            if (name != a.corrupt) return;
            grad.at(0) += 1.0;
            corrupted = true;
        };
    }
    bool ok = true;
    double total = 0.0;
    for (const auto& c : cases) {
        const auto r = run_model_gradcheck(c, g.seed, opts);
        total += r.seconds;
        const bool pass = r.report.passed();
        ok = ok && pass;
        out << c.name << ": " << (pass ? "PASS" : "FAIL") << " max relative error " << r.report.max_rel_error << " ("
            << r.report.worst_parameter << "), " << r.scalars << " parameters, " << std::fixed
            << std::setprecision(2) << r.seconds << " s" << std::defaultfloat << std::setprecision(6) << '\n';
        for (const auto& p : r.report.parameters)
            if (p.max_rel_error >= r.report.tolerance)
                out << "  " << p.name << "[" << p.worst_index << "]: relative error " << p.max_rel_error
                    << " analytic " << p.worst_analytic << " numeric " << p.worst_numeric << '\n';
    }
    if (!a.corrupt.empty() && !corrupted) throw ConfigError("no parameter named '" + a.corrupt + "'");
    out << (ok ? "gradcheck passed" : "gradcheck FAILED") << " (" << std::fixed << std::setprecision(2) << total
        << " s)" << std::defaultfloat << '\n';
    return ok ? kExitOk : kExitCheckFailed;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Graph-to-sequence generation toolkit", "g2t"};
    app.set_version_flag("--version", std::string(kToolVersion));
    app.set_config("--config", "", "TOML config file; command-line flags override its values");
    app.allow_config_extras(CLI::config_extras_mode::error);
    app.require_subcommand(1);
    app.fallthrough();

    Globals g;
    app.add_option("--seed", g.seed, "seed for every random stream")->capture_default_str();
    app.add_option("--data-root", g.data_root, "base for relative input paths")->envname("G2T_DATA_ROOT");

    PreprocessArgs pre;
    auto* p = app.add_subcommand("preprocess", "convert WebNLG / SR11 records to JSONL graphs");
    p->add_option("--task", pre.task, "webnlg | sr11 | synthetic")->capture_default_str();
    p->add_option("--in", pre.in, "input file or directory with train/dev/test.txt");
    p->add_option("--out", pre.out, "output directory")->required();
    p->add_option("--split", pre.split, "split name when --in is a file")->capture_default_str();
    p->add_option("--categories", pre.categories, "entity<TAB>PLACEHOLDER map for delexicalisation");
    p->add_flag("--split-entities", pre.split_entities, "multi-word entities become NE-linked word chains");
    p->add_flag("--lowercase", pre.lowercase, "lowercase labels and targets");
    p->add_flag("--linearise", pre.linearise, "store the depth-first linearisation for the BiLSTM baseline");
    p->add_flag("--no-edge-labels", pre.no_edge_labels, "linearise without edge-label tokens");
    p->add_option("--max-target-len", pre.max_target_len, "drop longer targets")->capture_default_str();
    p->add_option("--min-count", pre.min_count, "vocabulary frequency cut-off")->capture_default_str();
    p->add_option("--count", pre.count, "synthetic train size")->capture_default_str();
    p->add_option("--dev-count", pre.dev_count, "synthetic dev size")->capture_default_str();
    p->add_option("--test-count", pre.test_count, "synthetic test size")->capture_default_str();

    TrainArgs tr;
    auto* t = app.add_subcommand("train", "train a model (several seeds with --runs)");
    t->add_option("--data", tr.data, "preprocessed directory")->required();
    t->add_option("--out", tr.out, "run directory")->required();
    t->add_option("--runs", tr.runs, "independent runs with seeds seed, seed+1, ...")->capture_default_str();
    tr.flags.add(t);

    GenerateArgs ge;
    auto* gen = app.add_subcommand("generate", "decode a JSONL file with a checkpoint");
    gen->add_option("--model", ge.model, "checkpoint")->required();
    gen->add_option("--in", ge.in, "JSONL examples")->required();
    gen->add_option("--out", ge.out, "output text, one line per example")->required();
    gen->add_option("--relex", ge.relex, "relex tables (default: <in>.relex.json when present)");
    gen->add_option("--vocab", ge.vocab, "vocab.json to check against (default: next to --in when present)");
    gen->add_option("--attention", ge.attention, "write attention weights to this JSON file (greedy)");
    gen->add_option("--max-len", ge.max_len)->capture_default_str();
    gen->add_option("--beam", ge.beam, "beam width, 1 = greedy")->capture_default_str();

    EvaluateArgs ev;
    auto* e = app.add_subcommand("evaluate", "corpus BLEU of a hypothesis file");
    e->add_option("--hyp", ev.hyp)->required();
    e->add_option("--ref", ev.refs, "reference file; repeat for several references")->required();
    e->add_flag("--smooth", ev.smooth, "floor zero n-gram counts");
    e->add_option("--max-n", ev.max_n)->capture_default_str();

    AblateArgs ab;
    auto* a = app.add_subcommand("ablate", "layers x skip-connection grid");
    a->add_option("--data", ab.data, "preprocessed directory")->required();
    a->add_option("--out", ab.out, "output directory");
    a->add_option("--grid-layers", ab.layers, "e.g. 1-7 or 1,2,4")->capture_default_str();
    a->add_option("--skips", ab.skips, "comma-separated skip kinds")->capture_default_str();
    a->add_option("--runs", ab.runs)->capture_default_str();
    a->add_flag("--sizes-only", ab.sizes_only, "report parameter counts without training");
    ab.flags.add(a);

    GradcheckArgs gc;
    auto* c = app.add_subcommand("gradcheck", "finite-difference check of every model parameter");
    c->add_option("--case", gc.which, "all | gcn-residual | gcn-dense-copy | bilstm")->capture_default_str();
    c->add_option("--epsilon", gc.epsilon)->capture_default_str();
    c->add_option("--tolerance", gc.tolerance)->capture_default_str();
    c->add_option("--corrupt", gc.corrupt, "test hook: add 1 to the first gradient entry of this parameter");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& ex) {
        const int code = app.exit(ex, out, err);
        return code == 0 ? kExitOk : kExitContractViolation;
    }

    try {
        if (*p) return cmd_preprocess(pre, g, out, err);
        if (*t) return cmd_train(tr, g, out);
        if (*gen) return cmd_generate(ge, g);
        if (*e) return cmd_evaluate(ev, g, out);
        if (*a) return cmd_ablate(ab, g, out);
        if (*c) return cmd_gradcheck(gc, g, out);
    } catch (const ContractViolation& ex) {
        err << "error: " << ex.what() << '\n';
        return kExitContractViolation;
    } catch (const DataError& ex) {
        err << "error: " << ex.what() << '\n';
        return kExitDataError;
    } catch (const NumericalError& ex) {
        err << "error: " << ex.what() << '\n';
        return kExitDataError;
    } catch (const nlohmann::json::exception& ex) {
        err << "error: malformed JSON: " << ex.what() << '\n';
        return kExitDataError;
    } catch (const std::filesystem::filesystem_error& ex) {
        err << "error: " << ex.what() << '\n';
        return kExitDataError;
    }
    return kExitContractViolation;
}

}  // namespace g2t
