#include <cstdio>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "freqmark/attacks.hpp"
#include "freqmark/detector.hpp"
#include "freqmark/embedder.hpp"
#include "freqmark/errors.hpp"
#include "freqmark/eval.hpp"
#include "freqmark/io.hpp"
#include "freqmark/rank_extractor.hpp"
#include "freqmark/reference_lm.hpp"
#include "freqmark/remote_lm.hpp"

namespace {

using namespace freqmark;

struct BackendOptions {
    std::string kind = "reference";
    std::string corpus_path = "data/corpus.txt";
    int order = 3;
    double smoothing = 0.01;
    std::uint64_t seed = 0;
};

void add_backend_options(CLI::App* cmd, BackendOptions& opts) {
    cmd->add_option("--backend", opts.kind, "Backend kind")
        ->check(CLI::IsMember({"reference", "remote"}))
        ->capture_default_str();
    cmd->add_option("--corpus", opts.corpus_path,
                    "Reference LM corpus (plain text)")
        ->capture_default_str();
    cmd->add_option("--order", opts.order, "Reference LM n-gram order")
        ->capture_default_str();
    cmd->add_option("--smoothing", opts.smoothing, "Reference LM add-lambda")
        ->capture_default_str();
}

std::unique_ptr<LmBackend> make_backend(const BackendOptions& opts) {
    if (opts.kind == "remote") {
        RemoteLmConfig cfg = RemoteLmConfig::from_env();
        if (cfg.api_key.empty()) {
            throw Error("remote backend requires FREQMARK_API_KEY");
        }
        return std::make_unique<RemoteLm>(std::move(cfg));
    }
    ReferenceLmConfig cfg;
    cfg.order = opts.order;
    cfg.corpus_path = opts.corpus_path;
    cfg.smoothing = opts.smoothing;
    cfg.seed = opts.seed;
    return std::make_unique<ReferenceLm>(cfg);
}

void emit(const std::optional<std::string>& out_path, const std::string& content) {
    if (out_path) {
        atomic_write_file(*out_path, content);
    } else {
        std::cout << content;
    }
}

struct StftOptions {
    int window = 10;
    int hop = 1;
    double tau = 0.4;
    int smoothing_len = 5;
    int min_segment = 5;
};

void add_stft_options(CLI::App* cmd, StftOptions& opts) {
    cmd->add_option("--window", opts.window, "STFT window length")->capture_default_str();
    cmd->add_option("--hop", opts.hop, "STFT hop (window - overlap)")->capture_default_str();
    cmd->add_option("--tau", opts.tau, "Detection threshold")->capture_default_str();
    cmd->add_option("--smoothing-len", opts.smoothing_len, "Median smoothing length")
        ->capture_default_str();
    cmd->add_option("--min-segment", opts.min_segment, "Minimum segment tokens")
        ->capture_default_str();
}

StftConfig to_stft_config(const StftOptions& opts, const GuidingSignal& signal) {
    StftConfig cfg;
    cfg.window_len = opts.window;
    cfg.hop = opts.hop;
    cfg.target_frequency = signal.base_frequency();
    cfg.threshold_tau = opts.tau;
    cfg.smoothing_len = opts.smoothing_len;
    cfg.min_segment_tokens = opts.min_segment;
    cfg.validate();
    return cfg;
}

int run(int argc, char** argv) {
    CLI::App app{"FreqMark: frequency-based watermarking of LLM token streams"};
    app.require_subcommand(1);

    // ---- generate ----
    auto* generate = app.add_subcommand(
        "generate", "Embed a watermark while generating from each prompt line");
    BackendOptions gen_backend;
    std::string gen_prompt_file, gen_signal_path;
    int gen_max_tokens = 200;
    std::size_t gen_phase = 0;
    bool gen_greedy = false;
    std::optional<std::string> gen_out;
    generate->add_option("--prompt-file", gen_prompt_file, "One prompt per line")
        ->required()
        ->check(CLI::ExistingFile);
    generate->add_option("--signal", gen_signal_path, "Guiding signal JSON")
        ->check(CLI::ExistingFile);
    generate->add_option("--max-tokens", gen_max_tokens)->capture_default_str();
    generate->add_option("--phase-offset", gen_phase)->capture_default_str();
    generate->add_flag("--greedy", gen_greedy,
                       "Unwatermarked rank-1 generation (no signal needed)");
    generate->add_option("--out", gen_out, "Output JSONL (default: stdout)");
    add_backend_options(generate, gen_backend);

    // ---- ranks ----
    auto* ranks_cmd = app.add_subcommand(
        "ranks", "Reconstruct per-token rank sequences from text records");
    BackendOptions ranks_backend;
    std::string ranks_in;
    std::size_t ranks_prefix = 0;
    std::optional<std::string> ranks_out;
    ranks_cmd->add_option("--in", ranks_in, "Input JSONL")->required()->check(CLI::ExistingFile);
    ranks_cmd->add_option("--context-prefix", ranks_prefix,
                          "Tokens treated as prompt, excluded from ranks")
        ->capture_default_str();
    ranks_cmd->add_option("--out", ranks_out, "Output JSONL (default: stdout)");
    add_backend_options(ranks_cmd, ranks_backend);

    // ---- detect ----
    auto* detect_cmd = app.add_subcommand(
        "detect", "Score and localize watermarked regions in text records");
    BackendOptions det_backend;
    StftOptions det_stft;
    std::string det_in, det_signal_path;
    std::optional<std::string> det_out, det_spec_csv;
    detect_cmd->add_option("--in", det_in, "Input JSONL")->required()->check(CLI::ExistingFile);
    detect_cmd->add_option("--signal", det_signal_path, "Guiding signal JSON")
        ->required()
        ->check(CLI::ExistingFile);
    detect_cmd->add_option("--out", det_out, "Output JSONL (default: stdout)");
    detect_cmd->add_option("--spectrogram-csv", det_spec_csv,
                           "Write the first record's spectrogram as CSV");
    add_stft_options(detect_cmd, det_stft);
    add_backend_options(detect_cmd, det_backend);

    // ---- spectrogram ----
    auto* spec_cmd = app.add_subcommand(
        "spectrogram", "Export the STFT magnitudes of one record as CSV");
    BackendOptions spec_backend;
    StftOptions spec_stft;
    std::string spec_in, spec_signal_path;
    std::size_t spec_index = 0;
    std::optional<std::string> spec_out;
    spec_cmd->add_option("--in", spec_in, "Input JSONL")->required()->check(CLI::ExistingFile);
    spec_cmd->add_option("--signal", spec_signal_path, "Guiding signal JSON")
        ->required()
        ->check(CLI::ExistingFile);
    spec_cmd->add_option("--index", spec_index, "Record index")->capture_default_str();
    spec_cmd->add_option("--out", spec_out, "Output CSV (default: stdout)");
    add_stft_options(spec_cmd, spec_stft);
    add_backend_options(spec_cmd, spec_backend);

    // ---- attack ----
    auto* attack_cmd = app.add_subcommand(
        "attack", "Apply an attack transformation to dataset records");
    BackendOptions atk_backend;
    std::string atk_kind = "substitution";
    double atk_rate = 0.0;
    std::uint64_t atk_seed = 0;
    std::string atk_in, atk_human_file, atk_hook_cmd;
    int atk_seg_min = 20, atk_seg_max = 100;
    std::optional<std::string> atk_out;
    attack_cmd->add_option("--kind", atk_kind, "Attack kind")
        ->check(CLI::IsMember(
            {"copy_paste", "substitution", "paraphrase_hook", "translation_hook"}))
        ->capture_default_str();
    attack_cmd->add_option("--rate", atk_rate, "Fraction of watermarked tokens affected")
        ->capture_default_str();
    attack_cmd->add_option("--seed", atk_seed)->capture_default_str();
    attack_cmd->add_option("--in", atk_in, "Input JSONL")->required()->check(CLI::ExistingFile);
    attack_cmd->add_option("--human-file", atk_human_file,
                           "Human text (copy_paste only)");
    attack_cmd->add_option("--hook-cmd", atk_hook_cmd,
                           "External transformer command (hook attacks)");
    attack_cmd->add_option("--segment-min", atk_seg_min)->capture_default_str();
    attack_cmd->add_option("--segment-max", atk_seg_max)->capture_default_str();
    attack_cmd->add_option("--out", atk_out, "Output JSONL (default: stdout)");
    add_backend_options(attack_cmd, atk_backend);

    // ---- corpus ----
    auto* corpus_cmd = app.add_subcommand(
        "corpus", "Build the mixed-content evaluation dataset");
    BackendOptions cor_backend;
    std::string cor_human, cor_signal_path;
    CorpusSpec cor_spec;
    cor_spec.substitution_rates = {0.1, 0.2, 0.3, 0.4, 0.5};
    std::optional<std::string> cor_out;
    corpus_cmd->add_option("--human-texts", cor_human, "Human plain-text corpus")
        ->required()
        ->check(CLI::ExistingFile);
    corpus_cmd->add_option("--signal", cor_signal_path, "Guiding signal JSON")
        ->required()
        ->check(CLI::ExistingFile);
    corpus_cmd->add_option("--n-human", cor_spec.n_human)->capture_default_str();
    corpus_cmd->add_option("--n-watermarked", cor_spec.n_watermarked)->capture_default_str();
    corpus_cmd->add_option("--n-copy-paste", cor_spec.n_copy_paste)->capture_default_str();
    corpus_cmd->add_option("--rates", cor_spec.substitution_rates,
                           "Substitution attack rates");
    corpus_cmd->add_option("--per-rate", cor_spec.per_rate)->capture_default_str();
    corpus_cmd->add_option("--sample-len", cor_spec.sample_len)->capture_default_str();
    corpus_cmd->add_option("--seed", cor_spec.seed)->capture_default_str();
    corpus_cmd->add_option("--out", cor_out, "Output JSONL (default: stdout)");
    add_backend_options(corpus_cmd, cor_backend);

    // ---- eval ----
    auto* eval_cmd = app.add_subcommand(
        "eval", "Run detection and baselines over a dataset and report metrics");
    BackendOptions ev_backend;
    StftOptions ev_stft;
    std::string ev_dataset, ev_signal_path;
    std::optional<std::string> ev_report, ev_curves;
    std::uint64_t ev_seed = 1;
    double ev_cal_fraction = 0.3;
    bool ev_no_calibrate = false;
    eval_cmd->add_option("--dataset", ev_dataset, "Dataset JSONL")
        ->required()
        ->check(CLI::ExistingFile);
    eval_cmd->add_option("--signal", ev_signal_path, "Guiding signal JSON")
        ->required()
        ->check(CLI::ExistingFile);
    eval_cmd->add_option("--report", ev_report, "Report JSON (default: stdout)");
    eval_cmd->add_option("--curves", ev_curves, "Per-attack CSV for plotting");
    eval_cmd->add_option("--seed", ev_seed, "Calibration split seed")->capture_default_str();
    eval_cmd->add_option("--calibration-fraction", ev_cal_fraction)->capture_default_str();
    eval_cmd->add_flag("--no-calibrate", ev_no_calibrate,
                       "Use --tau as-is instead of calibrating");
    add_stft_options(eval_cmd, ev_stft);
    add_backend_options(eval_cmd, ev_backend);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e); // prints the one-line reason to stderr
        return 2;    // usage error
    }

    if (generate->parsed()) {
        const auto backend = make_backend(gen_backend);
        std::optional<GuidingSignal> signal;
        if (!gen_greedy) {
            if (gen_signal_path.empty()) throw Error("generate: --signal is required");
            signal = load_signal(gen_signal_path);
        }
        std::istringstream prompts(read_file(gen_prompt_file));
        std::string line, out;
        int index = 0;
        while (std::getline(prompts, line)) {
            if (split_words(line).empty()) continue;
            std::vector<std::string> words = split_words(line);
            const std::vector<Token> prompt = tokens_from_texts(*backend, words);
            nlohmann::json record;
            std::vector<std::string> tokens;
            std::vector<bool> labels;
            if (gen_greedy) {
                const auto generated =
                    generate_unwatermarked(*backend, prompt, gen_max_tokens);
                for (std::size_t i = 0; i < generated.size(); ++i) {
                    tokens.push_back(generated[i].text);
                    labels.push_back(i >= prompt.size());
                }
                record["prompt_length"] = prompt.size();
            } else {
                EmbedConfig cfg{*signal, gen_max_tokens, kMaxCandidates, gen_phase};
                const WatermarkedOutput wm = embed(*backend, prompt, cfg);
                for (std::size_t i = 0; i < wm.tokens.size(); ++i) {
                    tokens.push_back(wm.tokens[i].text);
                    labels.push_back(i >= wm.prompt_length);
                }
                record["ranks_used"] = wm.ranks_used;
                record["prompt_length"] = wm.prompt_length;
                record["phase_offset"] = wm.phase_offset;
            }
            record["id"] = (gen_greedy ? "greedy_" : "generated_") + std::to_string(index);
            record["tokens"] = tokens;
            record["labels"] = labels;
            record["attack"] = {{"kind", "none"}, {"rate", 0.0}, {"seed", 0}};
            out += record.dump();
            out += '\n';
            ++index;
        }
        emit(gen_out, out);
        return 0;
    }

    if (ranks_cmd->parsed()) {
        const auto backend = make_backend(ranks_backend);
        std::string out;
        for (const MixedSample& sample : read_samples_jsonl(ranks_in)) {
            const std::vector<Token> tokens = tokens_from_texts(*backend, sample.tokens);
            const RankSequence seq = extract(*backend, tokens, ranks_prefix);
            out += nlohmann::json{{"id", sample.id},
                                  {"ranks", seq.ranks},
                                  {"context_prefix_length", seq.context_prefix_length}}
                       .dump();
            out += '\n';
        }
        emit(ranks_out, out);
        return 0;
    }

    if (detect_cmd->parsed()) {
        const auto backend = make_backend(det_backend);
        const GuidingSignal signal = load_signal(det_signal_path);
        const StftConfig cfg = to_stft_config(det_stft, signal);
        std::string out;
        bool first = true;
        for (const MixedSample& sample : read_samples_jsonl(det_in)) {
            const std::vector<Token> tokens = tokens_from_texts(*backend, sample.tokens);
            const RankSequence seq = extract(*backend, tokens, 0);
            const DetectionResult result = detect(seq, cfg);
            nlohmann::json record = detection_to_json(result);
            record["id"] = sample.id;
            out += record.dump();
            out += '\n';
            if (first && det_spec_csv) {
                atomic_write_file(*det_spec_csv, spectrogram_to_csv(stft(seq, cfg)));
            }
            first = false;
        }
        emit(det_out, out);
        return 0;
    }

    if (spec_cmd->parsed()) {
        const auto backend = make_backend(spec_backend);
        const GuidingSignal signal = load_signal(spec_signal_path);
        const StftConfig cfg = to_stft_config(spec_stft, signal);
        const auto samples = read_samples_jsonl(spec_in);
        if (spec_index >= samples.size()) {
            throw Error("spectrogram: record index out of range");
        }
        const std::vector<Token> tokens =
            tokens_from_texts(*backend, samples[spec_index].tokens);
        const RankSequence seq = extract(*backend, tokens, 0);
        emit(spec_out, spectrogram_to_csv(stft(seq, cfg)));
        return 0;
    }

    if (attack_cmd->parsed()) {
        const AttackKind kind = attack_kind_from_string(atk_kind);
        AttackConfig cfg;
        cfg.kind = kind;
        cfg.rate = atk_rate;
        cfg.seed = atk_seed;
        cfg.segment_len_min = atk_seg_min;
        cfg.segment_len_max = atk_seg_max;

        const auto samples = read_samples_jsonl(atk_in);
        std::vector<MixedSample> attacked;
        if (kind == AttackKind::copy_paste) {
            if (atk_human_file.empty()) {
                throw Error("attack: copy_paste requires --human-file");
            }
            const std::vector<std::string> human = split_words(read_file(atk_human_file));
            for (std::size_t i = 0; i < samples.size(); ++i) {
                // the record's true-labeled suffix is the generated region
                WatermarkedOutput wm;
                for (std::size_t t = 0; t < samples[i].tokens.size(); ++t) {
                    wm.tokens.push_back(Token{kUnknownTokenId, samples[i].tokens[t]});
                    if (!samples[i].labels[t]) wm.prompt_length = t + 1;
                }
                AttackConfig per = cfg;
                per.seed = cfg.seed + i;
                MixedSample s = copy_paste(human, wm, per);
                s.id = samples[i].id + "_cp";
                attacked.push_back(std::move(s));
            }
        } else if (kind == AttackKind::substitution) {
            const auto backend = make_backend(atk_backend);
            for (std::size_t i = 0; i < samples.size(); ++i) {
                AttackConfig per = cfg;
                per.seed = cfg.seed + i;
                MixedSample s = substitute(samples[i], *backend, per);
                s.id = samples[i].id + "_sub";
                attacked.push_back(std::move(s));
            }
        } else {
            if (atk_hook_cmd.empty()) {
                throw Error("attack: hook attacks require --hook-cmd");
            }
            for (std::size_t i = 0; i < samples.size(); ++i) {
                AttackConfig per = cfg;
                per.seed = cfg.seed + i;
                try {
                    MixedSample s = transform_hook(samples[i], atk_hook_cmd, per);
                    s.id = samples[i].id + "_hook";
                    s.provenance.kind = kind;
                    attacked.push_back(std::move(s));
                } catch (const TransformerFailedError& e) {
                    std::cerr << "skipping " << samples[i].id << ": " << e.what()
                              << "\n";
                }
            }
        }
        emit(atk_out, samples_to_jsonl(attacked));
        return 0;
    }

    if (corpus_cmd->parsed()) {
        const auto backend = make_backend(cor_backend);
        const GuidingSignal signal = load_signal(cor_signal_path);
        const auto dataset = build_corpus(*backend, cor_human, signal, cor_spec);
        emit(cor_out, samples_to_jsonl(dataset));
        return 0;
    }

    if (eval_cmd->parsed()) {
        const auto backend = make_backend(ev_backend);
        const GuidingSignal signal = load_signal(ev_signal_path);
        EvalConfig cfg;
        cfg.stft = to_stft_config(ev_stft, signal);
        cfg.seed = ev_seed;
        cfg.calibration_fraction = ev_cal_fraction;
        cfg.calibrate_tau = !ev_no_calibrate;
        const auto dataset = read_samples_jsonl(ev_dataset);
        const EvalReport report = evaluate(*backend, dataset, cfg);
        const std::string report_json = report_to_json(report).dump(2) + "\n";
        emit(ev_report, report_json);
        if (ev_curves) atomic_write_file(*ev_curves, curves_to_csv(report));
        return 0;
    }

    return 2;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const freqmark::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
