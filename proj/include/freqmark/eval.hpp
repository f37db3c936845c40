#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

#include "freqmark/attacks.hpp"
#include "freqmark/detector.hpp"
#include "freqmark/guiding_signal.hpp"
#include "freqmark/metrics.hpp"
#include "freqmark/reference_lm.hpp"

namespace freqmark {

struct CorpusSpec {
    int n_human = 100;
    int n_watermarked = 100;
    int n_copy_paste = 100;
    std::vector<double> substitution_rates; // attacked-variant rates
    int per_rate = 100;
    int sample_len = 200; // tokens per generated sample
    int prompt_len = 3;
    int segment_len_min = 20;
    int segment_len_max = 100;
    std::uint64_t seed = 1;
};

// Builds the mixed-content JSONL dataset: pure-human chunks, pure
// watermarked generations, copy-paste mixtures, and substitution-attacked
// variants at the configured rates. Fully determined by (inputs, spec).
std::vector<MixedSample> build_corpus(const LmBackend& backend,
                                      const std::string& human_texts_path,
                                      const GuidingSignal& signal,
                                      const CorpusSpec& spec);

enum class BaselineMethod { log_p, entropy, rank, logrank };
std::string to_string(BaselineMethod method);

// Per-sample baseline statistics, sign-oriented so larger = more LLM-like:
//   log_p   =  mean token logprob
//   entropy = -mean candidate-distribution entropy
//   rank    = -mean rank
//   logrank = -mean ln(rank)
std::array<double, 4> baseline_scores(const LmBackend& backend,
                                      std::span<const Token> tokens);

// exp(-mean conditional log-probability) under the scoring backend.
double perplexity_proxy(const LmBackend& backend, std::span<const Token> tokens);

struct AttackRow {
    AttackKind kind = AttackKind::none;
    double rate = 0.0;
    double auc = 0.0;
    double perplexity = 0.0;
    int n_samples = 0;
};

struct EvalReport {
    double auc = 0.0; // watermarked vs human, sequence scores, test split
    double fpr = 0.0;
    double fnr = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    double tau = 0.0; // calibrated on the calibration split
    std::map<std::string, double> baseline_aucs;
    ClassificationMetrics token_level; // copy-paste samples, segment membership
    double boundary_within_5 = 0.0;    // fraction of boundaries within +-5
    std::vector<AttackRow> per_attack_rows;
    int n_samples = 0;
};

struct EvalConfig {
    StftConfig stft;
    std::uint64_t seed = 1;
    double calibration_fraction = 0.3;
    bool calibrate_tau = true; // otherwise stft.threshold_tau is used as-is
};

// Seeded-hash dataset split; stable across runs and platforms.
bool is_calibration_sample(const std::string& id, std::uint64_t seed,
                           double calibration_fraction);

// Runs detection and baselines over the dataset and aggregates the metric
// suite. Per-sample scoring is parallel; aggregation order is fixed by
// sample position, so reports are byte-reproducible.
EvalReport evaluate(const LmBackend& backend,
                    const std::vector<MixedSample>& dataset,
                    const EvalConfig& cfg);

} // namespace freqmark
