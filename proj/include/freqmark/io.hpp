#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "freqmark/attacks.hpp"
#include "freqmark/detector.hpp"
#include "freqmark/eval.hpp"

namespace freqmark {

// Writes via a temp file renamed on success; errors never leave partial
// output behind.
void atomic_write_file(const std::string& path, const std::string& content);

std::string read_file(const std::string& path); // throws Error if unreadable

// Dataset JSONL record:
// {"id": str, "tokens": [str...], "labels": [bool...],
//  "attack": {"kind": str, "rate": float, "seed": int}}
nlohmann::json sample_to_json(const MixedSample& sample);
MixedSample sample_from_json(const nlohmann::json& j);

std::vector<MixedSample> read_samples_jsonl(const std::string& path);
std::string samples_to_jsonl(const std::vector<MixedSample>& samples);

nlohmann::json detection_to_json(const DetectionResult& result);
nlohmann::json report_to_json(const EvalReport& report);

// Header row `window_start,f_0.0,f_0.1,...`, one row per window.
std::string spectrogram_to_csv(const Spectrogram& spec);

// One row per (attack, rate): attack,rate,auc,perplexity_proxy.
std::string curves_to_csv(const EvalReport& report);

GuidingSignal load_signal(const std::string& path, int k_max = kMaxCandidates);

} // namespace freqmark
