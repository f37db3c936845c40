#pragma once

#include <cstdint>
#include <memory>
#include <mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include "freqmark/lm_backend.hpp"

namespace freqmark {

struct RemoteLmConfig {
    std::string base_url;   // e.g. http://localhost:8080; FREQMARK_API_BASE
    std::string api_key;    // FREQMARK_API_KEY
    std::string model = "gpt-3.5-turbo-instruct";
    int logprobs = kMaxCandidates;
    double temperature = 0.0;
    double top_p = 0.95;
    int max_retries = 3;
    int retry_base_ms = 100; // exponential backoff base
    int timeout_seconds = 30;

    // Fills base_url / api_key from the environment when unset.
    static RemoteLmConfig from_env();
};

// Client for OpenAI-compatible completion APIs. Issues one
// POST {base_url}/v1/completions per context with max_tokens=1 and reads
// top_logprobs. Token ids are interned per client in first-seen order.
// Responses are cached by context, so re-running detection on the same
// text does not re-bill. Thread-safe.
class RemoteLm : public LmBackend {
public:
    explicit RemoteLm(RemoteLmConfig config);
    ~RemoteLm() override;

    RankedCandidates next_candidates(std::span<const Token> context,
                                     int k) const override;
    std::size_t vocab_size() const override;
    std::optional<Token> lookup(std::string_view text) const override;

    std::vector<Token> tokenize(std::string_view text) const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

} // namespace freqmark
