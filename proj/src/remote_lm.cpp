#include "freqmark/remote_lm.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "freqmark/errors.hpp"
#include "freqmark/reference_lm.hpp"

namespace freqmark {

RemoteLmConfig RemoteLmConfig::from_env() {
    RemoteLmConfig cfg;
    if (const char* base = std::getenv("FREQMARK_API_BASE")) cfg.base_url = base;
    if (const char* key = std::getenv("FREQMARK_API_KEY")) cfg.api_key = key;
    return cfg;
}

struct RemoteLm::Impl {
    RemoteLmConfig config;

    mutable std::mutex vocab_mutex;
    mutable std::vector<std::string> interned;
    mutable std::unordered_map<std::string, std::uint32_t> index;

    // Responses cached by (prompt, k): re-running detection on the same
    // text must not re-bill.
    mutable std::mutex cache_mutex;
    mutable std::unordered_map<std::string, RankedCandidates> cache;

    Token intern(const std::string& text) const {
        std::lock_guard lock(vocab_mutex);
        const auto it = index.find(text);
        if (it != index.end()) return Token{it->second, text};
        const auto id = static_cast<std::uint32_t>(interned.size());
        interned.push_back(text);
        index.emplace(text, id);
        return Token{id, text};
    }

    nlohmann::json request_completion(const std::string& prompt) const {
        const nlohmann::json body{
            {"model", config.model},   {"prompt", prompt},
            {"max_tokens", 1},         {"logprobs", config.logprobs},
            {"temperature", config.temperature}, {"top_p", config.top_p},
        };
        httplib::Headers headers;
        if (!config.api_key.empty()) {
            headers.emplace("Authorization", "Bearer " + config.api_key);
        }

        std::string last_error = "no attempts made";
        for (int attempt = 0; attempt <= config.max_retries; ++attempt) {
            if (attempt > 0) {
                std::this_thread::sleep_for(std::chrono::milliseconds(
                    config.retry_base_ms << (attempt - 1)));
            }
            httplib::Client client(config.base_url);
            client.set_connection_timeout(config.timeout_seconds, 0);
            client.set_read_timeout(config.timeout_seconds, 0);
            const httplib::Result res =
                client.Post("/v1/completions", headers, body.dump(), "application/json");
            if (!res) {
                last_error = "connection failed: " + httplib::to_string(res.error());
                continue; // transient; retry
            }
            if (res->status == 200) {
                try {
                    return nlohmann::json::parse(res->body);
                } catch (const nlohmann::json::exception& e) {
                    throw BackendUnavailableError(
                        std::string("remote backend: malformed response: ") + e.what());
                }
            }
            if (res->status == 400 || res->status == 413) {
                std::string code;
                try {
                    code = nlohmann::json::parse(res->body)
                               .value("error", nlohmann::json::object())
                               .value("code", "");
                } catch (const nlohmann::json::exception&) {
                }
                if (code == "context_length_exceeded" || res->status == 413) {
                    throw ContextTooLongError(
                        "remote backend: context exceeds the model window");
                }
                throw BackendUnavailableError("remote backend: HTTP 400: " + res->body);
            }
            if (res->status == 401 || res->status == 403) {
                throw BackendUnavailableError(
                    "remote backend: authentication failed (HTTP " +
                    std::to_string(res->status) + ")");
            }
            last_error = "HTTP " + std::to_string(res->status);
            // 429/5xx: retry
        }
        throw BackendUnavailableError("remote backend: " + last_error + " after " +
                                      std::to_string(config.max_retries + 1) +
                                      " attempts");
    }
};

RemoteLm::RemoteLm(RemoteLmConfig config) : impl_(std::make_unique<Impl>()) {
    if (config.base_url.empty()) {
        throw BackendUnavailableError(
            "remote backend: no base URL (set FREQMARK_API_BASE)");
    }
    impl_->config = std::move(config);
}

RemoteLm::~RemoteLm() = default;

RankedCandidates RemoteLm::next_candidates(std::span<const Token> context,
                                           int k) const {
    if (k < 1) throw Error("next_candidates: k must be >= 1");

    std::string prompt;
    for (const Token& t : context) {
        if (!prompt.empty()) prompt += ' ';
        prompt += t.text;
    }
    const std::string cache_key = std::to_string(k) + "\x1f" + prompt;
    {
        std::lock_guard lock(impl_->cache_mutex);
        const auto it = impl_->cache.find(cache_key);
        if (it != impl_->cache.end()) return it->second;
    }

    const nlohmann::json response = impl_->request_completion(prompt);
    nlohmann::json top;
    try {
        top = response.at("choices").at(0).at("logprobs").at("top_logprobs").at(0);
    } catch (const nlohmann::json::exception&) {
        throw BackendUnavailableError(
            "remote backend: response is missing top_logprobs");
    }

    std::vector<Candidate> candidates;
    for (const auto& [text, logprob] : top.items()) {
        candidates.push_back({impl_->intern(text), logprob.get<double>()});
    }
    std::sort(candidates.begin(), candidates.end(),
              [](const Candidate& a, const Candidate& b) {
                  if (a.logprob != b.logprob) return a.logprob > b.logprob;
                  return a.token.id < b.token.id;
              });
    if (static_cast<int>(candidates.size()) > k) candidates.resize(k);

    RankedCandidates out{context.size(), std::move(candidates)};
    {
        std::lock_guard lock(impl_->cache_mutex);
        impl_->cache.emplace(cache_key, out);
    }
    return out;
}

std::size_t RemoteLm::vocab_size() const {
    std::lock_guard lock(impl_->vocab_mutex);
    return impl_->interned.size();
}

std::optional<Token> RemoteLm::lookup(std::string_view text) const {
    return impl_->intern(std::string(text));
}

std::vector<Token> RemoteLm::tokenize(std::string_view text) const {
    std::vector<Token> out;
    for (const auto& word : split_words(text)) out.push_back(impl_->intern(word));
    return out;
}

} // namespace freqmark
