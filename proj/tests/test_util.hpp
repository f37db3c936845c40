#pragma once

// Shared fixtures for the unit tests: a tiny synthetic backend with
// hand-checkable behavior, plus temp-file helpers.

#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "freqmark/lm_backend.hpp"
#include "freqmark/reference_lm.hpp"

namespace testutil {

// Deterministic context-sensitive backend over a small integer vocabulary.
// The candidate order rotates with (sum of context ids + context length),
// so edits anywhere in the context shift every later position's ranking —
// handy for locality and round-trip tests. Logprobs are fixed per rank.
class RotatingBackend : public freqmark::LmBackend {
public:
    explicit RotatingBackend(std::size_t vocab = 8) {
        for (std::size_t i = 0; i < vocab; ++i) {
            vocab_.push_back("w" + std::to_string(i));
        }
    }

    freqmark::RankedCandidates next_candidates(
        std::span<const freqmark::Token> context, int k) const override {
        std::size_t key = context.size();
        for (const auto& t : context) {
            if (t.known()) key += t.id;
        }
        const std::size_t start = key % vocab_.size();
        freqmark::RankedCandidates out;
        out.position = context.size();
        const std::size_t take =
            std::min<std::size_t>(static_cast<std::size_t>(k), vocab_.size());
        for (std::size_t i = 0; i < take; ++i) {
            const auto id = static_cast<std::uint32_t>((start + i) % vocab_.size());
            out.candidates.push_back(
                {freqmark::Token{id, vocab_[id]}, -0.5 * static_cast<double>(i + 1)});
        }
        return out;
    }

    std::size_t vocab_size() const override { return vocab_.size(); }

    std::optional<freqmark::Token> lookup(std::string_view text) const override {
        for (std::size_t i = 0; i < vocab_.size(); ++i) {
            if (vocab_[i] == text) {
                return freqmark::Token{static_cast<std::uint32_t>(i), vocab_[i]};
            }
        }
        return std::nullopt;
    }

private:
    std::vector<std::string> vocab_;
};

// Writes content to a unique temp file and removes it on destruction.
class TempFile {
public:
    explicit TempFile(const std::string& content, const std::string& stem = "tmp") {
        static int counter = 0;
        path_ = (std::filesystem::temp_directory_path() /
                 ("freqmark_test_" + stem + "_" + std::to_string(::getpid()) + "_" +
                  std::to_string(counter++)))
                    .string();
        std::ofstream out(path_, std::ios::binary);
        out << content;
    }
    ~TempFile() {
        std::error_code ec;
        std::filesystem::remove(path_, ec);
    }
    TempFile(const TempFile&) = delete;
    TempFile& operator=(const TempFile&) = delete;

    const std::string& path() const { return path_; }

private:
    std::string path_;
};

inline freqmark::ReferenceLm make_lm(const std::string& corpus, int order = 3,
                                     double smoothing = 0.01) {
    TempFile file(corpus, "corpus");
    freqmark::ReferenceLmConfig cfg;
    cfg.order = order;
    cfg.corpus_path = file.path();
    cfg.smoothing = smoothing;
    return freqmark::ReferenceLm(cfg);
}

inline std::string data_path(const std::string& name) {
    return std::string(FREQMARK_DATA_DIR) + "/" + name;
}

} // namespace testutil
