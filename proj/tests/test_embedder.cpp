#include <doctest.h>

#include "freqmark/embedder.hpp"
#include "freqmark/errors.hpp"
#include "freqmark/guiding_signal.hpp"
#include "test_util.hpp"

using freqmark::EmbedConfig;
using freqmark::GuidingSignal;
using freqmark::Token;
using freqmark::WatermarkedOutput;

namespace {

std::vector<Token> prompt_of(const testutil::RotatingBackend& backend,
                             std::initializer_list<const char*> words) {
    std::vector<Token> out;
    for (const char* w : words) out.push_back(*backend.lookup(w));
    return out;
}

} // namespace

TEST_CASE("ranks_used follows the signal cyclically") {
    const testutil::RotatingBackend backend;
    const auto prompt = prompt_of(backend, {"w0", "w1"});
    EmbedConfig cfg{GuidingSignal({1, 3, 5, 3, 1}), 12, 5, 0};
    const WatermarkedOutput out = freqmark::embed(backend, prompt, cfg);

    REQUIRE(out.ranks_used.size() == 12);
    REQUIRE(out.generated().size() == 12);
    CHECK(out.prompt_length == 2);
    for (std::size_t i = 0; i < out.ranks_used.size(); ++i) {
        CHECK(out.ranks_used[i] == cfg.signal.amplitude_at(i));
    }
}

TEST_CASE("each generated token is the candidate at the demanded rank") {
    const testutil::RotatingBackend backend;
    const auto prompt = prompt_of(backend, {"w3"});
    EmbedConfig cfg{GuidingSignal::sinusoidal(10, 1, 5), 20, 5, 0};
    const WatermarkedOutput out = freqmark::embed(backend, prompt, cfg);

    // replay generation step by step against the backend
    std::vector<Token> ctx = prompt;
    for (std::size_t i = 0; i < out.ranks_used.size(); ++i) {
        const auto rc = backend.next_candidates(ctx, 5);
        const int rank = out.ranks_used[i];
        CHECK(out.tokens[out.prompt_length + i] ==
              rc.candidates[static_cast<std::size_t>(rank - 1)].token);
        ctx.push_back(out.tokens[out.prompt_length + i]);
    }
}

TEST_CASE("phase offset shifts the rank pattern") {
    const testutil::RotatingBackend backend;
    const auto prompt = prompt_of(backend, {"w0"});
    const GuidingSignal signal = GuidingSignal::sinusoidal(10, 1, 5);
    for (std::size_t phase : {std::size_t{0}, std::size_t{3}, std::size_t{7}}) {
        EmbedConfig cfg{signal, 15, 5, phase};
        const WatermarkedOutput out = freqmark::embed(backend, prompt, cfg);
        CHECK(out.phase_offset == phase);
        for (std::size_t i = 0; i < out.ranks_used.size(); ++i) {
            CHECK(out.ranks_used[i] == signal.amplitude_at(phase + i));
        }
    }
}

TEST_CASE("embedding is deterministic") {
    const testutil::RotatingBackend backend;
    const auto prompt = prompt_of(backend, {"w2", "w5"});
    EmbedConfig cfg{GuidingSignal::sinusoidal(10, 1, 5), 30, 5, 0};
    const WatermarkedOutput a = freqmark::embed(backend, prompt, cfg);
    const WatermarkedOutput b = freqmark::embed(backend, prompt, cfg);
    CHECK(a.tokens == b.tokens);
    CHECK(a.ranks_used == b.ranks_used);
}

TEST_CASE("k below the signal maximum is rejected") {
    const testutil::RotatingBackend backend;
    const auto prompt = prompt_of(backend, {"w0"});
    EmbedConfig cfg{GuidingSignal::sinusoidal(10, 1, 5), 5, 4, 0};
    CHECK_THROWS_AS(freqmark::embed(backend, prompt, cfg), freqmark::Error);
}

TEST_CASE("max_tokens bounds the generation length") {
    const testutil::RotatingBackend backend;
    const auto prompt = prompt_of(backend, {"w0"});
    EmbedConfig cfg{GuidingSignal({1, 2}), 7, 5, 0};
    CHECK(freqmark::embed(backend, prompt, cfg).generated().size() == 7);
    cfg.max_tokens = 0;
    CHECK_THROWS_AS(freqmark::embed(backend, prompt, cfg), freqmark::Error);
}

TEST_CASE("greedy generation always takes rank one") {
    const testutil::RotatingBackend backend;
    const auto prompt = prompt_of(backend, {"w1"});
    const std::vector<Token> tokens =
        freqmark::generate_unwatermarked(backend, prompt, 10);
    REQUIRE(tokens.size() == 11);
    std::vector<Token> ctx = prompt;
    for (std::size_t i = 1; i < tokens.size(); ++i) {
        const auto rc = backend.next_candidates(ctx, 1);
        CHECK(tokens[i] == rc.candidates.front().token);
        ctx.push_back(tokens[i]);
    }
}

TEST_CASE("backend with too few candidates raises the dedicated error") {
    const testutil::RotatingBackend backend(/*vocab=*/3);
    const auto prompt = prompt_of(backend, {"w0"});
    EmbedConfig cfg{GuidingSignal::sinusoidal(10, 1, 5), 5, 5, 0};
    CHECK_THROWS_AS(freqmark::embed(backend, prompt, cfg),
                    freqmark::InsufficientCandidatesError);
}
