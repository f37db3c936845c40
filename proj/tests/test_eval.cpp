#include <doctest.h>

#include <cmath>

#include "freqmark/embedder.hpp"
#include "freqmark/eval.hpp"
#include "freqmark/io.hpp"
#include "test_util.hpp"

using freqmark::CorpusSpec;
using freqmark::EvalConfig;
using freqmark::GuidingSignal;
using freqmark::Token;

namespace {

freqmark::ReferenceLm data_lm() {
    freqmark::ReferenceLmConfig cfg;
    cfg.corpus_path = testutil::data_path("corpus.txt");
    return freqmark::ReferenceLm(cfg);
}

CorpusSpec small_spec() {
    CorpusSpec spec;
    spec.n_human = 6;
    spec.n_watermarked = 6;
    spec.n_copy_paste = 4;
    spec.substitution_rates = {0.3};
    spec.per_rate = 4;
    spec.sample_len = 80;
    spec.seed = 9;
    return spec;
}

} // namespace

TEST_CASE("perplexity proxy is exact on a uniform unigram model") {
    // four equally frequent words, order 1: every conditional is 1/4
    const freqmark::ReferenceLm lm = testutil::make_lm("a b c d", /*order=*/1);
    const std::vector<Token> tokens = lm.tokenize("a d c b a");
    CHECK(freqmark::perplexity_proxy(lm, tokens) ==
          doctest::Approx(4.0).epsilon(1e-9));
}

TEST_CASE("baseline scores are oriented so larger means more LLM-like") {
    const freqmark::ReferenceLm lm = data_lm();

    // empty prompts so the rescored ranks cover exactly the generation
    const std::vector<Token> greedy = freqmark::generate_unwatermarked(lm, {}, 60);
    freqmark::EmbedConfig cfg{GuidingSignal::sinusoidal(10, 1, 5), 60, 5, 0};
    const auto wm = freqmark::embed(lm, {}, cfg);

    const auto greedy_scores = freqmark::baseline_scores(lm, greedy);
    const auto wm_scores = freqmark::baseline_scores(lm, wm.tokens);

    // greedy text is rank 1 everywhere: the rank baseline is at its maximum
    const auto rank_idx = static_cast<std::size_t>(freqmark::BaselineMethod::rank);
    const auto logrank_idx =
        static_cast<std::size_t>(freqmark::BaselineMethod::logrank);
    const auto logp_idx = static_cast<std::size_t>(freqmark::BaselineMethod::log_p);
    CHECK(greedy_scores[rank_idx] == doctest::Approx(-1.0));
    CHECK(greedy_scores[logrank_idx] == doctest::Approx(0.0));
    CHECK(wm_scores[rank_idx] < greedy_scores[rank_idx]);
    CHECK(wm_scores[logrank_idx] < greedy_scores[logrank_idx]);
    // picking lower-ranked candidates costs probability mass
    CHECK(wm_scores[logp_idx] < greedy_scores[logp_idx]);
}

TEST_CASE("the calibration split is stable and close to its fraction") {
    std::size_t in_split = 0;
    for (int i = 0; i < 1000; ++i) {
        const std::string id = "sample_" + std::to_string(i);
        const bool member = freqmark::is_calibration_sample(id, 42, 0.3);
        CHECK(member == freqmark::is_calibration_sample(id, 42, 0.3));
        if (member) ++in_split;
    }
    CHECK(in_split > 230);
    CHECK(in_split < 370);
    // different seeds give different splits
    std::size_t moved = 0;
    for (int i = 0; i < 1000; ++i) {
        const std::string id = "sample_" + std::to_string(i);
        if (freqmark::is_calibration_sample(id, 42, 0.3) !=
            freqmark::is_calibration_sample(id, 43, 0.3)) {
            ++moved;
        }
    }
    CHECK(moved > 100);
}

TEST_CASE("corpus generation is byte-reproducible") {
    const freqmark::ReferenceLm lm = data_lm();
    const GuidingSignal signal = GuidingSignal::sinusoidal(10, 1, 5);
    const CorpusSpec spec = small_spec();
    const auto a = freqmark::build_corpus(lm, testutil::data_path("human.txt"),
                                          signal, spec);
    const auto b = freqmark::build_corpus(lm, testutil::data_path("human.txt"),
                                          signal, spec);
    CHECK(freqmark::samples_to_jsonl(a) == freqmark::samples_to_jsonl(b));

    // expected composition and labeling
    REQUIRE(a.size() == 20);
    CHECK(a[0].id == "human_0000");
    for (auto l : a[0].labels) CHECK(l == 0);
    CHECK(a[6].id == "wm_0000");
    for (auto l : a[6].labels) CHECK(l == 1);
    CHECK(a[12].provenance.kind == freqmark::AttackKind::copy_paste);
    CHECK(a[16].provenance.kind == freqmark::AttackKind::substitution);
    CHECK(a[16].provenance.rate == doctest::Approx(0.3));
}

TEST_CASE("evaluation separates the classes and reproduces exactly") {
    const freqmark::ReferenceLm lm = data_lm();
    const GuidingSignal signal = GuidingSignal::sinusoidal(10, 1, 5);
    const auto dataset = freqmark::build_corpus(
        lm, testutil::data_path("human.txt"), signal, small_spec());

    EvalConfig cfg;
    cfg.seed = 9;
    const freqmark::EvalReport report = freqmark::evaluate(lm, dataset, cfg);
    CHECK(report.n_samples == 20);
    CHECK(report.auc > 0.9);
    CHECK(report.tau > 0.0);
    CHECK(report.tau < 1.0);
    CHECK(report.baseline_aucs.size() == 4);
    REQUIRE(report.per_attack_rows.size() == 3);

    const freqmark::EvalReport again = freqmark::evaluate(lm, dataset, cfg);
    CHECK(freqmark::report_to_json(report).dump(2) ==
          freqmark::report_to_json(again).dump(2));
}

TEST_CASE("samples survive a jsonl round trip") {
    const freqmark::ReferenceLm lm = data_lm();
    const GuidingSignal signal = GuidingSignal::sinusoidal(10, 1, 5);
    const auto dataset = freqmark::build_corpus(
        lm, testutil::data_path("human.txt"), signal, small_spec());

    testutil::TempFile file(freqmark::samples_to_jsonl(dataset), "jsonl");
    const auto back = freqmark::read_samples_jsonl(file.path());
    REQUIRE(back.size() == dataset.size());
    for (std::size_t i = 0; i < back.size(); ++i) {
        CHECK(back[i].id == dataset[i].id);
        CHECK(back[i].tokens == dataset[i].tokens);
        CHECK(back[i].labels == dataset[i].labels);
        CHECK(back[i].provenance.kind == dataset[i].provenance.kind);
        CHECK(back[i].provenance.rate == dataset[i].provenance.rate);
    }
}
