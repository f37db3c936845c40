#include <doctest.h>

#include <random>
#include <vector>

#include "freqmark/errors.hpp"
#include "freqmark/metrics.hpp"

using freqmark::ClassificationMetrics;
using freqmark::DegenerateInputError;

namespace {

// O(n^2) pair-counting AUC, the definition the fast version must match.
double auc_brute(const std::vector<double>& pos, const std::vector<double>& neg) {
    double wins = 0.0;
    for (double p : pos) {
        for (double q : neg) {
            if (p > q) wins += 1.0;
            else if (p == q) wins += 0.5;
        }
    }
    return wins / (static_cast<double>(pos.size()) * static_cast<double>(neg.size()));
}

} // namespace

TEST_CASE("auc on separable and tied examples") {
    CHECK(freqmark::auc(std::vector<double>{0.9, 0.8},
                        std::vector<double>{0.1, 0.2}) == doctest::Approx(1.0));
    CHECK(freqmark::auc(std::vector<double>{0.1, 0.2},
                        std::vector<double>{0.9, 0.8}) == doctest::Approx(0.0));
    CHECK(freqmark::auc(std::vector<double>{0.5}, std::vector<double>{0.5}) ==
          doctest::Approx(0.5));
    CHECK(freqmark::auc(std::vector<double>{0.7, 0.3},
                        std::vector<double>{0.5, 0.5}) == doctest::Approx(0.5));
    const std::vector<double> empty;
    const std::vector<double> one{0.5};
    CHECK_THROWS_AS(freqmark::auc(empty, one), DegenerateInputError);
    CHECK_THROWS_AS(freqmark::auc(one, empty), DegenerateInputError);
}

TEST_CASE("auc agrees with pair counting on random inputs") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> value(0.0, 1.0);
    std::uniform_int_distribution<int> size(1, 40);
    // coarse grid forces plenty of ties
    std::uniform_int_distribution<int> coarse(0, 4);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> pos(static_cast<std::size_t>(size(rng)));
        std::vector<double> neg(static_cast<std::size_t>(size(rng)));
        const bool tie_heavy = trial % 2 == 0;
        for (double& v : pos) v = tie_heavy ? coarse(rng) / 4.0 : value(rng);
        for (double& v : neg) v = tie_heavy ? coarse(rng) / 4.0 : value(rng);
        CHECK(freqmark::auc(pos, neg) ==
              doctest::Approx(auc_brute(pos, neg)).epsilon(1e-12));
    }
}

TEST_CASE("classification metrics on a hand-worked confusion matrix") {
    // 10 tokens, 5 truly positive, everything flagged
    const std::vector<std::uint8_t> labels{1, 1, 1, 1, 1, 0, 0, 0, 0, 0};
    const std::vector<std::uint8_t> all_one(10, 1);
    const ClassificationMetrics m = freqmark::classification_metrics(labels, all_one);
    CHECK(m.precision == doctest::Approx(0.5));
    CHECK(m.recall == doctest::Approx(1.0));
    CHECK(m.f1 == doctest::Approx(2.0 / 3.0));
    CHECK(m.fpr == doctest::Approx(1.0));
    CHECK(m.fnr == doctest::Approx(0.0));
}

TEST_CASE("classification metrics: tp=3 fp=1 fn=2 tn=4") {
    const std::vector<std::uint8_t> labels{1, 1, 1, 1, 1, 0, 0, 0, 0, 0};
    const std::vector<std::uint8_t> preds{1, 1, 1, 0, 0, 1, 0, 0, 0, 0};
    const ClassificationMetrics m = freqmark::classification_metrics(labels, preds);
    CHECK(m.precision == doctest::Approx(0.75));
    CHECK(m.recall == doctest::Approx(0.6));
    CHECK(m.f1 == doctest::Approx(2.0 * 0.75 * 0.6 / 1.35));
    CHECK(m.fpr == doctest::Approx(0.2)); // 1 false positive over 5 negatives
    CHECK(m.fnr == doctest::Approx(0.4));
}

TEST_CASE("classification metrics match brute-force counting on random data") {
    std::mt19937_64 rng(23);
    std::uniform_int_distribution<int> coin(0, 1);
    int done = 0;
    while (done < 50) {
        std::vector<std::uint8_t> labels(30), preds(30);
        for (auto& l : labels) l = static_cast<std::uint8_t>(coin(rng));
        for (auto& p : preds) p = static_cast<std::uint8_t>(coin(rng));
        double tp = 0, fp = 0, tn = 0, fn = 0;
        for (std::size_t i = 0; i < labels.size(); ++i) {
            tp += labels[i] && preds[i];
            fp += !labels[i] && preds[i];
            tn += !labels[i] && !preds[i];
            fn += labels[i] && !preds[i];
        }
        if (tp + fn == 0 || fp + tn == 0) continue; // needs both truth classes
        const ClassificationMetrics m =
            freqmark::classification_metrics(labels, preds);
        const double prec = tp + fp > 0 ? tp / (tp + fp) : 0.0;
        CHECK(m.precision == doctest::Approx(prec));
        CHECK(m.recall == doctest::Approx(tp / (tp + fn)));
        CHECK(m.fpr == doctest::Approx(fp / (fp + tn)));
        CHECK(m.fnr == doctest::Approx(fn / (tp + fn)));
        CHECK(m.f1 >= 0.0);
        CHECK(m.f1 <= 1.0);
        ++done;
    }
}

TEST_CASE("inverting labels and predictions swaps the error rates") {
    const std::vector<std::uint8_t> labels{1, 1, 0, 1, 0, 0, 1, 0};
    const std::vector<std::uint8_t> preds{1, 0, 0, 1, 1, 0, 1, 1};
    std::vector<std::uint8_t> inv_labels, inv_preds;
    for (auto l : labels) inv_labels.push_back(l ? 0 : 1);
    for (auto p : preds) inv_preds.push_back(p ? 0 : 1);
    const ClassificationMetrics m = freqmark::classification_metrics(labels, preds);
    const ClassificationMetrics w =
        freqmark::classification_metrics(inv_labels, inv_preds);
    CHECK(m.fpr == doctest::Approx(w.fnr));
    CHECK(m.fnr == doctest::Approx(w.fpr));
}

TEST_CASE("degenerate classification inputs are rejected") {
    const std::vector<std::uint8_t> ones(5, 1);
    const std::vector<std::uint8_t> zeros(5, 0);
    CHECK_THROWS_AS(freqmark::classification_metrics(ones, ones),
                    DegenerateInputError);
    CHECK_THROWS_AS(freqmark::classification_metrics(zeros, zeros),
                    DegenerateInputError);
    const std::vector<std::uint8_t> short_pred(4, 1);
    CHECK_THROWS_AS(freqmark::classification_metrics(ones, short_pred),
                    DegenerateInputError);
}

TEST_CASE("spearman correlation on monotone and constant data") {
    const std::vector<double> x{1, 2, 3, 4, 5};
    const std::vector<double> up{10, 20, 30, 40, 50};
    const std::vector<double> down{9, 7, 5, 3, 1};
    CHECK(freqmark::spearman_rho(x, up) == doctest::Approx(1.0));
    CHECK(freqmark::spearman_rho(x, down) == doctest::Approx(-1.0));
    // monotone in rank even though nonlinear in value
    const std::vector<double> curved{1, 8, 27, 64, 125};
    CHECK(freqmark::spearman_rho(x, curved) == doctest::Approx(1.0));
    const std::vector<double> constant(5, 2.0);
    CHECK_THROWS_AS(freqmark::spearman_rho(x, constant), DegenerateInputError);
    const std::vector<double> single_x{1.0};
    const std::vector<double> single_y{2.0};
    CHECK_THROWS_AS(freqmark::spearman_rho(single_x, single_y),
                    DegenerateInputError);
}
