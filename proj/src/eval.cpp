#include "freqmark/eval.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "freqmark/embedder.hpp"
#include "freqmark/errors.hpp"
#include "freqmark/rank_extractor.hpp"

namespace freqmark {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string padded(int value, int width = 4) {
    std::string s = std::to_string(value);
    while (static_cast<int>(s.size()) < width) s.insert(s.begin(), '0');
    return s;
}

std::string rate_tag(double rate) {
    std::ostringstream os;
    os << rate;
    return os.str();
}

} // namespace

std::string to_string(BaselineMethod method) {
    switch (method) {
        case BaselineMethod::log_p: return "log_p";
        case BaselineMethod::entropy: return "entropy";
        case BaselineMethod::rank: return "rank";
        case BaselineMethod::logrank: return "logrank";
    }
    return "log_p";
}

std::array<double, 4> baseline_scores(const LmBackend& backend,
                                      std::span<const Token> tokens) {
    const std::vector<TokenScore> scores = score_sequence(backend, tokens);
    const double n = static_cast<double>(scores.size());
    double sum_logprob = 0.0, sum_entropy = 0.0, sum_rank = 0.0, sum_logrank = 0.0;
    for (const TokenScore& s : scores) {
        sum_logprob += s.logprob;
        sum_entropy += s.entropy;
        sum_rank += s.rank;
        sum_logrank += std::log(static_cast<double>(s.rank));
    }
    // oriented so larger = more LLM-like
    return {sum_logprob / n, -sum_entropy / n, -sum_rank / n, -sum_logrank / n};
}

double perplexity_proxy(const LmBackend& backend, std::span<const Token> tokens) {
    if (tokens.empty()) throw Error("perplexity_proxy: empty token sequence");
    const std::vector<TokenScore> scores = score_sequence(backend, tokens);
    double sum = 0.0;
    for (const TokenScore& s : scores) sum += s.logprob;
    return std::exp(-sum / static_cast<double>(scores.size()));
}

bool is_calibration_sample(const std::string& id, std::uint64_t seed,
                           double calibration_fraction) {
    const std::uint64_t h = splitmix64(fnv1a(id) ^ seed);
    const double u =
        static_cast<double>(h >> 11) / static_cast<double>(1ULL << 53);
    return u < calibration_fraction;
}

std::vector<MixedSample> build_corpus(const LmBackend& backend,
                                      const std::string& human_texts_path,
                                      const GuidingSignal& signal,
                                      const CorpusSpec& spec) {
    std::ifstream in(human_texts_path, std::ios::binary);
    if (!in) throw Error("build_corpus: cannot read human texts: " + human_texts_path);
    std::ostringstream buf;
    buf << in.rdbuf();
    const std::vector<std::string> human_words = split_words(buf.str());
    if (static_cast<int>(human_words.size()) < spec.sample_len) {
        throw Error("build_corpus: human corpus too small for sample_len");
    }

    const auto human_chunk = [&](std::uint64_t seed, int len) {
        const std::size_t span = human_words.size() - static_cast<std::size_t>(len);
        const std::size_t start = splitmix64(seed) % (span + 1);
        return std::vector<std::string>(human_words.begin() + start,
                                        human_words.begin() + start + len);
    };
    const auto make_prompt = [&](std::uint64_t seed) {
        const std::vector<std::string> words = human_chunk(seed, spec.prompt_len);
        return tokens_from_texts(backend, words);
    };
    const auto watermarked_output = [&](std::uint64_t seed) {
        const std::vector<Token> prompt = make_prompt(seed);
        EmbedConfig cfg{signal, spec.sample_len, kMaxCandidates, 0};
        return embed(backend, prompt, cfg);
    };
    const auto as_pure_sample = [](const WatermarkedOutput& wm, std::string id) {
        MixedSample s;
        s.id = std::move(id);
        for (const Token& t : wm.generated()) {
            s.tokens.push_back(t.text);
            s.labels.push_back(1);
        }
        return s;
    };

    std::vector<MixedSample> dataset;
    std::uint64_t stream = spec.seed;

    for (int i = 0; i < spec.n_human; ++i) {
        MixedSample s;
        s.id = "human_" + padded(i);
        s.tokens = human_chunk(splitmix64(stream + i), spec.sample_len);
        s.labels.assign(s.tokens.size(), 0);
        dataset.push_back(std::move(s));
    }
    stream = splitmix64(stream + 101);

    for (int i = 0; i < spec.n_watermarked; ++i) {
        dataset.push_back(
            as_pure_sample(watermarked_output(stream + i), "wm_" + padded(i)));
    }
    stream = splitmix64(stream + 211);

    for (int i = 0; i < spec.n_copy_paste; ++i) {
        const WatermarkedOutput wm = watermarked_output(stream + i);
        const std::vector<std::string> human =
            human_chunk(stream + 7919 + i, spec.sample_len);
        AttackConfig cfg;
        cfg.kind = AttackKind::copy_paste;
        cfg.seed = splitmix64(stream + 2 * static_cast<std::uint64_t>(i) + 1);
        cfg.segment_len_min = spec.segment_len_min;
        cfg.segment_len_max = spec.segment_len_max;
        MixedSample s = copy_paste(human, wm, cfg);
        s.id = "cp_" + padded(i);
        dataset.push_back(std::move(s));
    }
    stream = splitmix64(stream + 307);

    for (double rate : spec.substitution_rates) {
        for (int i = 0; i < spec.per_rate; ++i) {
            MixedSample base = as_pure_sample(
                watermarked_output(stream + i),
                "sub_r" + rate_tag(rate) + "_" + padded(i));
            AttackConfig cfg;
            cfg.kind = AttackKind::substitution;
            cfg.rate = rate;
            cfg.seed = splitmix64(stream + 3 * static_cast<std::uint64_t>(i) + 2);
            MixedSample s = substitute(base, backend, cfg);
            s.id = base.id;
            dataset.push_back(std::move(s));
        }
        stream = splitmix64(stream + 401);
    }
    return dataset;
}

namespace {

struct PerSample {
    double sequence_score = 0.0;
    std::array<double, 4> baselines{};
    double perplexity = 0.0;
    DetectionResult detection;
    bool pure_positive = false; // all labels true
    bool pure_negative = false; // all labels false
};

} // namespace

EvalReport evaluate(const LmBackend& backend,
                    const std::vector<MixedSample>& dataset,
                    const EvalConfig& cfg) {
    if (dataset.empty()) throw Error("evaluate: empty dataset");

    const std::size_t n = dataset.size();
    std::vector<PerSample> per(n);
    std::vector<RankSequence> rank_seqs(n);

#pragma omp parallel for schedule(dynamic, 1)
    for (long long i = 0; i < static_cast<long long>(n); ++i) {
        const MixedSample& sample = dataset[static_cast<std::size_t>(i)];
        PerSample& out = per[static_cast<std::size_t>(i)];
        const std::vector<Token> tokens = tokens_from_texts(backend, sample.tokens);
        rank_seqs[static_cast<std::size_t>(i)] = extract(backend, tokens, 0);
        out.baselines = baseline_scores(backend, tokens);
        out.perplexity = perplexity_proxy(backend, tokens);
        out.pure_positive = std::all_of(sample.labels.begin(), sample.labels.end(),
                                        [](std::uint8_t l) { return l != 0; });
        out.pure_negative = std::all_of(sample.labels.begin(), sample.labels.end(),
                                        [](std::uint8_t l) { return l == 0; });
    }

    // Sequence scores are tau-independent; compute once.
    StftConfig stft_cfg = cfg.stft;
#pragma omp parallel for schedule(dynamic, 1)
    for (long long i = 0; i < static_cast<long long>(n); ++i) {
        per[static_cast<std::size_t>(i)].detection =
            detect(rank_seqs[static_cast<std::size_t>(i)], stft_cfg);
        per[static_cast<std::size_t>(i)].sequence_score =
            per[static_cast<std::size_t>(i)].detection.sequence_score;
    }

    // Calibrate tau on the calibration split of pure samples (sample-level
    // decision = sequence_score >= tau), maximizing F1. Frozen before the
    // test split is touched.
    EvalReport report;
    report.n_samples = static_cast<int>(n);

    std::vector<std::size_t> cal_pure, test_pure;
    for (std::size_t i = 0; i < n; ++i) {
        const MixedSample& s = dataset[i];
        if (s.provenance.kind != AttackKind::none) continue;
        if (!per[i].pure_positive && !per[i].pure_negative) continue;
        if (is_calibration_sample(s.id, cfg.seed, cfg.calibration_fraction)) {
            cal_pure.push_back(i);
        } else {
            test_pure.push_back(i);
        }
    }

    double tau = cfg.stft.threshold_tau;
    if (cfg.calibrate_tau && !cal_pure.empty()) {
        double best_f1 = -1.0;
        for (int step = 1; step < 100; ++step) {
            const double candidate = step / 100.0;
            std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
            for (std::size_t i : cal_pure) {
                const bool truth = per[i].pure_positive;
                const bool pred = per[i].sequence_score >= candidate;
                if (truth && pred) ++tp;
                else if (!truth && pred) ++fp;
                else if (truth && !pred) ++fn;
                else ++tn;
            }
            const double prec = (tp + fp) > 0 ? double(tp) / (tp + fp) : 0.0;
            const double rec = (tp + fn) > 0 ? double(tp) / (tp + fn) : 0.0;
            const double f1 =
                (prec + rec) > 0.0 ? 2.0 * prec * rec / (prec + rec) : 0.0;
            if (f1 > best_f1) {
                best_f1 = f1;
                tau = candidate;
            }
        }
    }
    report.tau = tau;
    stft_cfg.threshold_tau = tau;

    // Re-run detection at the calibrated threshold for token-level labels.
#pragma omp parallel for schedule(dynamic, 1)
    for (long long i = 0; i < static_cast<long long>(n); ++i) {
        per[static_cast<std::size_t>(i)].detection =
            detect(rank_seqs[static_cast<std::size_t>(i)], stft_cfg);
    }

    // Sample-level metrics on the test split of pure samples.
    {
        std::vector<double> pos, neg;
        std::vector<std::uint8_t> labels, preds;
        for (std::size_t i : test_pure) {
            const bool truth = per[i].pure_positive;
            (truth ? pos : neg).push_back(per[i].sequence_score);
            labels.push_back(truth ? 1 : 0);
            preds.push_back(per[i].sequence_score >= tau ? 1 : 0);
        }
        if (!pos.empty() && !neg.empty()) {
            report.auc = auc(pos, neg);
            const ClassificationMetrics m = classification_metrics(labels, preds);
            report.precision = m.precision;
            report.recall = m.recall;
            report.f1 = m.f1;
            report.fpr = m.fpr;
            report.fnr = m.fnr;

            for (int b = 0; b < 4; ++b) {
                std::vector<double> bpos, bneg;
                for (std::size_t i : test_pure) {
                    (per[i].pure_positive ? bpos : bneg)
                        .push_back(per[i].baselines[static_cast<std::size_t>(b)]);
                }
                report.baseline_aucs[to_string(static_cast<BaselineMethod>(b))] =
                    auc(bpos, bneg);
            }
        }
    }

    // Token-level localization on copy-paste samples (test split):
    // prediction = membership in a detected segment.
    {
        std::vector<std::uint8_t> labels, preds;
        std::size_t boundaries_total = 0, boundaries_hit = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const MixedSample& s = dataset[i];
            if (s.provenance.kind != AttackKind::copy_paste) continue;
            if (is_calibration_sample(s.id, cfg.seed, cfg.calibration_fraction)) {
                continue;
            }
            std::vector<std::uint8_t> pred(s.tokens.size(), 0);
            for (const Segment& seg : per[i].detection.segments) {
                for (std::size_t t = seg.start; t < seg.end && t < pred.size(); ++t) {
                    pred[t] = 1;
                }
            }
            labels.insert(labels.end(), s.labels.begin(), s.labels.end());
            preds.insert(preds.end(), pred.begin(), pred.end());

            // ground-truth boundaries vs nearest predicted segment edge
            std::vector<std::size_t> true_bounds, pred_bounds;
            for (std::size_t t = 1; t < s.labels.size(); ++t) {
                if (s.labels[t] != s.labels[t - 1]) true_bounds.push_back(t);
            }
            for (const Segment& seg : per[i].detection.segments) {
                pred_bounds.push_back(seg.start);
                pred_bounds.push_back(seg.end);
            }
            for (std::size_t tb : true_bounds) {
                ++boundaries_total;
                for (std::size_t pb : pred_bounds) {
                    const std::size_t diff = tb > pb ? tb - pb : pb - tb;
                    if (diff <= 5) {
                        ++boundaries_hit;
                        break;
                    }
                }
            }
        }
        if (!labels.empty()) {
            report.token_level = classification_metrics(labels, preds);
        }
        report.boundary_within_5 =
            boundaries_total > 0
                ? static_cast<double>(boundaries_hit) / boundaries_total
                : 0.0;
    }

    // Per-attack rows: AUC of each (kind, rate) group against the pure
    // negatives of the test split, plus the group's mean perplexity proxy.
    {
        std::vector<double> neg;
        for (std::size_t i : test_pure) {
            if (per[i].pure_negative) neg.push_back(per[i].sequence_score);
        }
        std::map<std::pair<std::string, double>, std::vector<std::size_t>> groups;
        for (std::size_t i = 0; i < n; ++i) {
            const MixedSample& s = dataset[i];
            if (s.provenance.kind == AttackKind::none && per[i].pure_positive) {
                groups[{"watermarked", 0.0}].push_back(i);
            } else if (s.provenance.kind != AttackKind::none) {
                groups[{to_string(s.provenance.kind), s.provenance.rate}].push_back(i);
            }
        }
        for (const auto& [key, idxs] : groups) {
            AttackRow row;
            row.kind = key.first == "watermarked"
                           ? AttackKind::none
                           : attack_kind_from_string(key.first);
            row.rate = key.second;
            row.n_samples = static_cast<int>(idxs.size());
            std::vector<double> pos;
            double ppl = 0.0;
            for (std::size_t i : idxs) {
                pos.push_back(per[i].sequence_score);
                ppl += per[i].perplexity;
            }
            row.perplexity = ppl / static_cast<double>(idxs.size());
            row.auc = neg.empty() ? 0.0 : auc(pos, neg);
            report.per_attack_rows.push_back(row);
        }
    }

    return report;
}

} // namespace freqmark
