#include "freqmark/attacks.hpp"

#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

#include "freqmark/errors.hpp"
#include "freqmark/reference_lm.hpp"

namespace freqmark {

std::string to_string(AttackKind kind) {
    switch (kind) {
        case AttackKind::none: return "none";
        case AttackKind::copy_paste: return "copy_paste";
        case AttackKind::substitution: return "substitution";
        case AttackKind::paraphrase_hook: return "paraphrase_hook";
        case AttackKind::translation_hook: return "translation_hook";
    }
    return "none";
}

AttackKind attack_kind_from_string(const std::string& name) {
    if (name == "none") return AttackKind::none;
    if (name == "copy_paste") return AttackKind::copy_paste;
    if (name == "substitution") return AttackKind::substitution;
    if (name == "paraphrase_hook") return AttackKind::paraphrase_hook;
    if (name == "translation_hook") return AttackKind::translation_hook;
    throw Error("unknown attack kind: " + name);
}

MixedSample copy_paste(std::span<const std::string> human,
                       const WatermarkedOutput& watermarked,
                       const AttackConfig& cfg) {
    const auto generated = watermarked.generated();
    const std::size_t min_len = static_cast<std::size_t>(cfg.segment_len_min);
    if (cfg.segment_len_min < 1 || cfg.segment_len_max < cfg.segment_len_min) {
        throw Error("copy_paste: invalid segment_len_range");
    }
    if (human.size() < min_len || generated.size() < min_len) {
        throw InputTooShortError(
            "copy_paste: inputs shorter than segment_len_range minimum");
    }

    std::mt19937_64 rng(cfg.seed);
    std::uniform_int_distribution<int> seg_len(cfg.segment_len_min,
                                               cfg.segment_len_max);

    MixedSample out;
    out.provenance = cfg;
    out.provenance.kind = AttackKind::copy_paste;

    std::size_t wm_pos = 0;      // all generated tokens are consumed
    std::size_t human_pos = 0;   // human prefix consumed as it fits
    std::size_t human_used = 0;
    // Human segment first (the prompt position), then strict alternation.
    while (wm_pos < generated.size()) {
        std::size_t h = static_cast<std::size_t>(seg_len(rng));
        // keep total human <= total watermarked (>= 1:1 ratio)
        h = std::min({h, human.size() - human_pos, generated.size() - human_used});
        for (std::size_t i = 0; i < h; ++i) {
            out.tokens.push_back(human[human_pos + i]);
            out.labels.push_back(0);
        }
        human_pos += h;
        human_used += h;

        std::size_t w = static_cast<std::size_t>(seg_len(rng));
        w = std::min(w, generated.size() - wm_pos);
        for (std::size_t i = 0; i < w; ++i) {
            out.tokens.push_back(generated[wm_pos + i].text);
            out.labels.push_back(1);
        }
        wm_pos += w;
    }
    return out;
}

MixedSample substitute(const MixedSample& sample, const LmBackend& backend,
                       const AttackConfig& cfg) {
    if (cfg.rate < 0.0 || cfg.rate > 1.0) {
        throw Error("substitute: rate must be in [0, 1]");
    }

    MixedSample out = sample;
    out.provenance = cfg;
    out.provenance.kind = AttackKind::substitution;

    std::vector<std::size_t> true_positions;
    for (std::size_t i = 0; i < sample.labels.size(); ++i) {
        if (sample.labels[i]) true_positions.push_back(i);
    }
    const std::size_t count = static_cast<std::size_t>(
        std::lround(cfg.rate * static_cast<double>(true_positions.size())));
    if (count == 0) return out;

    std::mt19937_64 rng(cfg.seed);
    std::shuffle(true_positions.begin(), true_positions.end(), rng);
    true_positions.resize(count);
    std::sort(true_positions.begin(), true_positions.end());

    for (std::size_t pos : true_positions) {
        std::vector<Token> context = tokens_from_texts(
            backend, std::span<const std::string>(out.tokens.data(), pos));
        const RankedCandidates rc =
            backend.next_candidates(context, kMaxCandidates);
        std::vector<const Token*> choices;
        for (const auto& cand : rc.candidates) {
            if (cand.token.text != out.tokens[pos]) choices.push_back(&cand.token);
        }
        if (choices.empty()) continue; // degenerate single-token vocabulary
        const std::size_t pick = rng() % choices.size();
        out.tokens[pos] = choices[pick]->text;
    }
    return out;
}

namespace {

struct Sentence {
    std::size_t begin = 0; // token range [begin, end)
    std::size_t end = 0;
    bool llm = false;      // majority of token labels
};

bool ends_sentence(const std::string& token) {
    if (token.empty()) return false;
    const char last = token.back();
    return last == '.' || last == '!' || last == '?';
}

std::vector<Sentence> split_sentences(const MixedSample& sample) {
    std::vector<Sentence> sentences;
    std::size_t begin = 0;
    for (std::size_t i = 0; i < sample.tokens.size(); ++i) {
        if (ends_sentence(sample.tokens[i]) || i + 1 == sample.tokens.size()) {
            Sentence s{begin, i + 1, false};
            std::size_t trues = 0;
            for (std::size_t t = s.begin; t < s.end; ++t) trues += sample.labels[t];
            s.llm = 2 * trues > (s.end - s.begin);
            sentences.push_back(s);
            begin = i + 1;
        }
    }
    return sentences;
}

std::vector<std::string> run_line_transformer(const std::string& command,
                                              const std::vector<std::string>& lines) {
    namespace fs = std::filesystem;
    static std::atomic<std::uint64_t> hook_counter{0};
    const std::string tag = std::to_string(::getpid()) + "_" +
                            std::to_string(hook_counter.fetch_add(1));
    const fs::path dir = fs::temp_directory_path();
    const fs::path in_path = dir / ("freqmark_hook_in_" + tag + ".txt");
    const fs::path out_path = dir / ("freqmark_hook_out_" + tag + ".txt");

    {
        std::ofstream in(in_path);
        for (const auto& line : lines) in << line << '\n';
    }
    const std::string shell_cmd =
        "( " + command + " ) < '" + in_path.string() + "' > '" + out_path.string() + "'";
    const int status = std::system(shell_cmd.c_str());
    std::vector<std::string> out_lines;
    if (status == 0) {
        std::ifstream out(out_path);
        std::string line;
        while (std::getline(out, line)) out_lines.push_back(line);
    }
    std::error_code ec;
    fs::remove(in_path, ec);
    fs::remove(out_path, ec);

    if (status != 0) {
        throw TransformerFailedError("transform hook exited with status " +
                                     std::to_string(status));
    }
    if (out_lines.size() != lines.size()) {
        throw TransformerFailedError("transform hook produced " +
                                     std::to_string(out_lines.size()) +
                                     " lines for " + std::to_string(lines.size()) +
                                     " inputs");
    }
    return out_lines;
}

} // namespace

MixedSample transform_hook(const MixedSample& sample, const std::string& command,
                           const AttackConfig& cfg) {
    const std::vector<Sentence> sentences = split_sentences(sample);

    std::vector<std::size_t> llm_sentences;
    for (std::size_t i = 0; i < sentences.size(); ++i) {
        if (sentences[i].llm) llm_sentences.push_back(i);
    }
    const std::size_t count = static_cast<std::size_t>(
        std::lround(cfg.rate * static_cast<double>(llm_sentences.size())));

    std::vector<bool> selected(sentences.size(), false);
    if (count > 0) {
        std::mt19937_64 rng(cfg.seed);
        std::shuffle(llm_sentences.begin(), llm_sentences.end(), rng);
        for (std::size_t i = 0; i < count; ++i) selected[llm_sentences[i]] = true;
    }

    std::vector<std::string> lines;
    for (std::size_t i = 0; i < sentences.size(); ++i) {
        if (!selected[i]) continue;
        std::string line;
        for (std::size_t t = sentences[i].begin; t < sentences[i].end; ++t) {
            if (!line.empty()) line += ' ';
            line += sample.tokens[t];
        }
        lines.push_back(std::move(line));
    }

    std::vector<std::string> transformed;
    if (!lines.empty()) transformed = run_line_transformer(command, lines);

    MixedSample out;
    out.id = sample.id;
    out.provenance = cfg;
    std::size_t next_line = 0;
    for (std::size_t i = 0; i < sentences.size(); ++i) {
        const Sentence& s = sentences[i];
        if (selected[i]) {
            for (auto& word : split_words(transformed[next_line])) {
                out.tokens.push_back(std::move(word));
                out.labels.push_back(s.llm ? 1 : 0);
            }
            next_line++;
        } else {
            for (std::size_t t = s.begin; t < s.end; ++t) {
                out.tokens.push_back(sample.tokens[t]);
                out.labels.push_back(sample.labels[t]);
            }
        }
    }
    return out;
}

} // namespace freqmark
