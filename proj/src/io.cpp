#include "freqmark/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "freqmark/errors.hpp"

namespace freqmark {

namespace {

std::string format_double(double value) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.12g", value);
    return buf;
}

} // namespace

void atomic_write_file(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot write file: " + tmp);
        out << content;
        if (!out.flush()) throw Error("write failed: " + tmp);
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw Error("cannot rename " + tmp + " to " + path);
    }
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("unreadable file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

nlohmann::json sample_to_json(const MixedSample& sample) {
    std::vector<bool> labels(sample.labels.begin(), sample.labels.end());
    return nlohmann::json{
        {"id", sample.id},
        {"tokens", sample.tokens},
        {"labels", labels},
        {"attack",
         {{"kind", to_string(sample.provenance.kind)},
          {"rate", sample.provenance.rate},
          {"seed", sample.provenance.seed}}},
    };
}

MixedSample sample_from_json(const nlohmann::json& j) {
    MixedSample s;
    s.id = j.at("id").get<std::string>();
    s.tokens = j.at("tokens").get<std::vector<std::string>>();
    if (j.contains("labels")) {
        for (bool b : j.at("labels").get<std::vector<bool>>()) {
            s.labels.push_back(b ? 1 : 0);
        }
    } else {
        s.labels.assign(s.tokens.size(), 0);
    }
    if (s.labels.size() != s.tokens.size()) {
        throw Error("sample " + s.id + ": labels/tokens length mismatch");
    }
    if (j.contains("attack")) {
        const auto& a = j.at("attack");
        s.provenance.kind = attack_kind_from_string(a.value("kind", "none"));
        s.provenance.rate = a.value("rate", 0.0);
        s.provenance.seed = a.value("seed", std::uint64_t{0});
    }
    return s;
}

std::vector<MixedSample> read_samples_jsonl(const std::string& path) {
    std::istringstream in(read_file(path));
    std::vector<MixedSample> samples;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        try {
            samples.push_back(sample_from_json(nlohmann::json::parse(line)));
        } catch (const nlohmann::json::exception& e) {
            throw Error(path + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    if (samples.empty()) throw Error("no samples in " + path);
    return samples;
}

std::string samples_to_jsonl(const std::vector<MixedSample>& samples) {
    std::string out;
    for (const MixedSample& s : samples) {
        out += sample_to_json(s).dump();
        out += '\n';
    }
    return out;
}

nlohmann::json detection_to_json(const DetectionResult& result) {
    nlohmann::json segments = nlohmann::json::array();
    for (const Segment& s : result.segments) {
        segments.push_back({{"start", s.start},
                            {"end", s.end},
                            {"mean_score", s.mean_score}});
    }
    std::vector<bool> labels(result.token_labels.begin(), result.token_labels.end());
    return nlohmann::json{
        {"token_scores", result.token_scores},
        {"token_labels", labels},
        {"segments", segments},
        {"sequence_score", result.sequence_score},
        {"degraded_confidence", result.degraded_confidence},
    };
}

nlohmann::json report_to_json(const EvalReport& report) {
    nlohmann::json rows = nlohmann::json::array();
    for (const AttackRow& row : report.per_attack_rows) {
        rows.push_back({{"kind", to_string(row.kind)},
                        {"rate", row.rate},
                        {"auc", row.auc},
                        {"perplexity_proxy", row.perplexity},
                        {"n_samples", row.n_samples}});
    }
    return nlohmann::json{
        {"auc", report.auc},
        {"fpr", report.fpr},
        {"fnr", report.fnr},
        {"precision", report.precision},
        {"recall", report.recall},
        {"f1", report.f1},
        {"tau", report.tau},
        {"baseline_aucs", report.baseline_aucs},
        {"token_level",
         {{"precision", report.token_level.precision},
          {"recall", report.token_level.recall},
          {"f1", report.token_level.f1},
          {"fpr", report.token_level.fpr},
          {"fnr", report.token_level.fnr}}},
        {"boundary_within_5", report.boundary_within_5},
        {"per_attack_rows", rows},
        {"n_samples", report.n_samples},
    };
}

std::string spectrogram_to_csv(const Spectrogram& spec) {
    std::string out = "window_start";
    for (double f : spec.bin_frequencies) {
        out += ",f_" + format_double(f);
    }
    out += '\n';
    for (std::size_t w = 0; w < spec.window_starts.size(); ++w) {
        out += std::to_string(spec.window_starts[w]);
        for (double m : spec.magnitudes[w]) {
            out += ',';
            out += format_double(m);
        }
        out += '\n';
    }
    return out;
}

std::string curves_to_csv(const EvalReport& report) {
    std::string out = "attack,rate,auc,perplexity_proxy\n";
    for (const AttackRow& row : report.per_attack_rows) {
        out += to_string(row.kind) + "," + format_double(row.rate) + "," +
               format_double(row.auc) + "," + format_double(row.perplexity) + "\n";
    }
    return out;
}

GuidingSignal load_signal(const std::string& path, int k_max) {
    try {
        return GuidingSignal::from_json(nlohmann::json::parse(read_file(path)), k_max);
    } catch (const nlohmann::json::exception& e) {
        throw Error("signal file " + path + ": " + e.what());
    }
}

} // namespace freqmark
