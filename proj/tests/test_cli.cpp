// End-to-end checks of the command-line tool. Run with FREQMARK_CLI set
// to the binary under test; exits non-zero on the first failure.

#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

int failures = 0;

void expect(bool ok, const std::string& what) {
    std::cout << (ok ? "ok" : "FAILED") << " - " << what << '\n';
    if (!ok) ++failures;
}

std::string cli;
fs::path work;

struct RunResult {
    int exit_code = -1;
    std::string output; // stdout + stderr
};

RunResult run(const std::string& args, const std::string& extra_env = "") {
    const fs::path log = work / "run.log";
    const std::string cmd =
        "env " + extra_env + " '" + cli + "' " + args + " > '" + log.string() +
        "' 2>&1";
    const int status = std::system(cmd.c_str());
    RunResult result;
    if (WIFEXITED(status)) result.exit_code = WEXITSTATUS(status);
    std::ifstream in(log);
    std::ostringstream buf;
    buf << in.rdbuf();
    result.output = buf.str();
    return result;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    out << content;
}

std::string q(const fs::path& p) { return "'" + p.string() + "'"; }

} // namespace

int main() {
    const char* cli_env = std::getenv("FREQMARK_CLI");
    if (!cli_env) {
        std::cerr << "FREQMARK_CLI is not set\n";
        return 2;
    }
    cli = cli_env;
    work = fs::temp_directory_path() / ("freqmark_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(work);

    const std::string data = FREQMARK_DATA_DIR;
    const std::string corpus_arg = " --corpus '" + data + "/corpus.txt'";
    const fs::path signal = work / "signal.json";
    write(signal, R"({"period": 10, "amp_min": 1, "amp_max": 5, "shape": "sine"})");
    const fs::path prompt = work / "prompt.txt";
    write(prompt, "the harbor town\n");

    // --- generate ---------------------------------------------------------
    const fs::path gen_out = work / "gen.json";
    RunResult r = run("generate --prompt-file " + q(prompt) + " --signal " +
                      q(signal) + " --max-tokens 120 --out " + q(gen_out) +
                      corpus_arg);
    expect(r.exit_code == 0, "generate exits 0");
    json gen;
    try {
        gen = json::parse(slurp(gen_out));
    } catch (...) {
    }
    expect(gen.contains("tokens") && gen["tokens"].size() == 123,
           "generate emits prompt plus 120 tokens");

    // --- determinism: identical invocations, identical bytes ---------------
    const fs::path gen_out2 = work / "gen2.json";
    run("generate --prompt-file " + q(prompt) + " --signal " + q(signal) +
        " --max-tokens 120 --out " + q(gen_out2) + corpus_arg);
    expect(slurp(gen_out) == slurp(gen_out2), "generate output is byte-identical");

    // --- usage errors exit 2 and name the problem ---------------------------
    r = run("generate --signal " + q(signal) + corpus_arg);
    expect(r.exit_code == 2, "missing required flag exits 2");
    expect(r.output.find("--prompt-file") != std::string::npos,
           "error message names the missing flag");

    r = run("detect --in /nonexistent.json --signal " + q(signal) + corpus_arg);
    expect(r.exit_code == 2, "unreadable input file exits 2");

    r = run("frobnicate");
    expect(r.exit_code == 2, "unknown subcommand exits 2");

    r = run("--help");
    expect(r.exit_code == 0, "--help exits 0");

    // --- domain errors exit 1 ----------------------------------------------
    const fs::path bad_signal = work / "bad_signal.json";
    write(bad_signal, R"({"period": 3, "amplitudes": [2, 2, 2]})");
    r = run("generate --prompt-file " + q(prompt) + " --signal " + q(bad_signal) +
            " --max-tokens 10 --out " + q(work / "never.json") + corpus_arg);
    expect(r.exit_code == 1, "invalid signal exits 1");
    expect(!fs::exists(work / "never.json"), "no partial output on failure");

    // --- ranks + detect -----------------------------------------------------
    const fs::path ranks_out = work / "ranks.json";
    r = run("ranks --in " + q(gen_out) + " --context-prefix 3 --out " +
            q(ranks_out) + corpus_arg);
    expect(r.exit_code == 0, "ranks exits 0");

    const fs::path detect_out = work / "detect.json";
    const fs::path spec_csv = work / "spec.csv";
    r = run("detect --in " + q(gen_out) + " --signal " + q(signal) + " --out " +
            q(detect_out) + " --spectrogram-csv " + q(spec_csv) + corpus_arg);
    expect(r.exit_code == 0, "detect exits 0");
    json det;
    try {
        det = json::parse(slurp(detect_out));
    } catch (...) {
    }
    expect(det.value("sequence_score", 0.0) > 0.8,
           "watermarked text scores above 0.8");
    expect(slurp(spec_csv).rfind("window_start,", 0) == 0,
           "spectrogram csv has the expected header");

    // --- remote env vars do not leak into the reference backend -------------
    r = run("detect --in " + q(gen_out) + " --signal " + q(signal) + " --out " +
                q(work / "detect_env.json") + corpus_arg,
            "FREQMARK_API_BASE=http://127.0.0.1:9");
    expect(r.exit_code == 0, "reference backend ignores FREQMARK_API_BASE");

    // --- corpus -> attack -> eval pipeline ----------------------------------
    const fs::path dataset = work / "dataset.jsonl";
    r = run("corpus --human-texts '" + data + "/human.txt' --signal " + q(signal) +
            " --n-human 8 --n-watermarked 8 --n-copy-paste 6 --rates 0.3" +
            " --per-rate 4 --sample-len 100 --seed 5 --out " + q(dataset) +
            corpus_arg);
    expect(r.exit_code == 0, "corpus exits 0");

    const fs::path attacked = work / "attacked.jsonl";
    r = run("attack --kind substitution --rate 0.2 --seed 3 --in " + q(dataset) +
            " --out " + q(attacked) + corpus_arg);
    expect(r.exit_code == 0, "attack exits 0");

    const fs::path report = work / "report.json";
    const fs::path curves = work / "curves.csv";
    r = run("eval --dataset " + q(dataset) + " --signal " + q(signal) +
            " --report " + q(report) + " --curves " + q(curves) + " --seed 5" +
            corpus_arg);
    expect(r.exit_code == 0, "eval exits 0");
    json rep;
    try {
        rep = json::parse(slurp(report));
    } catch (...) {
    }
    expect(rep.value("auc", 0.0) > 0.9, "eval separates the pure classes");
    expect(slurp(curves).rfind("attack,rate,auc,perplexity_proxy", 0) == 0,
           "curves csv has the expected header");

    // --- eval reports are byte-identical across runs ------------------------
    const fs::path report2 = work / "report2.json";
    run("eval --dataset " + q(dataset) + " --signal " + q(signal) + " --report " +
        q(report2) + " --seed 5" + corpus_arg);
    expect(slurp(report) == slurp(report2), "eval report is byte-identical");

    fs::remove_all(work);
    std::cout << (failures == 0 ? "all cli tests passed\n"
                                : std::to_string(failures) + " cli tests failed\n");
    return failures == 0 ? 0 : 1;
}
