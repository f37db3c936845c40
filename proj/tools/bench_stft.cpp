// Benchmark: OpenMP fast-transform STFT vs the serial naive-DFT reference
// on a long synthetic rank sequence.

#include <chrono>
#include <cstdio>
#include <random>

#include "freqmark/stft.hpp"

using namespace freqmark;

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
        .count();
}

} // namespace

int main(int argc, char** argv) {
    std::size_t length = 200000;
    if (argc > 1) length = std::strtoull(argv[1], nullptr, 10);

    RankSequence ranks;
    ranks.ranks.resize(length);
    ranks.token_spans.resize(length);
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<int> dist(1, 6);
    for (std::size_t i = 0; i < length; ++i) {
        ranks.ranks[i] = dist(rng);
        ranks.token_spans[i] = i;
    }

    StftConfig cfg;
    std::printf("rank sequence: %zu tokens, window %d, hop %d\n", length,
                cfg.window_len, cfg.hop);

    auto t0 = std::chrono::steady_clock::now();
    const Spectrogram parallel = stft(ranks, cfg);
    const double t_parallel = seconds_since(t0);

    t0 = std::chrono::steady_clock::now();
    const Spectrogram serial = stft_serial(ranks, cfg);
    const double t_serial = seconds_since(t0);

    double max_err = 0.0;
    for (std::size_t w = 0; w < parallel.magnitudes.size(); ++w) {
        for (std::size_t b = 0; b < parallel.magnitudes[w].size(); ++b) {
            const double err =
                std::abs(parallel.magnitudes[w][b] - serial.magnitudes[w][b]);
            if (err > max_err) max_err = err;
        }
    }

    std::printf("parallel fast stft : %.4f s (%zu windows)\n", t_parallel,
                parallel.magnitudes.size());
    std::printf("serial naive stft  : %.4f s\n", t_serial);
    std::printf("speedup            : %.2fx\n", t_serial / t_parallel);
    std::printf("max |diff|         : %.3e\n", max_err);
    return max_err <= 1e-9 ? 0 : 1;
}
