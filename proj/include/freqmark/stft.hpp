#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "freqmark/rank_extractor.hpp"

namespace freqmark {

struct StftConfig {
    int window_len = 10;           // N, samples per window
    int hop = 1;                   // window_len - overlap
    double target_frequency = 0.1; // cycles per token
    double threshold_tau = 0.4;
    int smoothing_len = 5;         // odd, median filter length
    int min_segment_tokens = 5;

    void validate() const; // throws Error on invariant violation
};

// Window-indexed frequency magnitudes from the sliding DFT.
struct Spectrogram {
    std::vector<std::size_t> window_starts;      // index into the rank sequence
    std::vector<std::vector<double>> magnitudes; // [num_windows][N/2 + 1]
    std::vector<double> bin_frequencies;         // bin / N, cycles per token
    int window_len = 0;                          // actual window length used
    bool whole_sequence_fallback = false;        // input shorter than N
};

// Periodic Hann window: w[n] = 0.5 * (1 - cos(2*pi*n/N)), n in [0, N).
std::vector<double> hann_window(int n);

// In-place iterative radix-2 FFT; size must be a power of two.
// inverse=true applies the conjugate transform without the 1/N scale.
void fft_pow2(std::span<std::complex<double>> data, bool inverse = false);

// Forward DFT of a real frame for arbitrary length (radix-2 directly,
// Bluestein's chirp-z otherwise). Returns all N bins.
std::vector<std::complex<double>> dft(std::span<const double> frame);

// Sliding mean-removed, Hann-windowed DFT. Windows are independent and
// transformed in parallel. Inputs shorter than window_len fall back to a
// single whole-sequence window with the fallback flag set.
Spectrogram stft(const RankSequence& ranks, const StftConfig& cfg);

// Serial reference path: same contract as stft but a plain loop over a
// naive O(N^2) DFT. Kept for testing and benchmarking the fast path.
Spectrogram stft_serial(const RankSequence& ranks, const StftConfig& cfg);

// Per-window watermark score: |X[b*]|^2 / sum_{b=1..N/2} |X[b]|^2 with
// b* = round(target_frequency * N), clamped to [1, N/2]. Zero non-DC
// energy scores 0.
std::vector<double> score_windows(const Spectrogram& spec, const StftConfig& cfg);

} // namespace freqmark
